"""Convergence rates of Padé and Hermite-Padé approximants for a Markov-type algebraic function.

The model function is f(z) = [(A - 1/phi(z)) (B - 1/phi(z))]^(-1/2) with
phi(z) = z + (z^2 - 1)^(1/2) and 1 < A < B. Approximants are built in mpmath at
high precision; the potential-theory side (equilibrium measures, Green
potentials, predicted rates) runs in float64 numpy.
"""

__version__ = "0.1.0"

from .errors import (
    BranchCutError,
    HPRatesError,
    IdentityViolationError,
    KindMismatchError,
    NegativeDensityError,
    NonConvergenceError,
    ParameterDomainError,
    PoleProximityError,
    PrecisionExhaustedError,
    RankDeficiencyError,
    SamplingResolutionError,
)
from .model import (
    ModelParams,
    PrecisionContext,
    eval_f,
    eval_phi,
    laurent_coeffs,
    laurent_coeffs_power,
    make_model,
    sigma_density,
)
from .hp_solver import HPSystemResult, discriminant, hp_type1, hp_type2, pade, remainder_order
from .polynomial import Polynomial, ZeroSet, poly_roots
from .potential import (
    DiscreteMeasure,
    SegmentMeasure,
    balayage_onto_segment,
    green_potential,
    green_segment,
    log_potential,
    measure_cdf,
    point_mass,
    robin_measure,
)
from .equilibrium import (
    EquilibriumSolution,
    monotony_gap,
    predicted_rate,
    solve_equilibrium,
    solve_lambda_E,
    solve_lambda_F,
)
from .rates import (
    RateReport,
    empirical_error,
    rate_fit,
    remainder_sign_changes_on_F,
    theorem_ordering_check,
    zero_distribution_distance,
)
