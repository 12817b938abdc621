"""The mixed Green-logarithmic equilibrium pair for A=2, B=3.

lambda_E(theta) lives on E = [-1, 1], lambda_F(theta) on F = [a, b]. Prints a
few density values relative to the arcsine law and the identities that tie
the two measures together.
"""
import numpy as np

from hprates import make_model, robin_measure, balayage_onto_segment
from hprates.equilibrium import cached_equilibrium

model = make_model(2, 3, 60)
tau, _ = robin_measure((-1.0, 1.0), 256)

for theta in (1.0, 3.0):
    s = cached_equilibrium(model, theta)
    print(f"theta = {theta}: c_E = {s.c_E:.12f}, c_F = {s.c_F:.12f}")
    for name, (r, _) in s.identity_residuals.items():
        print(f"  {name:12s} residual {r:.1e}")
    x = np.array([-0.9, -0.5, 0.0, 0.5, 0.9])
    ratio = s.lambda_E.density(x) / tau.density(x)
    print("  lambda_E / arcsine at", x, "->", np.round(ratio, 4))
    # lambda_E leans toward F: more mass near x = 1 than the arcsine law has.

    # sweeping lambda_F back onto E and mixing with the arcsine law gives lambda_E
    b = balayage_onto_segment(s.lambda_F, (-1.0, 1.0), n=256)
    mix = (theta * tau.density_values + b.density_values) / (1 + theta)
    print("  decomposition error", np.max(np.abs(mix - s.lambda_E.density_values)))
