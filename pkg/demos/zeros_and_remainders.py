"""Where the Hermite-Pade denominators put their zeros.

All zeros of the type II denominators are real, simple and inside (-1, 1).
Their counting measures approach the equilibrium measures; the Kolmogorov
distance shrinks as the index grows. On F the remainder Q f - P oscillates,
with as many sign changes as the orthogonality forces.
"""
from hprates import make_model, robin_measure, balayage_onto_segment
from hprates.equilibrium import cached_equilibrium
from hprates.potential import mixture
from hprates.rates import denominator_zeros, remainder_sign_changes_on_F, zero_distribution_distance

model = make_model(2, 3, 200)
E = (-1.0, 1.0)
tau, _ = robin_measure(E, 256)
ref = {
    "hp2": cached_equilibrium(model, 3.0).lambda_E,
    "hp3": mixture([1 / 3, 2 / 3], [balayage_onto_segment(cached_equilibrium(model, 1.0).lambda_F, E, n=256), tau]),
}

for kind in ("hp2", "hp3"):
    for idx in (5, 10, 20):
        zeros, real = denominator_zeros(model, kind, idx)
        d = zero_distribution_distance(model, kind, idx, ref[kind])
        print(f"{kind} index {idx:2d}: {len(zeros)} zeros, all real {real}, "
              f"range [{float(zeros[0]):+.4f}, {float(zeros[-1]):+.4f}], distance {d:.4f}")

for kind, idx in (("hp2", 10), ("hp3", 10)):
    print(f"{kind} index {idx}: {remainder_sign_changes_on_F(model, kind, idx)} sign changes on F")
