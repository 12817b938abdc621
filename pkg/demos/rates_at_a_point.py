"""How fast do the three approximants converge at z = 2?

Fits log|f - P/Q| against N = n + 1 coefficients used and compares the slope
with the value the equilibrium problem predicts.
"""
import numpy as np

from hprates import make_model
from hprates.rates import rate_fit

model = make_model(2, 3, 200)
windows = {"pade": range(20, 40), "hp2": range(14, 28), "hp3": range(10, 22)}

print(f"{'kind':6s} {'fitted':>12s} {'predicted':>12s} {'gap':>9s}")
for kind, idx in windows.items():
    rep = rate_fit(model, kind, idx, 2.0)
    print(f"{kind:6s} {rep.fitted_slope:12.8f} {rep.predicted_slope:12.8f} {rep.relative_gap:9.1e}")

# Pade only sees the cut E, so its slope is -g_E(2, inf)
print("\n-log(2 + sqrt 3) =", -np.log(2 + np.sqrt(3)))
# Using f^2 (and f^3) buys a steeper slope for the same number of coefficients.
