"""
Cost of coordination versus ensemble size
=========================================

For identical turbines hit by the same gust, each one's share of the
coordination cost falls as ``1/nu``; the whole-farm excess stays fixed.
The printed turbine matrix is unstable, so the sign-corrected variant is used.
"""

import numpy as np

from coordlqr import HardSpec, Weights, center_value, local_gain, optimal_cost
from coordlqr.scenarios import validate_wind_farm, wind_farm

printed = validate_wind_farm(wind_farm("printed"))
print("printed model:", printed.diagnostic())

data = wind_farm("sign-corrected")
print("corrected model Hurwitz:", validate_wind_farm(data).hurwitz)
plant, cost = data.plant(), data.cost()

# zero center gain: the farm's total input must not react at all
Fbar = np.zeros((1, 5))
X_alpha, _ = local_gain(plant, cost)
Xbar = center_value(plant, cost, HardSpec(Fbar))

print(f"{'nu':>4} {'per agent':>12} {'nu * per agent':>16}")
for nu in (1, 2, 4, 8, 16, 32, 64, 128):
    w = Weights.uniform(nu)
    x0s = np.outer(w.mu, data.Bw[:, 0])  # gust impulse, scaled so xbar0 = Bw
    exc = optimal_cost(X_alpha, Xbar, x0s, w).J_excess[0]
    print(f"{nu:>4} {exc:12.6f} {nu * exc:16.10f}")
