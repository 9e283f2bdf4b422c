"""
Soft coordination trade-off
===========================

Penalizing the mismatch ``ubar - Fbar xbar`` instead of forbidding it gives
a one-parameter family between decentralized LQR (``lam = 0``) and hard
coordination (``lam = 1``).
"""

import numpy as np

from coordlqr import Weights
from coordlqr.scenarios import tadpole
from coordlqr.softcoord import SoftSpec, equivalence_as_hard, solve_soft, sweep_lambda

plant, cost = tadpole()
Fbar = -25 * np.eye(2)

sol = solve_soft(plant, cost, SoftSpec(Fbar, 0.5))
print("X_lambda", sol.X_lambda[0, 0], " Y_lambda", sol.Y_lambda[0, 0])

# any soft optimum is a hard optimum for some other center gain
print("equivalent hard center gain", equivalence_as_hard(plant, cost, SoftSpec(Fbar, 0.5)).Fbar[0, 0])

w = Weights.uniform(10)
x0s = np.outer(w.mu, [1.0, 0.0])
print(f"{'lam':>6} {'mismatch':>12} {'excess/agent':>14} {'saving/agent':>14}")
for p in sweep_lambda(plant, cost, w, Fbar, np.linspace(0, 0.95, 11), x0s):
    print(f"{p.lam:6.3f} {p.sigma:12.6f} {p.excess[0]:14.6f} {p.alpha[0]:14.6f}")
