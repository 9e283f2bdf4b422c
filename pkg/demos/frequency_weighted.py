"""
Frequency-weighted coordination
===============================

An integrator weight on the mismatch only insists on coordination at low
frequency. The closed-loop mismatch filter then blocks DC, and its cutoff
moves with the trade-off parameter.
"""

import numpy as np

from coordlqr import Weights
from coordlqr.freqcoord import integrator_family, sweep_weighted, synthesize_weighted
from coordlqr.scenarios import wind_farm
from coordlqr.softcoord import sweep_lambda

data = wind_farm("sign-corrected")
plant, cost = data.plant(), data.cost()
w = Weights.uniform(10)
x0s = np.outer(w.mu, data.Bw[:, 0])
Fbar = np.zeros((1, 5))

synth = synthesize_weighted(plant, cost, w, Fbar, integrator_family()(0.5))
print("cutoff", synth.omega_sigma, " |M(0)|", abs(synth.M_phi.evaluate(0.0)[0, 0]))

grid = np.linspace(0, 0.99, 12)
static = sweep_lambda(plant, cost, w, Fbar, grid, x0s)
integ = sweep_weighted(plant, cost, w, Fbar, "integrator", grid, x0s)
print(f"{'lam':>6} {'static mis':>12} {'static exc':>12} {'integ mis':>12} {'integ exc':>12} {'cutoff':>8}")
for s, i in zip(static, integ):
    om = float("nan") if i.omega_sigma is None else i.omega_sigma
    print(f"{s.lam:6.3f} {s.sigma:12.4f} {s.excess[0]:12.4f} {i.mismatch:12.4f} {i.excess[0]:12.4f} {om:8.4f}")
