"""Soft coordination: the hard constraint replaced by a penalty.

The global cost becomes ``sum J_i + lam/(1-lam) ||ubar - Fbar xbar||^2`` with
``lam`` in ``[0, 1]``. The center of mass then solves an LQR with cross terms,
the optimal law keeps the diagonal-plus-rank-one shape with the center gain
``lam Fbar - (1-lam) B' X_lam``, and the trade-off between local cost and
coordination mismatch is available in closed form through ``Y_lam = dX/dlam``
and ``Z_lam = (1-lam) dY/dlam - 2 Y_lam``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkit
from .coordsynth import (
    CostReport,
    GainDecomposition,
    HardSpec,
    _initial_states,
    center_value,
    check_assumptions,
    local_gain,
)
from .exceptions import CoordLQRError, InternalConsistencyError, SweepError, ValidationError
from .numkit import DEFAULT_TOL, as_matrix

__all__ = [
    "SoftSpec",
    "SoftSolution",
    "TradeoffPoint",
    "solve_soft",
    "soft_cost_report",
    "equivalence_as_hard",
    "sweep_lambda",
]


@dataclass(frozen=True)
class SoftSpec:
    Fbar: np.ndarray
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "Fbar", as_matrix(self.Fbar, "Fbar"))
        lam = float(self.lam)
        if not 0.0 <= lam <= 1.0:
            raise ValidationError(f"lambda must lie in [0, 1], got {lam!r}")
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True)
class SoftSolution:
    """Center-of-mass data for one value of ``lam``.

    ``F_center`` is the effective center gain, ``A_lambda = A + B F_center``.
    """

    lam: float
    X_lambda: np.ndarray
    F_center: np.ndarray
    Y_lambda: np.ndarray
    Z_lambda: np.ndarray
    A_lambda: np.ndarray
    X_alpha: np.ndarray
    F_alpha: np.ndarray
    Xbar: np.ndarray

    def gains(self, weights):
        return GainDecomposition(self.F_alpha, self.F_center, weights)


@dataclass(frozen=True)
class TradeoffPoint:
    lam: float
    sigma: float
    excess: np.ndarray
    alpha: np.ndarray


def _soft_riccati(plant, cost, Fbar, lam, tol):
    # center LQR: weight [[Q + k F'F, -k F'], [-k F, I/(1-lam)]], k = lam/(1-lam)
    k = lam / (1.0 - lam)
    R = np.eye(plant.m) / (1.0 - lam)
    S = -k * Fbar.T
    return numkit.solve_care(plant.A, plant.B, cost.Q + k * Fbar.T @ Fbar, R, S, tol)


def solve_soft(plant, cost, soft, tol=DEFAULT_TOL):
    """Solve the soft-constraint center problem and its sensitivities.

    ``lam == 1`` is routed through the hard-constraint Lyapunov equation.
    """
    Fbar = as_matrix(soft.Fbar, "Fbar", rows=plant.m, cols=plant.n)
    lam = soft.lam
    check_assumptions(plant, cost, tol)
    hard = HardSpec(Fbar)
    X_alpha, F_alpha = local_gain(plant, cost, tol)
    Xbar = center_value(plant, cost, hard, tol)

    if lam == 1.0:
        X = Xbar
    elif lam == 0.0:
        X = X_alpha
    else:
        X = _soft_riccati(plant, cost, Fbar, lam, tol)

    A, B = plant.A, plant.B
    F_center = lam * Fbar - (1.0 - lam) * B.T @ X
    A_lam = A + B @ F_center
    K = Fbar + B.T @ X
    Y = numkit.solve_lyapunov(A_lam, K.T @ K, tol)
    L = K - (1.0 - lam) * B.T @ Y
    Z = -numkit.solve_lyapunov(A_lam, 2.0 * L.T @ L, tol)

    slack = tol.psd_slack * (1.0 + np.linalg.norm(Xbar))
    for name, M in (
        ("X_lambda - X_alpha", X - X_alpha),
        ("Xbar - X_lambda", Xbar - X),
        ("Y_lambda", Y),
        ("-Z_lambda", -Z),
    ):
        if numkit.min_eig(M) < -slack * max(1.0, np.linalg.norm(M)):
            raise InternalConsistencyError(f"{name} is not PSD (min eig {numkit.min_eig(M):.3e})")
    return SoftSolution(lam, X, F_center, Y, Z, A_lam, X_alpha, F_alpha, Xbar)


def soft_cost_report(plant, cost, weights, soft, x0s, tol=DEFAULT_TOL):
    """Costs under the soft law.

    Returns
    -------
    report : CostReport
        ``J_total`` is ``sum J_i`` (the penalty is in ``report.extra``).
    sigma : float
        Mismatch energy ``||ubar - Fbar xbar||^2``.
    alphas : ndarray
        Per-agent saving relative to the hard constraint.
    """
    sol = solve_soft(plant, cost, soft, tol)
    lam = sol.lam
    X0 = _initial_states(x0s, weights, plant.n)
    xbar0 = weights.mu @ X0
    mu2 = weights.mu**2
    J_local = np.einsum("ij,jk,ik->i", X0, sol.X_alpha, X0)
    eff = sol.X_lambda - lam * (1.0 - lam) * sol.Y_lambda
    center_excess = float(xbar0 @ (eff - sol.X_alpha) @ xbar0)
    hard_excess = float(xbar0 @ (sol.Xbar - sol.X_alpha) @ xbar0)
    saving = float(xbar0 @ (sol.Xbar - eff) @ xbar0)
    sigma = (1.0 - lam) ** 2 * float(xbar0 @ sol.Y_lambda @ xbar0)

    scale = tol.psd_slack * (1.0 + float(xbar0 @ xbar0) * np.linalg.norm(sol.Xbar))
    if min(center_excess, saving, sigma) < -scale:
        raise InternalConsistencyError("soft-constraint cost split has a negative term")
    penalty = lam / (1.0 - lam) * sigma if lam < 1.0 else 0.0
    report = CostReport(
        J_total=float(J_local.sum() + center_excess),
        J_local=J_local,
        J_excess=mu2 * center_excess,
        J_consensus=float(J_local.sum() - xbar0 @ sol.X_alpha @ xbar0),
        extra={
            "xbar0": xbar0,
            "hard_excess": mu2 * hard_excess,
            "penalty": penalty,
            "solution": sol,
        },
    )
    return report, sigma, mu2 * saving


def equivalence_as_hard(plant, cost, soft, tol=DEFAULT_TOL):
    """Hard-constraint gain that reproduces the soft optimum."""
    sol = solve_soft(plant, cost, soft, tol)
    if not numkit.is_hurwitz(sol.A_lambda, tol):
        raise InternalConsistencyError("soft closed loop is not Hurwitz")
    return HardSpec(sol.F_center)


def sweep_lambda(plant, cost, weights, Fbar, grid, x0s, tol=DEFAULT_TOL):
    """Trade-off curve over ``grid`` (values in ``[0, 1)``)."""
    points = []
    for lam in grid:
        lam = float(lam)
        if not 0.0 <= lam < 1.0:
            raise SweepError(lam, "grid values must lie in [0, 1)")
        try:
            report, sigma, alphas = soft_cost_report(
                plant, cost, weights, SoftSpec(Fbar, lam), x0s, tol
            )
        except CoordLQRError as exc:
            raise SweepError(lam, exc) from exc
        points.append(TradeoffPoint(lam, sigma, report.J_excess, alphas))
    return points
