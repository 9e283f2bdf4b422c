"""Coordinated LQR with a hard constraint on the center of mass.

``nu`` identical agents ``x_i' = A x_i + B u_i`` each minimize
``int x_i' Q x_i + u_i' u_i`` while the center of mass
``xbar = sum mu_i x_i``, ``ubar = sum mu_i u_i`` must obey ``ubar = Fbar xbar``.
The optimal law is diagonal plus rank one::

    u_i = F_alpha x_i + mu_i (Fbar - F_alpha) xbar

and only needs one local Riccati equation and one Lyapunov equation,
whatever the number of agents.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .exceptions import (
    AssumptionViolated,
    DimensionMismatch,
    InternalConsistencyError,
    NonPositiveWeight,
    NotOrthonormal,
    NotStabilizable,
    NotUnitNorm,
    SingularDCGain,
    ValidationError,
)
from .numkit import DEFAULT_TOL, as_matrix, as_vector

__all__ = [
    "Plant",
    "CostSpec",
    "Weights",
    "HardSpec",
    "GainDecomposition",
    "CostReport",
    "WeightedRescaling",
    "normalize",
    "check_assumptions",
    "local_gain",
    "center_value",
    "synthesize_hard",
    "apply_control",
    "optimal_cost",
    "center_of_mass",
    "consensus_cost",
    "consensus_invariance_check",
    "partial_constraint",
    "dc_feedforward",
    "rescale_weighted",
]


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Plant:
    """Shared agent dynamics ``x' = A x + B u``."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A", square=True)
        B = as_matrix(self.B, "B", rows=A.shape[0])
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "B", _frozen(B))

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]


@dataclass(frozen=True)
class CostSpec:
    """Local state weight; the input weight is the identity."""

    Q: np.ndarray

    def __post_init__(self):
        Q = as_matrix(self.Q, "Q", square=True)
        if np.max(np.abs(Q - Q.T), initial=0.0) > 1e-12 * max(1.0, np.abs(Q).max(initial=0.0)):
            raise ValidationError("Q must be symmetric")
        if numkit.min_eig(Q) < -DEFAULT_TOL.psd_slack * max(1.0, np.abs(Q).max(initial=0.0)):
            raise ValidationError("Q must be positive semidefinite")
        object.__setattr__(self, "Q", _frozen(numkit.symmetrize(Q)))


def normalize(mu):
    """Scale ``mu`` to unit Euclidean norm."""
    mu = as_vector(mu, "mu")
    norm = np.linalg.norm(mu)
    if norm == 0.0:
        raise NotUnitNorm("mu is the zero vector")
    return mu / norm


@dataclass(frozen=True)
class Weights:
    """Agent masses ``mu`` with ``sum(mu**2) == 1`` and no zero entries.

    Inputs that are not normalized are rejected; use :func:`normalize`
    or :meth:`uniform`.
    """

    mu: np.ndarray

    def __post_init__(self):
        mu = as_vector(self.mu, "mu")
        if mu.size == 0:
            raise ValidationError("mu is empty")
        if abs(float(mu @ mu) - 1.0) > 1e-9:
            raise NotUnitNorm(f"sum(mu**2) = {float(mu @ mu)!r}, expected 1")
        if np.min(np.abs(mu)) <= 1e-12:
            raise ValidationError("masses must be nonzero")
        object.__setattr__(self, "mu", _frozen(mu))

    @classmethod
    def uniform(cls, nu):
        if nu < 1:
            raise ValidationError("nu must be positive")
        return cls(np.full(nu, 1.0 / np.sqrt(nu)))

    @property
    def nu(self):
        return self.mu.size

    def is_uniform(self, rtol=1e-12):
        return bool(np.allclose(self.mu, 1.0 / np.sqrt(self.nu), rtol=rtol, atol=0.0))


@dataclass(frozen=True)
class HardSpec:
    """Required center-of-mass gain; ``A + B Fbar`` must be Hurwitz."""

    Fbar: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Fbar", _frozen(as_matrix(self.Fbar, "Fbar")))

    def check(self, plant, tol=DEFAULT_TOL):
        Fbar = as_matrix(self.Fbar, "Fbar", rows=plant.m, cols=plant.n)
        numkit._require_hurwitz(plant.A + plant.B @ Fbar, "A + B Fbar", tol)


@dataclass(frozen=True)
class GainDecomposition:
    """Factored diagonal-plus-rank-one aggregate gain.

    The aggregate gain ``I (x) F_alpha + (mu mu') (x) (F_center - F_alpha)``
    is only formed by :meth:`materialize`; its size grows as ``nu**2``.
    """

    F_alpha: np.ndarray
    F_center: np.ndarray
    weights: Weights

    def __post_init__(self):
        Fa = as_matrix(self.F_alpha, "F_alpha")
        Fc = as_matrix(self.F_center, "F_center", rows=Fa.shape[0], cols=Fa.shape[1])
        object.__setattr__(self, "F_alpha", _frozen(Fa))
        object.__setattr__(self, "F_center", _frozen(Fc))

    @property
    def mu(self):
        return self.weights.mu

    @property
    def coordination_gain(self):
        return self.F_center - self.F_alpha

    def coordination_block(self):
        return np.kron(np.outer(self.mu, self.mu), self.coordination_gain)

    def materialize(self):
        nu = self.weights.nu
        return np.kron(np.eye(nu), self.F_alpha) + self.coordination_block()

    def control(self, i, x_i, xbar, r=None):
        return apply_control(self, i, x_i, xbar, r)

    def controls(self, X, r=None):
        """Inputs for all agents; ``X`` has shape ``(nu, n)``."""
        X = np.asarray(X, dtype=float)
        xbar = self.mu @ X
        U = X @ self.F_alpha.T + np.outer(self.mu, self.coordination_gain @ xbar)
        if r is not None:
            U = U + np.outer(self.mu, as_vector(r, "r", self.F_alpha.shape[0]))
        return U


@dataclass(frozen=True)
class CostReport:
    """Cost split: ``J_total = sum(J_local) + sum(J_excess)``.

    ``J_local[i]`` is the uncoordinated optimum ``x_i0' X_alpha x_i0`` and
    ``J_excess[i]`` the price agent ``i`` pays for coordination.
    """

    J_total: float
    J_local: np.ndarray
    J_excess: np.ndarray
    J_consensus: float
    extra: dict = field(default_factory=dict)

    @property
    def J_agents(self):
        return self.J_local + self.J_excess


def check_assumptions(plant, cost, tol=DEFAULT_TOL):
    """Raise unless ``(A, B)`` is stabilizable and ``(Q, A)`` has no
    unobservable imaginary-axis modes."""
    if cost.Q.shape != plant.A.shape:
        raise DimensionMismatch(f"Q has shape {cost.Q.shape}, A has {plant.A.shape}")
    if not numkit.is_stabilizable(plant.A, plant.B, tol):
        raise NotStabilizable("(A, B) is not stabilizable")
    if not numkit.pbh_no_imaginary_unobservable(cost.Q, plant.A, tol):
        raise AssumptionViolated("(Q, A) has an unobservable mode on the imaginary axis")


def local_gain(plant, cost, tol=DEFAULT_TOL):
    """Uncoordinated LQR: returns ``(X_alpha, F_alpha)`` with ``F_alpha = -B' X_alpha``."""
    check_assumptions(plant, cost, tol)
    X = numkit.solve_care(plant.A, plant.B, cost.Q, tol=tol)
    return X, -plant.B.T @ X


def center_value(plant, cost, hard, tol=DEFAULT_TOL):
    """Cost matrix of the center of mass under ``ubar = Fbar xbar``.

    Solves ``(A+B Fbar)' X + X (A+B Fbar) + Q + Fbar' Fbar = 0``.
    """
    hard.check(plant, tol)
    F = hard.Fbar
    return numkit.solve_lyapunov(plant.A + plant.B @ F, cost.Q + F.T @ F, tol)


def synthesize_hard(plant, cost, weights, hard, tol=DEFAULT_TOL):
    """Optimal coordinated gain for the hard constraint.

    Returns
    -------
    gd : GainDecomposition
    X_alpha, Xbar : ndarray
    """
    X_alpha, F_alpha = local_gain(plant, cost, tol)
    Xbar = center_value(plant, cost, hard, tol)
    gap = numkit.min_eig(Xbar - X_alpha)
    if gap < -tol.psd_slack * (1.0 + np.linalg.norm(Xbar)):
        raise InternalConsistencyError(f"Xbar - X_alpha has eigenvalue {gap:.3e} < 0")
    return GainDecomposition(F_alpha, hard.Fbar, weights), X_alpha, Xbar


def apply_control(gd, i, x_i, xbar, r=None):
    """``u_i = F_alpha x_i + mu_i (F_center - F_alpha) xbar + mu_i r``."""
    m, n = gd.F_alpha.shape
    if not 0 <= i < gd.weights.nu:
        raise DimensionMismatch(f"agent index {i} out of range")
    x_i = as_vector(x_i, "x_i", n)
    xbar = as_vector(xbar, "xbar", n)
    mu_i = gd.mu[i]
    u = gd.F_alpha @ x_i + mu_i * (gd.coordination_gain @ xbar)
    if r is not None:
        u = u + mu_i * as_vector(r, "r", m)
    return u


def _initial_states(x0s, weights, n):
    X0 = np.asarray(x0s, dtype=float)
    if X0.ndim == 1 and n == 1:
        X0 = X0.reshape(-1, 1)
    if X0.shape != (weights.nu, n):
        raise DimensionMismatch(f"x0s must have shape {(weights.nu, n)}, got {X0.shape}")
    if not np.all(np.isfinite(X0)):
        raise ValidationError("x0s has non-finite entries")
    return X0


def center_of_mass(x0s, weights):
    X0 = np.asarray(x0s, dtype=float)
    if X0.ndim == 1:
        X0 = X0.reshape(-1, 1)
    return weights.mu @ X0


def consensus_cost(X_alpha, x0s, weights, form="sum"):
    """Optimal cost of deviating from the normalized center of mass.

    ``form="sum"`` evaluates ``sum x_i0' X x_i0 - xbar0' X xbar0``;
    ``form="kron"`` evaluates ``x0' ((I - mu mu') (x) X) x0`` directly.
    """
    X_alpha = np.asarray(X_alpha, dtype=float)
    X0 = _initial_states(x0s, weights, X_alpha.shape[0])
    if form == "sum":
        xbar0 = weights.mu @ X0
        return float(np.einsum("ij,jk,ik->", X0, X_alpha, X0) - xbar0 @ X_alpha @ xbar0)
    if form == "kron":
        P = np.eye(weights.nu) - np.outer(weights.mu, weights.mu)
        x0 = X0.reshape(-1)
        return float(x0 @ np.kron(P, X_alpha) @ x0)
    raise ValueError(f"unknown form {form!r}")


def optimal_cost(X_alpha, Xbar, x0s, weights, tol=DEFAULT_TOL):
    """Per-agent and total optimal cost under the coordinated law.

    The center initial state is recomputed from ``x0s`` and ``weights``.
    """
    X_alpha = np.asarray(X_alpha, dtype=float)
    Xbar = np.asarray(Xbar, dtype=float)
    n = X_alpha.shape[0]
    if Xbar.shape != (n, n):
        raise DimensionMismatch("X_alpha and Xbar shapes differ")
    X0 = _initial_states(x0s, weights, n)
    xbar0 = weights.mu @ X0
    J_local = np.einsum("ij,jk,ik->i", X0, X_alpha, X0)
    center_excess = float(xbar0 @ (Xbar - X_alpha) @ xbar0)
    J_excess = weights.mu**2 * center_excess
    floor = -tol.psd_slack * (1.0 + float(xbar0 @ xbar0) * np.linalg.norm(Xbar))
    if np.min(J_excess, initial=0.0) < floor:
        raise InternalConsistencyError(f"negative coordination cost {J_excess.min():.3e}")
    return CostReport(
        J_total=float(J_local.sum() + center_excess),
        J_local=J_local,
        J_excess=J_excess,
        J_consensus=float(J_local.sum() - xbar0 @ X_alpha @ xbar0),
        extra={"xbar0": xbar0, "center_excess": center_excess},
    )


def consensus_invariance_check(plant, cost, weights, Fbar_a, Fbar_b, x0s, tol=DEFAULT_TOL):
    """Consensus cost under two center gains; both must come out equal."""
    out = []
    for Fbar in (Fbar_a, Fbar_b):
        _, X_alpha, Xbar = synthesize_hard(plant, cost, weights, HardSpec(Fbar), tol)
        out.append(optimal_cost(X_alpha, Xbar, x0s, weights, tol).J_consensus)
    Ja, Jb = out
    if abs(Ja - Jb) > 1e-10 * (1.0 + abs(Ja)):
        raise InternalConsistencyError(f"consensus costs differ: {Ja!r} vs {Jb!r}")
    return Ja, Jb


def partial_constraint(plant, cost, E, Fbar1, tol=DEFAULT_TOL):
    """Center gain equivalent to constraining only ``E' ubar = Fbar1 xbar``.

    ``E`` is ``m x k`` with orthonormal columns; the unconstrained directions
    of ``ubar`` are chosen optimally. Returns ``(Fbar, X2)`` where ``X2`` is
    the resulting center cost matrix.
    """
    m, n = plant.m, plant.n
    E = np.asarray(E, dtype=float).reshape(m, -1)
    k = E.shape[1]
    Fbar1 = np.asarray(Fbar1, dtype=float).reshape(k, n)
    if not np.allclose(E.T @ E, np.eye(k), atol=1e-10):
        raise NotOrthonormal("E'E must be the identity")
    check_assumptions(plant, cost, tol)
    P = np.eye(m) - E @ E.T
    A2 = plant.A + plant.B @ E @ Fbar1
    Q2 = cost.Q + Fbar1.T @ Fbar1
    B2 = plant.B @ P
    if numkit.numerical_rank(P, tol) == 0:
        numkit._require_hurwitz(A2, "A + B E Fbar1", tol)
        X2 = numkit.solve_lyapunov(A2, Q2, tol)
    else:
        if not numkit.is_stabilizable(A2, B2, tol):
            raise NotStabilizable("(A + B E Fbar1, B (I - E E')) is not stabilizable")
        X2 = numkit.solve_care(A2, B2, Q2, tol=tol)
    return E @ Fbar1 - P @ plant.B.T @ X2, X2


def dc_feedforward(plant, hard, weights, x_ref, tol=DEFAULT_TOL):
    """Constant center input ``r`` making the average agent state settle at ``x_ref``.

    ``r = sqrt(nu) T(0)^+ x_ref`` with ``T(s) = (sI - A - B Fbar)^-1 B``;
    requires uniform masses.
    """
    if not weights.is_uniform():
        raise AssumptionViolated("dc_feedforward needs uniform masses mu_i = 1/sqrt(nu)")
    hard.check(plant, tol)
    x_ref = as_vector(x_ref, "x_ref", plant.n)
    T0 = np.linalg.solve(-(plant.A + plant.B @ hard.Fbar), plant.B)
    s = np.linalg.svd(T0, compute_uv=False)
    if s.size == 0 or s[-1] <= tol.rank_drop * max(1.0, s[0]) or min(T0.shape) < plant.m:
        raise SingularDCGain("DC gain of the center loop is rank deficient")
    if T0.shape[0] == T0.shape[1]:
        r = np.linalg.solve(T0, x_ref)
    else:
        r = np.linalg.lstsq(T0, x_ref, rcond=None)[0]
    return np.sqrt(weights.nu) * r


@dataclass(frozen=True)
class WeightedRescaling:
    """Maps a ``sum lambda_i J_i`` problem onto an unweighted one.

    Agent signals are scaled by ``scale[i] = sqrt(lambda_i)`` and the
    masses replaced by ``weights``; ``center_ratio`` converts the scaled
    center of mass back (``xbar_scaled = center_ratio * xbar``).
    """

    weights: Weights
    scale: np.ndarray
    center_ratio: float

    def scale_states(self, x0s):
        X0 = np.asarray(x0s, dtype=float)
        return X0 * self.scale.reshape(-1, *([1] * (X0.ndim - 1)))

    def agent_gains(self, gd):
        """Per-agent coordination factors in the original signals.

        Returns ``c`` with ``u_i = F_alpha x_i + c[i] (F_center - F_alpha) xbar``.
        """
        return gd.mu * self.center_ratio / self.scale


def rescale_weighted(lambdas, weights):
    lambdas = as_vector(lambdas, "lambdas", weights.nu)
    if np.any(lambdas <= 0.0):
        raise NonPositiveWeight("agent cost weights must be positive")
    scale = np.sqrt(lambdas)
    raw = weights.mu / scale
    norm = np.linalg.norm(raw)
    return WeightedRescaling(Weights(raw / norm), scale, 1.0 / norm)
