"""Frequency-weighted soft coordination.

The mismatch ``ubar - Fbar xbar`` is passed through a weight
``W(s) = D + C (sI - A_phi)^-1 B_phi`` and its output energy is penalized.
The center of mass together with the weight state forms an augmented LQR
with cross terms; its gain ``[F_s1, F_s2]`` yields the dynamic law

    u_i = F_alpha x_i + mu_i (Fbar - F_alpha) xbar + mu_i ubar_phi,
    ubar_phi = M_phi (F_s2 - Fbar) xbar,  M_phi(s) = I + F_s1 (sI - A_phi - B_phi F_s1)^-1 B_phi.

Weights with imaginary-axis poles (integrators) are allowed and enforce the
hard constraint at those frequencies.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import numkit
from .coordsynth import (
    HardSpec,
    _initial_states,
    center_value,
    check_assumptions,
    local_gain,
)
from .exceptions import (
    CoordLQRError,
    DimensionMismatch,
    InternalConsistencyError,
    NotMinimalWeight,
    SweepError,
    ValidationError,
)
from .numkit import DEFAULT_TOL, as_matrix

__all__ = [
    "WeightFilter",
    "AugmentedSynthesis",
    "WeightedController",
    "WeightedPoint",
    "augment",
    "synthesize_weighted",
    "weighted_controller",
    "weighted_energies",
    "sweep_weighted",
    "static_family",
    "integrator_family",
]


@dataclass(frozen=True)
class WeightFilter:
    """State-space weight ``(A_phi, B_phi, C_phi, D_phi)``; ``p`` may be 0."""

    Aphi: np.ndarray
    Bphi: np.ndarray
    Cphi: np.ndarray
    Dphi: np.ndarray

    def __post_init__(self):
        D = as_matrix(self.Dphi, "Dphi")
        q, m = D.shape
        A = np.asarray(self.Aphi, dtype=float)
        p = 0 if A.size == 0 else as_matrix(A, "Aphi", square=True).shape[0]
        A = as_matrix(A, "Aphi").reshape(p, p)
        B = as_matrix(np.asarray(self.Bphi, dtype=float).reshape(p, m), "Bphi")
        C = as_matrix(np.asarray(self.Cphi, dtype=float).reshape(q, p), "Cphi")
        for name, val in (("Aphi", A), ("Bphi", B), ("Cphi", C), ("Dphi", D)):
            object.__setattr__(self, name, val)

    @classmethod
    def static(cls, D):
        D = as_matrix(D, "D")
        return cls(np.zeros((0, 0)), np.zeros((0, D.shape[1])), np.zeros((D.shape[0], 0)), D)

    @classmethod
    def zero(cls, m):
        return cls.static(np.zeros((m, m)))

    @classmethod
    def integrator(cls, gain, m=1):
        """``W(s) = gain / s`` on each of ``m`` channels."""
        if gain == 0.0:
            return cls.zero(m)
        return cls(np.zeros((m, m)), np.eye(m), gain * np.eye(m), np.zeros((m, m)))

    @property
    def p(self):
        return self.Aphi.shape[0]

    @property
    def m(self):
        return self.Dphi.shape[1]

    def is_minimal(self, tol=DEFAULT_TOL):
        if self.p == 0:
            return True
        return numkit.is_controllable(self.Aphi, self.Bphi, tol) and numkit.is_observable(
            self.Cphi, self.Aphi, tol
        )

    def evaluate(self, s):
        """Frequency response ``W(s)`` at a complex point."""
        if self.p == 0:
            return self.Dphi.astype(complex)
        return self.Dphi + self.Cphi @ np.linalg.solve(s * np.eye(self.p) - self.Aphi, self.Bphi)


def static_family(m=1):
    """``lam -> sqrt(lam/(1-lam)) I``; reproduces the plain soft constraint."""
    return lambda lam: WeightFilter.static(np.sqrt(lam / (1.0 - lam)) * np.eye(m))


def integrator_family(m=1):
    """``lam -> sqrt(lam/(1-lam)) / s``; zero mismatch at DC for every ``lam > 0``."""
    return lambda lam: WeightFilter.integrator(np.sqrt(lam / (1.0 - lam)), m)


@dataclass(frozen=True)
class StateSpace:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def evaluate(self, s):
        p = self.A.shape[0]
        if p == 0:
            return self.D.astype(complex)
        return self.D + self.C @ np.linalg.solve(s * np.eye(p) - self.A, self.B)

    def zeros(self):
        """Transmission zeros for square systems with invertible ``D``."""
        if self.A.shape[0] == 0:
            return np.zeros(0, dtype=complex)
        return np.linalg.eigvals(self.A - self.B @ np.linalg.solve(self.D, self.C))


@dataclass(frozen=True)
class AugmentedSynthesis:
    """Solution of the augmented (weight + center of mass) LQR.

    ``omega_sigma`` is the cutoff ``-(A_phi + B_phi F_s1)`` of ``M_phi``;
    set only for scalar filters (``p == m == 1``).
    """

    X_sigma: np.ndarray
    F_sigma1: np.ndarray
    F_sigma2: np.ndarray
    M_phi: StateSpace
    omega_sigma: float | None
    A_sigma: np.ndarray
    B_sigma: np.ndarray
    Fbar: np.ndarray
    F_alpha: np.ndarray
    X_alpha: np.ndarray
    Xbar: np.ndarray
    weight: WeightFilter

    @property
    def p(self):
        return self.weight.p

    @property
    def F_sigma(self):
        return np.hstack([self.F_sigma1, self.F_sigma2])

    @property
    def X_sigma22(self):
        p = self.p
        return self.X_sigma[p:, p:]

    @property
    def closed_loop(self):
        return self.A_sigma + self.B_sigma @ self.F_sigma


def augment(plant, cost, Fbar, w):
    """Augmented realization ``(A_s, B_s, C_s, D_s)`` with state ``[x_phi; xbar]``."""
    n, m = plant.n, plant.m
    Fbar = as_matrix(Fbar, "Fbar", rows=m, cols=n)
    if w.m != m:
        raise DimensionMismatch(f"weight has {w.m} inputs, plant has {m}")
    p, q = w.p, w.Dphi.shape[0]
    A_s = np.block([[w.Aphi, -w.Bphi @ Fbar], [np.zeros((n, p)), plant.A]])
    B_s = np.vstack([w.Bphi, plant.B])
    C_s = np.block(
        [
            [w.Cphi, -w.Dphi @ Fbar],
            [np.zeros((n, p)), numkit.psd_sqrt(cost.Q)],
            [np.zeros((m, p + n))],
        ]
    )
    D_s = np.vstack([w.Dphi, np.zeros((n, m)), np.eye(m)])
    assert C_s.shape == (q + n + m, p + n)
    return A_s, B_s, C_s, D_s


def synthesize_weighted(plant, cost, weights, Fbar, w, tol=DEFAULT_TOL):
    """Solve the augmented Riccati equation and build ``M_phi``.

    ``weights`` is accepted for symmetry with the hard and soft paths; the
    synthesis itself does not depend on the masses.
    """
    del weights
    n, m = plant.n, plant.m
    Fbar = as_matrix(Fbar, "Fbar", rows=m, cols=n)
    check_assumptions(plant, cost, tol)
    if not w.is_minimal(tol):
        if w.p and numkit.is_stabilizable(w.Aphi, w.Bphi, tol):
            warnings.warn("weight realization is not minimal; proceeding", stacklevel=2)
        else:
            raise NotMinimalWeight("weight realization is not minimal")
    hard = HardSpec(Fbar)
    X_alpha, F_alpha = local_gain(plant, cost, tol)
    Xbar = center_value(plant, cost, hard, tol)

    A_s, B_s, C_s, D_s = augment(plant, cost, Fbar, w)
    p = w.p
    Q_s = C_s.T @ C_s
    Q_s[p:, p:] = cost.Q + (w.Dphi @ Fbar).T @ (w.Dphi @ Fbar)
    R_s = D_s.T @ D_s
    S_s = C_s.T @ D_s
    X_s = numkit.solve_care(A_s, B_s, Q_s, R_s, S_s, tol)
    F_s = -np.linalg.solve(R_s, B_s.T @ X_s + S_s.T)
    F1, F2 = F_s[:, :p], F_s[:, p:]

    M = StateSpace(w.Aphi + w.Bphi @ F1, w.Bphi, F1, np.eye(m))
    omega = None
    if p == 1 and m == 1:
        omega = float(-(w.Aphi + w.Bphi @ F1)[0, 0])

    synth = AugmentedSynthesis(
        X_s, F1, F2, M, omega, A_s, B_s, Fbar, F_alpha, X_alpha, Xbar, w
    )
    X22 = synth.X_sigma22
    slack = tol.psd_slack * (1.0 + np.linalg.norm(Xbar))
    if numkit.min_eig(X22 - X_alpha) < -slack or numkit.min_eig(Xbar - X22) < -slack:
        raise InternalConsistencyError("X_sigma22 violates X_alpha <= X_sigma22 <= Xbar")
    return synth


@dataclass(frozen=True)
class WeightedController:
    """Dynamic coordinated controller.

    Internal state ``x_phi`` (dimension ``p``) driven by ``xbar``::

        x_phi' = A_c x_phi + B_c xbar
        ubar_phi = C_c x_phi + D_c xbar
        u_i = F_alpha x_i + mu_i ((Fbar - F_alpha) xbar + ubar_phi + r)
    """

    F_alpha: np.ndarray
    Fbar: np.ndarray
    weights: object
    A_c: np.ndarray
    B_c: np.ndarray
    C_c: np.ndarray
    D_c: np.ndarray

    @property
    def p(self):
        return self.A_c.shape[0]

    @property
    def mu(self):
        return self.weights.mu

    def filter_output(self, x_phi, xbar):
        return self.C_c @ x_phi + self.D_c @ xbar

    def filter_derivative(self, x_phi, xbar):
        return self.A_c @ x_phi + self.B_c @ xbar

    def controls(self, X, x_phi, r=None):
        X = np.asarray(X, dtype=float)
        xbar = self.mu @ X
        center = (self.Fbar - self.F_alpha) @ xbar + self.filter_output(x_phi, xbar)
        if r is not None:
            center = center + r
        return X @ self.F_alpha.T + np.outer(self.mu, center)

    def center_loop(self, plant):
        """Closed-loop matrix of ``[x_phi; xbar]``."""
        A_cl = plant.A + plant.B @ (self.Fbar + self.D_c)
        return np.block([[self.A_c, self.B_c], [plant.B @ self.C_c, A_cl]])


def weighted_controller(synth, weights):
    D_c = synth.F_sigma2 - synth.Fbar
    return WeightedController(
        F_alpha=synth.F_alpha,
        Fbar=synth.Fbar,
        weights=weights,
        A_c=synth.M_phi.A,
        B_c=synth.M_phi.B @ D_c,
        C_c=synth.M_phi.C,
        D_c=D_c,
    )


def _block22_gramian(synth, out_map, tol):
    A_cl = synth.closed_loop
    X = numkit.solve_lyapunov(A_cl, out_map.T @ out_map, tol)
    p = synth.p
    return X[p:, p:]


def weighted_energies(synth, plant, cost, Fbar, weights, x0s, tol=DEFAULT_TOL):
    """Mismatch energy and per-agent coordination cost under the weighted law.

    Returns ``(mismatch, per_agent_excess, X_phi22, X_v22)``.
    """
    del cost
    n, m = plant.n, plant.m
    Fbar = as_matrix(Fbar, "Fbar", rows=m, cols=n)
    p = synth.p
    E2t = np.hstack([np.zeros((n, p)), np.eye(n)])
    F_s = synth.F_sigma
    X_phi22 = _block22_gramian(synth, F_s - Fbar @ E2t, tol)
    X_v22 = _block22_gramian(synth, F_s - synth.F_alpha @ E2t, tol)
    X0 = _initial_states(x0s, weights, n)
    xbar0 = weights.mu @ X0
    mismatch = float(xbar0 @ X_phi22 @ xbar0)
    excess = weights.mu**2 * float(xbar0 @ X_v22 @ xbar0)
    return mismatch, excess, X_phi22, X_v22


@dataclass(frozen=True)
class WeightedPoint:
    lam: float
    mismatch: float
    excess: np.ndarray
    omega_sigma: float | None


def sweep_weighted(
    plant,
    cost,
    weights,
    Fbar,
    family: str | Callable[[float], WeightFilter],
    grid,
    x0s,
    tol=DEFAULT_TOL,
):
    """Trade-off table for a one-parameter weight family.

    ``family`` is ``"static"``, ``"integrator"`` or a callable returning a
    :class:`WeightFilter` for each ``lam``.
    """
    if family == "static":
        make = static_family(plant.m)
    elif family == "integrator":
        make = integrator_family(plant.m)
    elif callable(family):
        make = family
    else:
        raise ValidationError(f"unknown weight family {family!r}")
    rows = []
    for lam in grid:
        lam = float(lam)
        if not 0.0 <= lam < 1.0:
            raise SweepError(lam, "grid values must lie in [0, 1)")
        try:
            synth = synthesize_weighted(plant, cost, weights, Fbar, make(lam), tol)
            mismatch, excess, _, _ = weighted_energies(synth, plant, cost, Fbar, weights, x0s, tol)
        except CoordLQRError as exc:
            raise SweepError(lam, exc) from exc
        rows.append(WeightedPoint(lam, mismatch, excess, synth.omega_sigma))
    return rows
