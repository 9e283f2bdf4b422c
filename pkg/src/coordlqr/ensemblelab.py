"""Aggregate ensemble: Kronecker-structured problem, brute-force oracle, simulation.

The oracle solves the coordinated problem directly on the ``nu*n`` aggregate
state by eliminating the constraint, without using the structured solution,
so it can serve as an independent check of it.

Noise uses NumPy's ``Generator(PCG64(seed))`` with ``standard_normal``
increments scaled by ``sqrt(intensity * dt)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import numkit
from .coordsynth import GainDecomposition, _initial_states
from .exceptions import DimensionMismatch, TooLarge, UnstableClosedLoop, ValidationError
from .freqcoord import WeightedController
from .numkit import DEFAULT_TOL, as_matrix, as_vector

log = logging.getLogger(__name__)

__all__ = [
    "AggregateProblem",
    "TransformReport",
    "OracleResult",
    "Trajectory",
    "EmpiricalCost",
    "build_aggregate",
    "transform_check",
    "oracle_constrained_cost",
    "closed_loop",
    "simulate",
    "empirical_cost",
    "default_horizon",
    "figure_eight",
]

WARN_SIZE = 2000
MAX_SIZE = 10000
ORACLE_MAX_SIZE = 60


@dataclass(frozen=True)
class AggregateProblem:
    A_agg: np.ndarray
    B_agg: np.ndarray
    Q_agg: np.ndarray
    C_u: np.ndarray
    C_x: np.ndarray
    nu: int
    n: int
    m: int


def build_aggregate(plant, cost, weights, Fbar):
    """Aggregate matrices ``I (x) A``, ``I (x) B``, ``I (x) Q`` and the
    constraint ``(mu' (x) I) u - (mu' (x) Fbar) x = 0``."""
    n, m, nu = plant.n, plant.m, weights.nu
    Fbar = as_matrix(Fbar, "Fbar", rows=m, cols=n)
    size = nu * n
    if size > MAX_SIZE:
        raise TooLarge(f"aggregate state dimension {size} exceeds {MAX_SIZE}")
    if size > WARN_SIZE:
        log.warning("aggregate state dimension %d is large", size)
    I = np.eye(nu)
    mu = weights.mu.reshape(1, -1)
    return AggregateProblem(
        A_agg=np.kron(I, plant.A),
        B_agg=np.kron(I, plant.B),
        Q_agg=np.kron(I, cost.Q),
        C_u=np.kron(mu, np.eye(m)),
        C_x=np.kron(mu, Fbar),
        nu=nu,
        n=n,
        m=m,
    )


@dataclass(frozen=True)
class TransformReport:
    constraint_residual: float
    structure_residual: float
    center_residual: float

    def ok(self, atol=1e-10):
        return max(self.constraint_residual, self.structure_residual, self.center_residual) <= atol


def transform_check(agg, weights, x=None, tol=DEFAULT_TOL):
    """Verify that ``U (x) I`` with ``U mu = e1`` confines the constraint to
    the first block and keeps the aggregate block diagonal.

    ``x`` is an aggregate state used to check that the first transformed
    block equals the center of mass (random if omitted).
    """
    n, m, nu = agg.n, agg.m, agg.nu
    U = numkit.decoupling_unitary(weights.mu, tol)
    Tx = np.kron(U, np.eye(n))
    Tu = np.kron(U, np.eye(m))
    Cu_t = agg.C_u @ Tu.T
    Cx_t = agg.C_x @ Tx.T
    constraint = max(
        np.abs(Cu_t[:, m:]).max(initial=0.0),
        np.abs(Cx_t[:, n:]).max(initial=0.0),
        np.abs(Cu_t[:, :m] - np.eye(m)).max(),
    )
    structure = max(
        np.abs(Tx @ agg.A_agg @ Tx.T - agg.A_agg).max(),
        np.abs(Tx @ agg.B_agg @ Tu.T - agg.B_agg).max(),
        np.abs(Tx @ agg.Q_agg @ Tx.T - agg.Q_agg).max(),
    )
    if x is None:
        x = np.random.default_rng(0).standard_normal(nu * n)
    x = as_vector(x, "x", nu * n)
    xbar = weights.mu @ x.reshape(nu, n)
    center = np.abs((Tx @ x)[:n] - xbar).max()
    return TransformReport(float(constraint), float(structure), float(center))


@dataclass(frozen=True)
class OracleResult:
    J: float
    gain: np.ndarray
    X: np.ndarray


def oracle_constrained_cost(plant, cost, weights, Fbar, x0s, agent_weights=None, tol=DEFAULT_TOL):
    """Brute-force solution of the coordinated problem on the aggregate.

    Every admissible input is ``u = (mu mu' (x) Fbar) x + N w`` with ``N`` an
    orthonormal basis of the kernel of ``mu' (x) I``. Substituting gives an
    unconstrained LQR in ``w`` with a state-input cross term, solved with the
    general Riccati solver.

    ``agent_weights`` (positive, length ``nu``) turns the objective into
    ``sum lambda_i J_i``.
    """
    n, m, nu = plant.n, plant.m, weights.nu
    if nu * n > ORACLE_MAX_SIZE:
        raise TooLarge(f"oracle limited to nu*n <= {ORACLE_MAX_SIZE}")
    agg = build_aggregate(plant, cost, weights, Fbar)
    X0 = _initial_states(x0s, weights, n)
    lam = np.ones(nu) if agent_weights is None else as_vector(agent_weights, "agent_weights", nu)
    if np.any(lam <= 0):
        raise ValidationError("agent weights must be positive")
    Q_agg = np.kron(np.diag(lam), cost.Q)
    R_agg = np.kron(np.diag(lam), np.eye(m))

    # complete orthogonal basis of range(mu (x) I_m); the trailing columns span its complement
    Qfull, _ = np.linalg.qr(agg.C_u.T, mode="complete")
    N = Qfull[:, m:]
    P = agg.C_u.T @ agg.C_x

    A_r = agg.A_agg + agg.B_agg @ P
    B_r = agg.B_agg @ N
    Q_r = Q_agg + P.T @ R_agg @ P
    S_r = P.T @ R_agg @ N
    R_r = N.T @ R_agg @ N
    X = numkit.solve_care(A_r, B_r, Q_r, R_r, S_r, tol)
    K_w = -np.linalg.solve(R_r, B_r.T @ X + S_r.T)
    gain = P + N @ K_w
    x0 = X0.reshape(-1)
    return OracleResult(float(x0 @ X @ x0), gain, X)


def figure_eight(t):
    """Reference ``(sin 4 pi t, 0.25 sin 8 pi t)``."""
    t = np.asarray(t, dtype=float)
    return np.stack([np.sin(4 * np.pi * t), 0.25 * np.sin(8 * np.pi * t)], axis=-1)


def closed_loop(plant, controller):
    """Aggregate closed loop ``z' = A_cl z + B_r r`` and input map ``u = K z + L r``.

    ``z`` stacks the agent states (and the controller state for dynamic
    controllers, last).
    """
    n, m = plant.n, plant.m
    if isinstance(controller, GainDecomposition):
        nu = controller.weights.nu
        if controller.F_alpha.shape != (m, n):
            raise DimensionMismatch("controller gain does not match plant")
        K = controller.materialize()
        p = 0
    elif isinstance(controller, WeightedController):
        nu = controller.weights.nu
        p = controller.p
        mu = controller.mu.reshape(-1, 1)
        Pc = np.kron(mu.T, np.eye(n))  # xbar = Pc x
        Kx = np.kron(np.eye(nu), controller.F_alpha) + np.kron(
            mu, (controller.Fbar - controller.F_alpha + controller.D_c)
        ) @ Pc
        K = np.hstack([Kx, np.kron(mu, controller.C_c)])
    else:
        raise TypeError(f"unsupported controller {type(controller).__name__}")
    B_agg = np.kron(np.eye(nu), plant.B)
    L = np.kron(controller.mu.reshape(-1, 1), np.eye(m))
    A_top = np.hstack([np.kron(np.eye(nu), plant.A), np.zeros((nu * n, p))]) + B_agg @ K
    if p:
        Pc = np.kron(controller.mu.reshape(1, -1), np.eye(n))
        A_bot = np.hstack([controller.B_c @ Pc, controller.A_c])
        A_cl = np.vstack([A_top, A_bot])
        B_r = np.vstack([B_agg @ L, np.zeros((p, m))])
    else:
        A_cl, B_r = A_top, B_agg @ L
    return A_cl, B_r, K, L, nu, p


@dataclass(frozen=True)
class Trajectory:
    """Sampled ensemble trajectory.

    ``states`` is ``(K, nu, n)``, ``inputs`` is ``(K, nu, m)``,
    ``center_x``/``center_u`` hold the mass-weighted sums and ``reference``
    the center input offset ``r`` (or ``None``).
    """

    times: np.ndarray
    states: np.ndarray
    inputs: np.ndarray
    center_x: np.ndarray
    center_u: np.ndarray
    reference: np.ndarray | None
    mu: np.ndarray
    controller_states: np.ndarray | None = None
    A_cl: np.ndarray | None = None
    K: np.ndarray | None = None
    noisy: bool = False

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

    def center_residual(self):
        return max(
            np.abs(np.einsum("i,kin->kn", self.mu, self.states) - self.center_x).max(),
            np.abs(np.einsum("i,kim->km", self.mu, self.inputs) - self.center_u).max(),
        )


def default_horizon(A_cl, decay=1e-8, cap=1e4):
    """Time for the slowest mode to decay by ``decay``."""
    a = numkit.spectral_abscissa(A_cl)
    if not a < 0:
        raise UnstableClosedLoop("closed loop not Hurwitz", eigenvalue=a)
    return float(min(np.log(decay) / a, cap))


def _reference_samples(reference, times, m):
    if reference is None:
        return None
    if callable(reference):
        R = np.asarray([np.atleast_1d(reference(t)) for t in times], dtype=float)
    else:
        R = np.asarray(reference, dtype=float)
        if R.ndim == 1 and R.size == m:
            R = np.tile(R, (times.size, 1))
    R = R.reshape(times.size, m)
    if not np.all(np.isfinite(R)):
        raise ValidationError("reference has non-finite samples")
    return R


def simulate(
    plant,
    controller,
    x0s,
    T,
    dt,
    reference=None,
    noise=None,
    require_stable=False,
    tol=DEFAULT_TOL,
):
    """Simulate the ensemble under a static or dynamic coordinated controller.

    Parameters
    ----------
    reference : callable, array or None
        Center input offset ``r(t)`` (held constant over each step).
    noise : dict, optional
        ``{"intensity": float or per-agent array, "seed": int, "input": n x k}``.
        The disturbance enters through ``input`` (default ``B``).
    require_stable : bool
        Raise :class:`UnstableClosedLoop` if the loop is not Hurwitz.

    Noise-free steps use the exact discretization ``expm`` of the closed loop
    augmented with the held reference.
    """
    if not dt > 0 or not T >= dt:
        raise ValidationError("need dt > 0 and T >= dt")
    n, m = plant.n, plant.m
    A_cl, B_r, K, L, nu, p = closed_loop(plant, controller)
    if require_stable and not numkit.is_hurwitz(A_cl, tol):
        raise UnstableClosedLoop(
            "closed loop not Hurwitz", eigenvalue=numkit.spectral_abscissa(A_cl)
        )
    X0 = _initial_states(x0s, controller.weights, n)
    steps = int(round(T / dt))
    times = dt * np.arange(steps + 1)
    R = _reference_samples(reference, times, m)

    N = A_cl.shape[0]
    M = np.zeros((N + m, N + m))
    M[:N, :N] = A_cl
    M[:N, N:] = B_r
    E = numkit.expm(M, dt)
    Phi, Gam = E[:N, :N], E[:N, N:]

    G = None
    if noise:
        rng = np.random.Generator(np.random.PCG64(noise.get("seed", 0)))
        Bw = as_matrix(noise.get("input", plant.B), "noise input", rows=n)
        k = Bw.shape[1]
        intensity = np.broadcast_to(np.asarray(noise.get("intensity", 1.0), float), (nu,))
        G = np.zeros((N, nu * k))
        for i in range(nu):
            G[i * n:(i + 1) * n, i * k:(i + 1) * k] = np.sqrt(intensity[i] * dt) * Bw

    Z = np.zeros((steps + 1, N))
    Z[0, : nu * n] = X0.reshape(-1)
    for s in range(steps):
        z = Phi @ Z[s]
        if R is not None:
            z += Gam @ R[s]
        if G is not None:
            z += G @ rng.standard_normal(G.shape[1])
        Z[s + 1] = z

    U = Z @ K.T
    if R is not None:
        U += R @ L.T
    states = Z[:, : nu * n].reshape(-1, nu, n)
    inputs = U.reshape(-1, nu, m)
    mu = controller.mu
    return Trajectory(
        times=times,
        states=states,
        inputs=inputs,
        center_x=np.einsum("i,kin->kn", mu, states),
        center_u=np.einsum("i,kim->km", mu, inputs),
        reference=R,
        mu=np.array(mu),
        controller_states=Z[:, nu * n:] if p else None,
        A_cl=A_cl,
        K=K,
        noisy=bool(noise),
    )


@dataclass(frozen=True)
class EmpiricalCost:
    per_agent: np.ndarray
    total: float
    tail_bound: float | None


def empirical_cost(traj, cost):
    """Trapezoidal ``int x'Qx + u'u dt`` per agent.

    ``tail_bound`` is the remaining infinite-horizon cost from the final
    state, ``z_T' P z_T`` with ``P`` the closed-loop cost Gramian.
    """
    Q = np.asarray(cost.Q)
    integrand = np.einsum("kin,nj,kij->ki", traj.states, Q, traj.states) + np.einsum(
        "kim,kim->ki", traj.inputs, traj.inputs
    )
    per_agent = np.trapezoid(integrand, traj.times, axis=0)
    tail = None
    if traj.A_cl is not None and traj.reference is None and not traj.noisy:
        nu = traj.states.shape[1]
        p = traj.A_cl.shape[0] - traj.states.shape[1] * traj.states.shape[2]
        W = traj.K.T @ traj.K
        W[: nu * Q.shape[0], : nu * Q.shape[0]] += np.kron(np.eye(nu), Q)
        if numkit.is_hurwitz(traj.A_cl):
            P = numkit.solve_lyapunov(traj.A_cl, W)
            zT = traj.states[-1].reshape(-1)
            if p:
                zT = np.concatenate([zT, traj.controller_states[-1]])
            tail = float(zT @ P @ zT)
    return EmpiricalCost(per_agent, float(per_agent.sum()), tail)
