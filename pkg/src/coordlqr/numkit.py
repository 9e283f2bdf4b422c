"""Dense linear algebra and matrix equation solvers.

Everything here works on plain 2-D ``numpy`` float arrays. Eigenvalues come
from LAPACK (Hessenberg reduction followed by shifted QR); the Riccati solver
deflates the stable invariant subspace of the Hamiltonian matrix through an
ordered real Schur form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .exceptions import (
    DimensionMismatch,
    NoStabilizingSolution,
    NonFiniteInput,
    NotHurwitz,
    NotUnitNorm,
    ValidationError,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "as_matrix",
    "as_vector",
    "symmetrize",
    "solve_care",
    "care_residual",
    "solve_lyapunov",
    "lyapunov_residual",
    "decoupling_unitary",
    "is_hurwitz",
    "spectral_abscissa",
    "pbh_no_imaginary_unobservable",
    "is_stabilizable",
    "is_controllable",
    "is_observable",
    "psd_sqrt",
    "min_eig",
    "kron",
    "expm",
    "numerical_rank",
]


@dataclass(frozen=True)
class Tolerances:
    residual_rel: float = 1e-9
    psd_slack: float = 1e-8
    hurwitz_margin: float = 1e-8
    rank_drop: float = 1e-10

    def __post_init__(self):
        for name in ("residual_rel", "psd_slack", "hurwitz_margin", "rank_drop"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"tolerance {name} must be strictly positive")


DEFAULT_TOL = Tolerances()


def as_matrix(M, name="matrix", rows=None, cols=None, square=False):
    """Coerce ``M`` to a finite 2-D float array and check its shape.

    Scalars become 1x1 and 1-D input becomes a column.
    """
    arr = np.asarray(M, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput(f"{name} has non-finite entries")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got {arr.shape}")
    if rows is not None and arr.shape[0] != rows:
        raise DimensionMismatch(f"{name} must have {rows} rows, got {arr.shape}")
    if cols is not None and arr.shape[1] != cols:
        raise DimensionMismatch(f"{name} must have {cols} columns, got {arr.shape}")
    return arr


def as_vector(v, name="vector", size=None):
    arr = np.asarray(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput(f"{name} has non-finite entries")
    if size is not None and arr.size != size:
        raise DimensionMismatch(f"{name} must have length {size}, got {arr.size}")
    return arr


def symmetrize(X):
    return 0.5 * (X + X.T)


def min_eig(S):
    """Smallest eigenvalue of the symmetric part of ``S``."""
    S = np.asarray(S, dtype=float)
    if S.size == 0:
        return np.inf
    return float(np.linalg.eigvalsh(symmetrize(S))[0])


def psd_sqrt(Q):
    """Symmetric square root of a PSD matrix (negative eigenvalues clipped)."""
    w, V = np.linalg.eigh(symmetrize(np.asarray(Q, dtype=float)))
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T


def kron(A, B):
    return np.kron(np.asarray(A, dtype=float), np.asarray(B, dtype=float))


def expm(A, t=1.0):
    """Matrix exponential ``e^{A t}`` (Pade scaling-and-squaring)."""
    A = as_matrix(A, "A", square=True)
    return sla.expm(A * float(t))


def numerical_rank(A, tol=DEFAULT_TOL):
    """Number of singular values above ``rank_drop * sigma_max``."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_drop * s[0]))


def spectral_abscissa(A):
    """Largest real part over the spectrum of ``A`` (``-inf`` when empty)."""
    A = as_matrix(A, "A", square=True)
    if A.shape[0] == 0:
        return -np.inf
    return float(np.max(np.linalg.eigvals(A).real))


def is_hurwitz(A, tol=DEFAULT_TOL):
    return spectral_abscissa(A) < -tol.hurwitz_margin


def _require_hurwitz(A, name, tol, exc=NotHurwitz):
    A = as_matrix(A, name, square=True)
    if A.shape[0] == 0:
        return
    ev = np.linalg.eigvals(A)
    k = int(np.argmax(ev.real))
    if not ev[k].real < -tol.hurwitz_margin:
        raise exc(f"{name} is not Hurwitz: eigenvalue {ev[k]:.6g}", eigenvalue=complex(ev[k]))


def _pbh_full_rank(M, tol):
    """Full column rank test on a stacked PBH matrix (complex allowed)."""
    s = np.linalg.svd(M, compute_uv=False)
    return s[-1] > tol.rank_drop * max(1.0, s[0])


def pbh_no_imaginary_unobservable(Q, A, tol=DEFAULT_TOL):
    """True iff ``(Q, A)`` has no unobservable modes on the imaginary axis."""
    A = as_matrix(A, "A", square=True)
    Q = as_matrix(Q, "Q", rows=A.shape[0], cols=A.shape[0])
    n = A.shape[0]
    C = psd_sqrt(Q)
    scale = max(1.0, np.linalg.norm(A, 2))
    for lam in np.linalg.eigvals(A):
        if abs(lam.real) > tol.hurwitz_margin * scale:
            continue
        M = np.vstack([A - lam * np.eye(n), C])
        s = np.linalg.svd(M, compute_uv=False)
        if not s[-1] > tol.rank_drop * scale:
            return False
    return True


def _pbh_input(A, B, tol, only_unstable):
    A = as_matrix(A, "A", square=True)
    n = A.shape[0]
    B = as_matrix(B, "B", rows=n)
    scale = max(1.0, np.linalg.norm(A, 2))
    for lam in np.linalg.eigvals(A):
        if only_unstable and lam.real < -tol.hurwitz_margin * scale:
            continue
        M = np.hstack([A - lam * np.eye(n), B])
        s = np.linalg.svd(M, compute_uv=False)
        if not s[n - 1] > tol.rank_drop * scale:
            return False
    return True


def is_stabilizable(A, B, tol=DEFAULT_TOL):
    """PBH test at every eigenvalue of ``A`` in the closed right half-plane."""
    return _pbh_input(A, B, tol, only_unstable=True)


def is_controllable(A, B, tol=DEFAULT_TOL):
    return _pbh_input(A, B, tol, only_unstable=False)


def is_observable(C, A, tol=DEFAULT_TOL):
    A = as_matrix(A, "A", square=True)
    C = as_matrix(C, "C", cols=A.shape[0])
    return _pbh_input(A.T, C.T, tol, only_unstable=False)


def _care_data(A, B, Q, R, S):
    A = as_matrix(A, "A", square=True)
    n = A.shape[0]
    B = as_matrix(B, "B", rows=n)
    m = B.shape[1]
    Q = as_matrix(Q, "Q", rows=n, cols=n)
    R = np.eye(m) if R is None else as_matrix(R, "R", rows=m, cols=m)
    S = np.zeros((n, m)) if S is None else as_matrix(S, "S", rows=n, cols=m)
    return A, B, symmetrize(Q), symmetrize(R), S


def care_residual(X, A, B, Q, R=None, S=None):
    """Frobenius norm of ``A'X + XA + Q - (XB+S) R^-1 (B'X+S')``."""
    A, B, Q, R, S = _care_data(A, B, Q, R, S)
    XBS = X @ B + S
    res = A.T @ X + X @ A + Q - XBS @ np.linalg.solve(R, XBS.T)
    return float(np.linalg.norm(res))


def _care_gain(X, B, R, S):
    return np.linalg.solve(R, B.T @ X + S.T)


def solve_care(A, B, Q, R=None, S=None, tol=DEFAULT_TOL):
    """Stabilizing solution of the continuous-time algebraic Riccati equation

        A'X + XA + Q - (XB + S) R^{-1} (B'X + S') = 0.

    The cross term is removed first (``A - B R^-1 S'``, ``Q - S R^-1 S'``),
    the stable invariant subspace ``[U1; U2]`` of the resulting Hamiltonian is
    extracted from an ordered real Schur form and ``X = U2 U1^-1``. Up to
    three Newton (Kleinman) steps then polish ``X``, each kept only while it
    lowers the residual.

    Raises
    ------
    NoStabilizingSolution
        The Hamiltonian has eigenvalues on the imaginary axis, the stable
        subspace is not a graph, or the result is not stabilizing.
    """
    A, B, Q, R, S = _care_data(A, B, Q, R, S)
    n, m = B.shape
    if n == 0:
        return np.zeros((0, 0))
    try:
        Rc = sla.cho_factor(R)
    except np.linalg.LinAlgError:
        raise ValidationError("R must be symmetric positive definite") from None

    RinvSt = sla.cho_solve(Rc, S.T)
    As = A - B @ RinvSt
    Qs = symmetrize(Q - S @ RinvSt)
    G = symmetrize(B @ sla.cho_solve(Rc, B.T))
    H = np.block([[As, -G], [-Qs, -As.T]])

    T, Z, sdim = sla.schur(H, output="real", sort="lhp")
    if sdim != n:
        raise NoStabilizingSolution(
            f"Hamiltonian has {2 * n - 2 * sdim} eigenvalues on or near the imaginary axis"
        )
    ev = np.linalg.eigvals(T[:n, :n])
    hnorm = max(1.0, np.linalg.norm(H, 1))
    if np.min(np.abs(ev.real)) <= 1e3 * np.finfo(float).eps * hnorm:
        raise NoStabilizingSolution("imaginary-axis eigenvalue in the Hamiltonian spectrum")

    U1 = Z[:n, :n]
    U2 = Z[n:, :n]
    if np.linalg.cond(U1) > 1.0 / (1e3 * np.finfo(float).eps):
        raise NoStabilizingSolution("stable invariant subspace is not a graph subspace")
    X = symmetrize(np.linalg.solve(U1.T, U2.T).T)

    bound = lambda X: tol.residual_rel * (1.0 + np.linalg.norm(X))
    res = care_residual(X, A, B, Q, R, S)
    for _ in range(3):
        K = _care_gain(X, B, R, S)
        Acl = A - B @ K
        W = Q - S @ K - K.T @ S.T + K.T @ R @ K
        try:
            X_new = symmetrize(sla.solve_continuous_lyapunov(Acl.T, -symmetrize(W)))
        except (np.linalg.LinAlgError, ValueError):
            break
        if not np.all(np.isfinite(X_new)):
            break
        res_new = care_residual(X_new, A, B, Q, R, S)
        if not res_new < res:
            break
        X, res = X_new, res_new

    if not np.all(np.isfinite(X)):
        raise NoStabilizingSolution("non-finite Riccati solution")
    res = care_residual(X, A, B, Q, R, S)
    if res > bound(X):
        raise NoStabilizingSolution(f"Riccati residual {res:.3e} exceeds {bound(X):.3e}")
    Acl = A - B @ _care_gain(X, B, R, S)
    if not is_hurwitz(Acl, tol):
        raise NoStabilizingSolution(
            f"closed loop not Hurwitz (abscissa {spectral_abscissa(Acl):.3e})"
        )
    return X


def lyapunov_residual(X, Acl, Q):
    return float(np.linalg.norm(Acl.T @ X + X @ Acl + Q))


def solve_lyapunov(Acl, Q, tol=DEFAULT_TOL):
    """Solve ``Acl' X + X Acl + Q = 0`` for Hurwitz ``Acl``.

    Bartels-Stewart through ``scipy.linalg.solve_continuous_lyapunov``; the
    result is symmetrized and its residual checked.
    """
    Acl = as_matrix(Acl, "Acl", square=True)
    n = Acl.shape[0]
    Q = symmetrize(as_matrix(Q, "Q", rows=n, cols=n))
    if n == 0:
        return np.zeros((0, 0))
    _require_hurwitz(Acl, "Acl", tol)
    X = symmetrize(sla.solve_continuous_lyapunov(Acl.T, -Q))
    res = lyapunov_residual(X, Acl, Q)
    if res > tol.residual_rel * (1.0 + np.linalg.norm(X)) * max(1.0, np.linalg.norm(Acl)):
        raise NoStabilizingSolution(f"Lyapunov residual {res:.3e} too large")
    return X


def decoupling_unitary(mu, tol=DEFAULT_TOL):
    """Symmetric orthogonal ``U`` with ``U @ mu = e1``.

    Householder reflector along ``v = mu - e1``. The first entry of ``v`` is
    formed as ``-sum(mu[1:]**2) / (1 + mu[0])`` when ``mu[0] > 0`` so that no
    cancellation occurs near ``mu = e1``; ``mu = e1`` itself gives ``I``.
    """
    mu = as_vector(mu, "mu")
    nu = mu.size
    if nu == 0:
        raise NotUnitNorm("mu is empty")
    norm = np.linalg.norm(mu)
    if abs(norm - 1.0) > tol.psd_slack:
        raise NotUnitNorm(f"||mu|| = {norm!r} is not 1")
    mu = mu / norm
    v = mu.copy()
    tail = float(mu[1:] @ mu[1:])
    v[0] = -tail / (1.0 + mu[0]) if mu[0] > 0 else mu[0] - 1.0
    vv = float(v @ v)
    if vv == 0.0:
        return np.eye(nu)
    return np.eye(nu) - (2.0 / vv) * np.outer(v, v)
