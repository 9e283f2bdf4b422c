import numpy as np
import pytest
import scipy.linalg as sla

from coordlqr import numkit
from coordlqr.coordsynth import CostSpec, Plant, Weights, normalize


def random_instance(rng, n, m, nu, uniform=False):
    """Random admissible coordination problem.

    ``Fbar`` is an LQR gain for an unrelated weight (from scipy, so the
    instance does not depend on the code under test) plus a perturbation,
    shrunk until ``A + B Fbar`` is Hurwitz.
    """
    while True:
        A = rng.standard_normal((n, n))
        B = rng.standard_normal((n, m))
        if not numkit.is_stabilizable(A, B) or np.linalg.svd(B, compute_uv=False)[-1] <= 0.1:
            continue
        W = np.diag(rng.uniform(0.5, 20.0, n))
        P = sla.solve_continuous_are(A, B, W, np.eye(m))
        Fbar = -B.T @ P
        if np.max(np.linalg.eigvals(A + B @ Fbar).real) < -0.1:
            break
    C = rng.standard_normal((n, n))
    Q = C.T @ C + 0.1 * np.eye(n)
    scale = 0.2
    while True:
        cand = Fbar + scale * rng.standard_normal((m, n))
        if np.max(np.linalg.eigvals(A + B @ cand).real) < -0.05:
            Fbar = cand
            break
        scale *= 0.7
    if uniform:
        weights = Weights.uniform(nu)
    else:
        mu = rng.standard_normal(nu)
        mu = np.where(np.abs(mu) < 0.2, 0.2 * np.sign(mu) + 0.01, mu)
        weights = Weights(normalize(mu))
    x0s = rng.standard_normal((nu, n))
    return Plant(A, B), CostSpec(Q), weights, Fbar, x0s


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def scalar_axis():
    """One axis of the tadpole: A = 0, B = 1, Q = 1, Fbar = -25."""
    return Plant([[0.0]], [[1.0]]), CostSpec([[1.0]]), np.array([[-25.0]])
