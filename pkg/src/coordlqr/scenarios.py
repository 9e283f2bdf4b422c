"""Built-in scenario data: wind-farm turbine model and the tadpole swarm."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkit
from .coordsynth import CostSpec, Plant

__all__ = [
    "WIND_FARM_MATRIX",
    "WindFarmData",
    "WindFarmValidation",
    "wind_farm",
    "validate_wind_farm",
    "tadpole",
]

# [A | B_w | B_u] as published; columns 0-4 are A, 5 is B_w, 6 is B_u.
# States: pitch angle, rotor speed, internal controller state,
# nacelle fore-aft position, nacelle fore-aft speed.
WIND_FARM_MATRIX = (
    (0, 120, -0.92, 0, 0, 0, 0),
    (0.0084, -0.032, 0, 0, 0, 0.12, -0.021),
    (0, 150, -1.6, 0, 0, 0, 0),
    (0, 0, 0, 0, 1, 0, 0),
    (0.021, 0.054, 0, -4, -0.32, 0.2, 0),
)


@dataclass(frozen=True)
class WindFarmData:
    A: np.ndarray
    Bw: np.ndarray
    Bu: np.ndarray
    Cz: np.ndarray
    Dzu: np.ndarray
    variant: str

    @property
    def Q(self):
        return self.Cz.T @ self.Cz

    def plant(self):
        return Plant(self.A, self.Bu)

    def cost(self):
        return CostSpec(self.Q)


def wind_farm(variant="printed", A=None):
    """Single-turbine model.

    ``variant="printed"`` returns the matrices exactly as published; their
    ``A`` has an unstable real eigenvalue near +0.69. ``"sign-corrected"``
    flips the sign of the pitch-angle to rotor-speed coupling ``A[1, 0]``
    (pitching the blades should slow the rotor), which makes ``A`` Hurwitz.
    An explicit ``A`` overrides both.
    """
    M = np.array(WIND_FARM_MATRIX, dtype=float)
    A_ = M[:, :5].copy()
    if variant == "sign-corrected":
        A_[1, 0] = -A_[1, 0]
    elif variant != "printed":
        raise ValueError(f"unknown wind-farm variant {variant!r}")
    if A is not None:
        A_ = numkit.as_matrix(A, "A", rows=5, cols=5)
        variant = "user"
    Cz = np.zeros((6, 5))
    Cz[:5, :5] = np.diag([np.sqrt(0.1), 100.0, 0.0, 100.0, 0.0])
    Dzu = np.zeros((6, 1))
    Dzu[5, 0] = 1.0
    return WindFarmData(A_, M[:, 5:6].copy(), M[:, 6:7].copy(), Cz, Dzu, variant)


@dataclass(frozen=True)
class WindFarmValidation:
    hurwitz: bool
    worst_eigenvalue: complex
    pbh_ok: bool
    eigenvalues: np.ndarray

    def diagnostic(self):
        if self.hurwitz:
            return None
        ev = self.worst_eigenvalue
        return f"wind-farm A is not Hurwitz: eigenvalue {ev.real:.6g}{ev.imag:+.6g}j"


def validate_wind_farm(data):
    ev = np.linalg.eigvals(data.A)
    k = int(np.argmax(ev.real))
    return WindFarmValidation(
        hurwitz=bool(numkit.is_hurwitz(data.A)),
        worst_eigenvalue=complex(ev[k]),
        pbh_ok=numkit.pbh_no_imaginary_unobservable(data.Q, data.A),
        eigenvalues=ev,
    )


def tadpole():
    """Planar double-integrator-free swarm agent: ``A = 0``, ``B = I``, ``Q = I``.

    With this weight the local gain is ``-I``; the center gain used in the
    demonstration is ``-25 I`` with ``nu = 50``.
    """
    return Plant(np.zeros((2, 2)), np.eye(2)), CostSpec(np.eye(2))
