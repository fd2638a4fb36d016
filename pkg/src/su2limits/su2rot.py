"""Linear polarization transformations and the SO(3) rotations they induce.

A transformation ``U = exp(i a S3) exp(i b S2) exp(i c S3)`` acts on amplitude
vectors.  Because ``exp(i a S3)`` multiplies amplitude ``n`` by
``exp(i a (2n - N))``, Stokes vectors transform as
``<S>' = Rz(-2a) Ry(-2b) Rz(-2c) <S>`` with right-handed rotation matrices:
the angles are doubled and the sense of rotation is reversed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fockstate import TwoModeState
from .stokes import build_stokes


@dataclass(frozen=True)
class EulerAngles:
    alpha: float
    beta: float
    gamma: float

    @classmethod
    def from_degrees(cls, alpha, beta, gamma):
        return cls(math.radians(alpha), math.radians(beta), math.radians(gamma))

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma)


IDENTITY = EulerAngles(0.0, 0.0, 0.0)


def rot_x(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@lru_cache(maxsize=None)
def _generator_eig(n_photons, axis):
    ops = build_stokes(n_photons)
    w, v = np.linalg.eigh((ops.s1, ops.s2, ops.s3)[axis])
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def generator_exp(n_photons, axis, angle) -> np.ndarray:
    """``exp(i * angle * S_axis)`` for axis 0, 1, 2 (S1, S2, S3)."""
    if axis == 2:
        return np.diag(np.exp(1j * angle * (2.0 * np.arange(n_photons + 1) - n_photons)))
    w, v = _generator_eig(n_photons, axis)
    return (v * np.exp(1j * angle * w)) @ v.conj().T


def su2_matrix(n_photons, euler: EulerAngles) -> np.ndarray:
    """Unitary ``exp(i a S3) exp(i b S2) exp(i c S3)`` on the N-photon manifold."""
    n = n_photons
    phase_a = np.exp(1j * euler.alpha * (2.0 * np.arange(n + 1) - n))
    phase_c = np.exp(1j * euler.gamma * (2.0 * np.arange(n + 1) - n))
    middle = generator_exp(n, 1, euler.beta)
    return phase_a[:, None] * middle * phase_c[None, :]


def apply_rotation(state: TwoModeState, euler: EulerAngles) -> TwoModeState:
    amps = su2_matrix(state.n_photons, euler) @ state.amplitudes
    return TwoModeState(state.n_photons, amps)


def induced_so3(euler: EulerAngles) -> np.ndarray:
    """Rotation applied to Stokes vectors by :func:`apply_rotation` with the same angles."""
    return rot_z(-2 * euler.alpha) @ rot_y(-2 * euler.beta) @ rot_z(-2 * euler.gamma)


def euler_from_so3(rotation) -> EulerAngles:
    """Inverse of :func:`induced_so3` (one representative of the SU(2) double cover)."""
    r = np.asarray(rotation, dtype=float)
    sb = math.hypot(r[0, 2], r[1, 2])
    b = math.atan2(sb, r[2, 2])
    a = math.atan2(r[1, 2], r[0, 2]) if sb > 0 else 0.0
    # a is ill-conditioned for b near 0 or pi; take c from the well-conditioned
    # a + c (upper block) or a - c so the product stays accurate
    if r[2, 2] >= 0:
        c = math.atan2(r[1, 0] - r[0, 1], r[0, 0] + r[1, 1]) - a
    else:
        c = a - math.atan2(-r[1, 0] - r[0, 1], r[1, 1] - r[0, 0])
    return EulerAngles(-a / 2, -b / 2, -c / 2)


_PAIRS = {
    frozenset((1, 2)): 2,
    frozenset((2, 3)): 0,
    frozenset((1, 3)): 1,
}


def permute_variances(state: TwoModeState, which) -> TwoModeState:
    """Swap the variances of two Stokes axes by a quarter turn about the third.

    ``which`` names the pair with 1-based axis labels, e.g. ``(1, 2)``.
    """
    try:
        axis = _PAIRS[frozenset(int(w) for w in which)]
        if len(tuple(which)) != 2:
            raise KeyError(which)
    except (KeyError, TypeError, ValueError):
        raise ValueError(f"axis pair must be one of (1,2), (2,3), (3,1); got {which!r}") from None
    # a turn of pi/2 on the sphere needs pi/4 in the exponent
    u = generator_exp(state.n_photons, axis, math.pi / 4)
    return TwoModeState(state.n_photons, u @ state.amplitudes)
