"""Pure two-mode N-photon states in the fixed-excitation Fock basis.

Amplitude index ``n`` counts photons in the right-circular mode R, so index
``n`` holds the ket ``|n_R = n, n_L = N - n>``.  The last entry therefore
multiplies ``|N, 0>``, the state whose Stokes vector points at the North pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, PhotonNumberMismatch, StateError, UnnormalizableError

NORM_TOL = 1e-12


def binomial(n: int, k: int) -> float:
    """Binomial coefficient as a float; exact below n = 21, log-gamma above."""
    if k < 0 or k > n:
        return 0.0
    if n <= 20:
        return float(math.comb(n, k))
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


def sqrt_binomials(n: int) -> np.ndarray:
    return np.sqrt(np.array([binomial(n, k) for k in range(n + 1)]))


def _fix_phase(c: np.ndarray) -> np.ndarray:
    # first non-negligible amplitude made real and non-negative
    mags = np.abs(c)
    idx = int(np.argmax(mags > NORM_TOL * mags.max()))
    if mags[idx] == 0.0:
        return c
    return c * (np.conj(c[idx]) / mags[idx])


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Normalized amplitude vector of length ``n_photons + 1``.

    Instances are immutable; ``amplitudes`` is a read-only complex array.
    Use the ``make_*`` constructors rather than calling this directly.
    """

    n_photons: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size != self.n_photons + 1:
            raise StateError(
                f"expected {self.n_photons + 1} amplitudes for N={self.n_photons}, got {amps.size}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.n_photons + 1

    def __repr__(self):
        return f"TwoModeState(N={self.n_photons}, amplitudes={np.array2string(self.amplitudes, precision=6)})"

    def to_text(self) -> str:
        return format_state(self)


def _require_n(n, minimum=0):
    if int(n) != n or n < minimum:
        raise StateError(f"photon number must be an integer >= {minimum}, got {n}")
    return int(n)


def make_from_amplitudes(n_photons, raw, fix_phase=True) -> TwoModeState:
    """Normalize ``raw`` into a state of ``n_photons`` photons.

    Raises :class:`StateError` on a length mismatch and
    :class:`UnnormalizableError` (a subclass) on an all-zero vector.
    """
    n = _require_n(n_photons)
    c = np.asarray(raw, dtype=complex).ravel()
    if c.size != n + 1:
        raise StateError(f"expected {n + 1} amplitudes for N={n}, got {c.size}")
    if not np.all(np.isfinite(c)):
        raise StateError("amplitudes must be finite")
    norm = np.linalg.norm(c)
    if norm == 0.0:
        raise UnnormalizableError("unnormalizable: all amplitudes are zero")
    c = c / norm
    if fix_phase:
        c = _fix_phase(c)
    return TwoModeState(n, c)


def make_su2_coherent(n_photons, theta, phi) -> TwoModeState:
    """SU(2) coherent state with all photons polarized along (theta, phi).

    ``theta = 0`` gives ``|N, 0>`` (North pole), ``theta = pi`` gives ``|0, N>``.
    """
    n = _require_n(n_photons, 1)
    k = np.arange(n + 1)
    up = math.cos(theta / 2)
    down = np.exp(1j * phi) * math.sin(theta / 2)
    c = sqrt_binomials(n) * up**k * down ** (n - k)
    return make_from_amplitudes(n, c)


def make_noon(n_photons) -> TwoModeState:
    n = _require_n(n_photons, 1)
    c = np.zeros(n + 1, dtype=complex)
    c[0] = c[n] = 1 / math.sqrt(2)
    return make_from_amplitudes(n, c)


def eta_parameter(n_photons, branch="plus") -> float:
    """Weight ``eta`` on ``|N, 0>`` for the uniform-variance superposition."""
    n = _require_n(n_photons)
    if n < 3:
        raise StateError("uniform states undefined below N=3")
    sign = _branch_sign(branch)
    return math.sqrt(0.5 * (1 + sign * math.sqrt((n - 1) / n)))


def _branch_sign(branch) -> int:
    if branch in ("plus", "+", +1):
        return 1
    if branch in ("minus", "-", -1):
        return -1
    raise StateError(f"branch must be 'plus' or 'minus', got {branch!r}")


def make_eta(n_photons, branch="plus") -> TwoModeState:
    """``eta |N,0> + sqrt(1 - eta^2) |0,N>`` with isotropic Stokes variance N."""
    n = _require_n(n_photons)
    eta = eta_parameter(n, branch)
    c = np.zeros(n + 1, dtype=complex)
    c[n] = eta
    c[0] = math.sqrt(1 - eta * eta)
    return make_from_amplitudes(n, c)


def basis_state(n_photons, n_right) -> TwoModeState:
    """The Fock ket ``|n_right, N - n_right>``."""
    n = _require_n(n_photons)
    if not 0 <= n_right <= n:
        raise StateError(f"n_right must lie in [0, {n}]")
    c = np.zeros(n + 1, dtype=complex)
    c[n_right] = 1.0
    return TwoModeState(n, c)


def overlap(a: TwoModeState, b: TwoModeState) -> complex:
    """Inner product <a|b>."""
    if a.n_photons != b.n_photons:
        raise PhotonNumberMismatch(f"photon number mismatch: {a.n_photons} vs {b.n_photons}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: TwoModeState, b: TwoModeState) -> float:
    return abs(overlap(a, b)) ** 2


def format_state(state: TwoModeState) -> str:
    parts = [str(state.n_photons)]
    for c in state.amplitudes:
        parts.append(f"{c.real:.17g},{c.imag:.17g}")
    return "; ".join(parts)


def parse_state(text: str) -> TwoModeState:
    """Parse ``"N; re0,im0; re1,im1; ..."`` into a normalized state."""
    fields = [f.strip() for f in text.strip().split(";")]
    try:
        n = int(fields[0])
        amps = []
        for f in fields[1:]:
            re, im = f.split(",")
            amps.append(complex(float(re), float(im)))
    except ValueError as exc:
        raise ParseError(f"cannot parse state {text!r}: {exc}") from None
    if n < 0 or len(amps) != n + 1:
        raise ParseError(f"state {text!r} needs exactly N+1 = {n + 1} amplitude pairs")
    return make_from_amplitudes(n, amps)
