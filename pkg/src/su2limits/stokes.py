"""Stokes operators on a fixed N-photon manifold and second-order statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .eigen3 import eigh3
from .errors import StateError
from .fockstate import TwoModeState

LEVI_CIVITA = np.zeros((3, 3, 3))
for _k, _l, _m in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_k, _l, _m] = 1.0
    LEVI_CIVITA[_l, _k, _m] = -1.0


@dataclass(frozen=True, eq=False)
class StokesSet:
    n_photons: int
    s0: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        """The three SU(2) generators stacked into shape (3, N+1, N+1)."""
        return np.stack([self.s1, self.s2, self.s3])


@lru_cache(maxsize=None)
def build_stokes(n_photons: int) -> StokesSet:
    """Stokes operator matrices in the basis ``|n, N-n>``, n = R-mode photons.

    ``S1 = aR^+ aL + aL^+ aR``, ``S2 = -i aR^+ aL + i aL^+ aR`` and
    ``S3 = aR^+ aR - aL^+ aL``.  They satisfy ``[S_k, S_l] = 2i eps_klm S_m``.
    The returned matrices are shared between callers and are read-only.
    """
    if int(n_photons) != n_photons or n_photons < 1:
        raise StateError(f"Stokes operators need N >= 1, got {n_photons}")
    n = int(n_photons)
    dim = n + 1
    idx = np.arange(n)
    # <n+1| aR^+ aL |n>
    raise_r = np.sqrt((idx + 1.0) * (n - idx))
    s1 = np.zeros((dim, dim), dtype=complex)
    s2 = np.zeros((dim, dim), dtype=complex)
    s1[idx + 1, idx] = raise_r
    s1[idx, idx + 1] = raise_r
    s2[idx + 1, idx] = -1j * raise_r
    s2[idx, idx + 1] = 1j * raise_r
    s3 = np.diag(2.0 * np.arange(dim) - n).astype(complex)
    s0 = n * np.eye(dim, dtype=complex)
    for m in (s0, s1, s2, s3):
        m.setflags(write=False)
    return StokesSet(n, s0, s1, s2, s3)


def stokes_vector(state: TwoModeState) -> np.ndarray:
    """Expectation values (<S1>, <S2>, <S3>)."""
    ops = build_stokes(state.n_photons)
    psi = state.amplitudes
    return np.array([np.vdot(psi, s @ psi).real for s in (ops.s1, ops.s2, ops.s3)])


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    gamma: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.trace(self.gamma))


def covariance(state: TwoModeState) -> CovarianceMatrix:
    """Symmetrized Stokes covariance ``<S_k S_l + S_l S_k>/2 - <S_k><S_l>``."""
    ops = build_stokes(state.n_photons)
    psi = state.amplitudes
    applied = np.stack([s @ psi for s in (ops.s1, ops.s2, ops.s3)])
    means = np.array([np.vdot(psi, v).real for v in applied])
    # Re<psi|S_k S_l|psi> is the symmetrized moment for Hermitian S_k
    second = (np.conj(applied) @ applied.T).real
    gamma = 0.5 * (second + second.T) - np.outer(means, means)
    gamma.setflags(write=False)
    return CovarianceMatrix(gamma)


def batch_moments(amplitudes: np.ndarray, n_photons: int):
    """Stokes vectors and covariance matrices for a stack of amplitude rows.

    ``amplitudes`` has shape (M, N+1) with normalized rows.  Returns arrays of
    shape (M, 3) and (M, 3, 3).
    """
    ops = build_stokes(n_photons).vector
    psi = np.asarray(amplitudes, dtype=complex)
    applied = np.einsum("kij,mj->mki", ops, psi)
    means = np.einsum("mi,mki->mk", np.conj(psi), applied).real
    second = np.einsum("mki,mli->mkl", np.conj(applied), applied).real
    second = 0.5 * (second + np.swapaxes(second, 1, 2))
    gamma = second - means[:, :, None] * means[:, None, :]
    return means, gamma


@dataclass(frozen=True, eq=False)
class PrincipalVariances:
    """Ascending eigenvalues of the covariance matrix; ``axes[k]`` belongs to ``lambdas[k]``."""

    lambdas: np.ndarray
    axes: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.sum(self.lambdas))

    def multiplicity(self, tol) -> int:
        """Size of the largest cluster of equal eigenvalues (1, 2 or 3)."""
        l1, l2, l3 = self.lambdas
        if l3 - l1 < tol:
            return 3
        if l2 - l1 < tol or l3 - l2 < tol:
            return 2
        return 1


def principal_variances(cov) -> PrincipalVariances:
    gamma = cov.gamma if isinstance(cov, CovarianceMatrix) else np.asarray(cov, dtype=float)
    lam, vecs = eigh3(gamma)
    axes = vecs.T.copy()
    lam.setflags(write=False)
    axes.setflags(write=False)
    return PrincipalVariances(lam, axes)


def degeneracy_tolerance(n_photons) -> float:
    return 1e-7 * n_photons * (n_photons + 2)


def directional_variance(state: TwoModeState, direction) -> float:
    """Variance of ``S . n`` for a unit vector ``n``."""
    n = np.asarray(direction, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-10:
        raise ValueError("direction must be a unit 3-vector")
    gamma = covariance(state).gamma
    return float(n @ gamma @ n)


def directional_variance_from_principal(pv: PrincipalVariances, direction) -> float:
    n = np.asarray(direction, dtype=float)
    return float(np.sum((pv.axes @ n) ** 2 * pv.lambdas))


@dataclass(frozen=True)
class UncertaintyBounds:
    det_lo: float
    det_hi: float
    minor_lo: float
    minor_hi: float
    trace_lo: float
    trace_hi: float

    @classmethod
    def for_photons(cls, n_photons):
        n = float(n_photons)
        s = n * (n + 2)
        return cls(0.0, s**3 / 27, n * n, s**2 / 3, 2 * n, s)


@dataclass(frozen=True)
class BoundCheck:
    name: str
    value: float
    limit: float
    margin: float
    passed: bool


def check_bounds(lambdas, n_photons, tol=1e-9):
    """Evaluate the determinant, principal-minor and trace inequalities.

    ``lambdas`` is a :class:`PrincipalVariances` or any 3 numbers.  Margins are
    signed so that a non-negative margin means the bound holds; ``tol`` is a
    relative slack applied to each comparison.
    """
    lam = np.asarray(getattr(lambdas, "lambdas", lambdas), dtype=float)
    l1, l2, l3 = lam
    b = UncertaintyBounds.for_photons(n_photons)
    det = l1 * l2 * l3
    minors = l1 * l2 + l2 * l3 + l3 * l1
    trace = l1 + l2 + l3
    checks = []
    for name, value, lo, hi in (
        ("det", det, b.det_lo, b.det_hi),
        ("minor", minors, b.minor_lo, b.minor_hi),
        ("trace", trace, b.trace_lo, b.trace_hi),
    ):
        slack = tol * max(1.0, abs(hi))
        value = float(value)
        checks.append(BoundCheck(f"{name}_lo", value, lo, value - lo, bool(value - lo >= -slack)))
        checks.append(BoundCheck(f"{name}_hi", value, hi, hi - value, bool(hi - value >= -slack)))
    return {c.name: c for c in checks}


def casimir_residual(state: TwoModeState) -> float:
    """``trace(Gamma) + |<S>|^2 - N(N+2)``; zero for every pure N-photon state."""
    n = state.n_photons
    s = stokes_vector(state)
    return covariance(state).trace + float(s @ s) - n * (n + 2)


def analysis_report(state: TwoModeState) -> dict:
    """Plain-data summary used by the CLI JSON output."""
    cov = covariance(state)
    pv = principal_variances(cov)
    bounds = check_bounds(pv, state.n_photons)
    return {
        "n_photons": state.n_photons,
        "amplitudes": [[c.real, c.imag] for c in state.amplitudes],
        "stokes_vector": stokes_vector(state).tolist(),
        "gamma": cov.gamma.ravel().tolist(),
        "lambdas": pv.lambdas.tolist(),
        "axes": pv.axes.tolist(),
        "trace": cov.trace,
        "bounds": {
            name: {"value": c.value, "limit": c.limit, "margin": c.margin, "passed": c.passed}
            for name, c in bounds.items()
        },
    }


def pairwise_bound_holds(state: TwoModeState, tol=1e-10) -> bool:
    """Robertson check ``dS_k dS_l >= |<S_m>|`` for every pair (the 2i structure constant)."""
    gamma = covariance(state).gamma
    s = stokes_vector(state)
    for k, l, m in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        if math.sqrt(max(gamma[k, k], 0) * max(gamma[l, l], 0)) < abs(s[m]) - tol:
            return False
    return True
