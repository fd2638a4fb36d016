"""Orbit-generating states, per-orbit variance polygons and parameter sweeps.

Each SU(2) orbit is represented by the state whose first Majorana point is at
the North pole and whose second lies on the meridian ``phi = 0``.  The
remaining points are free, so the generator for N photons has ``2N - 3``
parameters ``(theta_2, theta_3, phi_3, theta_4, phi_4, ...)``.
"""

from __future__ import annotations

import io
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .eigen3 import eigvalsh3_refined
from .errors import StateError
from .fockstate import TwoModeState, binomial
from .hull import ccw_order, convex_hull, from_plane, signed_distance, to_plane
from .majorana import MajoranaConstellation, from_constellation
from .stokes import (
    batch_moments,
    covariance,
    degeneracy_tolerance,
    principal_variances,
)

N_BUCKETS = 256
_ANGLE_SLACK = 1e-12


def _generator_points(n_photons, params):
    params = [float(p) for p in params]
    if len(params) != 2 * n_photons - 3:
        raise ValueError(f"N={n_photons} orbit generator takes {2 * n_photons - 3} parameters")
    pts = [(0.0, 0.0), (params[0], 0.0)]
    for k in range(1, len(params), 2):
        pts.append((params[k], params[k + 1]))
    return pts


def orbit_state(n_photons, params) -> TwoModeState:
    """Orbit-generating state for any N >= 2 from its ``2N - 3`` angles."""
    return from_constellation(MajoranaConstellation(tuple(_generator_points(n_photons, params))))


def orbit_state_n2(theta) -> TwoModeState:
    """``aR^+ (cos(theta/2) aR^+ + sin(theta/2) aL^+) |0,0>``, normalized; 0 <= theta <= pi."""
    if not -_ANGLE_SLACK <= theta <= math.pi + _ANGLE_SLACK:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    return orbit_state(2, [theta])


def orbit_state_n3(theta2, theta3, phi3) -> TwoModeState:
    return orbit_state(3, [theta2, theta3, math.fmod(phi3, 2 * math.pi)])


def batch_orbit_amplitudes(n_photons, params):
    """Normalized amplitude rows for a stack of generator parameters, shape (M, 2N-3)."""
    params = np.atleast_2d(np.asarray(params, dtype=float))
    m = params.shape[0]
    thetas = [np.zeros(m), params[:, 0]]
    phis = [np.zeros(m), np.zeros(m)]
    for k in range(1, params.shape[1], 2):
        thetas.append(params[:, k])
        phis.append(params[:, k + 1])
    coef = np.ones((m, 1), dtype=complex)
    for t, p in zip(thetas, phis):
        u = np.cos(t / 2)[:, None]
        v = (np.exp(1j * p) * np.sin(t / 2))[:, None]
        nxt = np.zeros((m, coef.shape[1] + 1), dtype=complex)
        nxt[:, :-1] += u * coef
        nxt[:, 1:] += v * coef
        coef = nxt
    n = n_photons
    inv_sqrt_binom = np.array([1 / math.sqrt(binomial(n, k)) for k in range(n + 1)])
    # coef[:, k] multiplies |N-k, k>; flip into R-photon index order
    amps = coef[:, ::-1] * inv_sqrt_binom
    return amps / np.linalg.norm(amps, axis=1, keepdims=True)


def batch_principal_variances(n_photons, params):
    """Sorted principal variances and Stokes-vector norms squared per parameter row."""
    amps = batch_orbit_amplitudes(n_photons, params)
    means, gamma = batch_moments(amps, n_photons)
    return eigvalsh3_refined(gamma), np.sum(means * means, axis=1)


@dataclass(frozen=True)
class VariancePolygon:
    kind: str
    vertices: np.ndarray
    trace: float


def variance_polygon(state: TwoModeState, degeneracy_tol=None) -> VariancePolygon:
    """Convex hull of the variance triplets reachable on the state's orbit.

    The vertices are the distinct permutations of the principal variances:
    one point for an isotropic state, a triangle for a doubly degenerate
    spectrum, a hexagon otherwise.
    """
    tol = degeneracy_tolerance(state.n_photons) if degeneracy_tol is None else degeneracy_tol
    lam = np.array(principal_variances(covariance(state)).lambdas)
    return polygon_from_lambdas(lam, tol)


def polygon_from_lambdas(lambdas, tol) -> VariancePolygon:
    l1, l2, l3 = sorted(float(x) for x in lambdas)
    trace = l1 + l2 + l3
    if l3 - l1 < tol:
        m = trace / 3
        return VariancePolygon("point", np.array([[m, m, m]]), trace)
    if l2 - l1 < tol:
        m = (l1 + l2) / 2
        lam, kind = (m, m, l3), "triangle"
    elif l3 - l2 < tol:
        m = (l2 + l3) / 2
        lam, kind = (l1, m, m), "triangle"
    else:
        lam, kind = (l1, l2, l3), "hexagon"
    verts = sorted(set(itertools.permutations(lam)))
    return VariancePolygon(kind, ccw_order(np.array(verts)), trace)


def is_uniform(state: TwoModeState, tol=1e-6) -> bool:
    lam = principal_variances(covariance(state)).lambdas
    return bool(lam[2] - lam[0] < tol)


_PERMS = np.array(list(itertools.permutations(range(3))))


@dataclass
class SliceHull:
    index: int
    trace_lo: float
    trace_hi: float
    trace: float
    vertices_uv: np.ndarray

    @property
    def vertices(self) -> np.ndarray:
        return from_plane(self.vertices_uv, self.trace)


@dataclass
class VariancePointCloud:
    """Swept samples of one excitation manifold and their per-trace hull slices.

    ``params`` holds the generator angles (NaN where unused), ``lambdas`` the
    ascending principal variances and ``traces`` their sums.
    """

    n_photons: int
    params: np.ndarray
    lambdas: np.ndarray
    traces: np.ndarray
    stokes_norm2: np.ndarray
    bucket_width: float
    slice_hulls: dict = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return len(self.traces)

    @property
    def trace_range(self):
        return float(self.traces.min()), float(self.traces.max())

    def outside_margin(self, triplet):
        """In-plane distance from ``triplet`` to every slice of compatible trace.

        Returns the smallest signed distance (negative means inside a slice),
        or ``inf`` when no slice has a compatible trace.
        """
        t = float(np.sum(triplet))
        uv = to_plane(np.asarray(triplet, dtype=float))
        half = self.bucket_width / 2
        margins = [
            signed_distance(uv, s.vertices_uv)
            for s in self.slice_hulls.values()
            if s.trace_lo - half <= t <= s.trace_hi + half
        ]
        return min(margins) if margins else math.inf

    def slice_for_trace(self, trace):
        return min(self.slice_hulls.values(), key=lambda s: abs(s.trace - trace))

    def points_csv(self, digits=9) -> str:
        buf = io.StringIO()
        buf.write("param1,param2,param3,lam1,lam2,lam3,trace\n")
        for prm, lam, tr in zip(self.params, self.lambdas, self.traces):
            cells = ["" if math.isnan(x) else f"{x + 0.0:.{digits}g}" for x in prm[:3]]
            cells += [f"{x + 0.0:.{digits}g}" for x in lam]
            cells.append(f"{tr + 0.0:.{digits}g}")
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()

    def hulls_csv(self, digits=9) -> str:
        buf = io.StringIO()
        buf.write("trace,vx,vy,vz\n")
        for key in sorted(self.slice_hulls):
            s = self.slice_hulls[key]
            for v in s.vertices:
                row = [s.trace, *v]
                buf.write(",".join(f"{x + 0.0:.{digits}g}" for x in row) + "\n")
        return buf.getvalue()


def bucket_width(n_photons, n_buckets=N_BUCKETS):
    n = n_photons
    return (n * (n + 2) - 2 * n) / n_buckets


def build_slices(n_photons, lambdas, traces, n_buckets=N_BUCKETS):
    """Group samples by trace and hull all permutations of their variances per group."""
    n = n_photons
    lo = 2.0 * n
    width = bucket_width(n, n_buckets)
    idx = np.clip(np.floor((traces - lo) / width).astype(int), 0, n_buckets - 1)
    order = np.argsort(idx, kind="stable")
    idx_sorted = idx[order]
    bounds = np.flatnonzero(np.diff(idx_sorted)) + 1
    slices = {}
    for group in np.split(order, bounds):
        if group.size == 0:
            continue
        b = int(idx[group[0]])
        # hull(union of permuted sets) = hull(permuted vertices of the unpermuted hull)
        base = convex_hull(to_plane(lambdas[group]))
        base3d = from_plane(base, 0.0)
        hull = convex_hull(to_plane(base3d[:, _PERMS].reshape(-1, 3)))
        tr = traces[group]
        slices[b] = SliceHull(
            index=b,
            trace_lo=float(tr.min()),
            trace_hi=float(tr.max()),
            trace=math.fsum(tr.tolist()) / group.size,
            vertices_uv=hull,
        )
    return slices


def sweep(n_photons, param_grid, chunk_size=4096, threads=None, n_buckets=N_BUCKETS):
    """Evaluate generator parameters in fixed chunks and merge in grid order.

    Chunk boundaries do not depend on ``threads``, so results are bitwise
    identical for any thread count.
    """
    grid = np.atleast_2d(np.asarray(param_grid, dtype=float))
    chunks = [grid[i : i + chunk_size] for i in range(0, len(grid), chunk_size)]
    workers = threads or os.cpu_count() or 1
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: batch_principal_variances(n_photons, c), chunks))
    else:
        parts = [batch_principal_variances(n_photons, c) for c in chunks]
    lambdas = np.concatenate([p[0] for p in parts])
    norm2 = np.concatenate([p[1] for p in parts])
    traces = lambdas.sum(axis=1)
    params = np.full((len(grid), max(3, grid.shape[1])), np.nan)
    params[:, : grid.shape[1]] = grid
    slices = build_slices(n_photons, lambdas, traces, n_buckets)
    return VariancePointCloud(
        n_photons, params, lambdas, traces, norm2, bucket_width(n_photons, n_buckets), slices
    )


def _check_resolution(*res):
    for r in res:
        if int(r) != r or r < 2:
            raise StateError(f"resolution must be >= 2, got {r}")


def sweep_n2(resolution=512, threads=None) -> VariancePointCloud:
    _check_resolution(resolution)
    thetas = np.linspace(0.0, math.pi, int(resolution))
    return sweep(2, thetas[:, None], threads=threads)


def n3_grid(res_theta, res_phi, full_phi=False):
    """Grid over (theta_2, theta_3, phi_3), theta_2 slowest.

    ``phi_3`` spans [0, pi] by default: mirror configurations ``phi -> -phi``
    give identical variance triplets.  ``full_phi`` uses [0, 2pi) instead.
    """
    _check_resolution(res_theta, res_phi)
    thetas = np.linspace(0.0, math.pi, int(res_theta))
    if full_phi:
        phis = np.linspace(0.0, 2 * math.pi, int(res_phi), endpoint=False)
    else:
        phis = np.linspace(0.0, math.pi, int(res_phi))
    t2, t3, p3 = np.meshgrid(thetas, thetas, phis, indexing="ij")
    return np.column_stack([t2.ravel(), t3.ravel(), p3.ravel()])


def sweep_n3(res_theta=96, res_phi=48, threads=None, full_phi=False) -> VariancePointCloud:
    return sweep(3, n3_grid(res_theta, res_phi, full_phi), threads=threads)
