"""Majorana constellations: N points on the Poincare sphere per N-photon state.

A state factorizes as a product of single-photon creators
``cos(t/2) aR^+ + exp(i p) sin(t/2) aL^+``, one per point ``(t, p)``.  With
``P(z) = sum_n c_n sqrt(C(N, n)) z**n`` the roots are ``z = -exp(i p) tan(t/2)``;
a missing top-degree term stands for a point at the South pole.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import PhotonNumberMismatch
from .fockstate import TwoModeState, binomial, make_from_amplitudes, sqrt_binomials
from .roots import aberth_roots, merge_clusters
from .su2rot import EulerAngles, apply_rotation, euler_from_so3, induced_so3, rot_y, rot_z

DEFLATION_TOL = 1e-12
POLE_TOL = 1e-12
# azimuths this close to 0 (mod 2pi) are round-off of an exact zero
AZIMUTH_SNAP = 1e-14
TWO_PI = 2 * math.pi


def _wrap(phi):
    phi = math.fmod(phi, TWO_PI)
    if phi < 0:
        phi += TWO_PI
    # fmod can return exactly 2pi after the shift for tiny negatives
    return 0.0 if phi >= TWO_PI else phi


def unit_vector(theta, phi):
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def point_from_vector(v):
    x, y, z = v
    theta = math.atan2(math.hypot(x, y), z)
    if theta < POLE_TOL or math.pi - theta < POLE_TOL:
        return (0.0 if theta < math.pi / 2 else math.pi), 0.0
    return theta, _wrap(math.atan2(y, x))


@dataclass(frozen=True)
class MajoranaConstellation:
    """Multiset of points ``(theta, phi)``, kept sorted."""

    points: tuple

    def __post_init__(self):
        pts = []
        for theta, phi in self.points:
            theta = float(theta)
            phi = 0.0 if theta <= POLE_TOL or math.pi - theta <= POLE_TOL else _wrap(float(phi))
            if min(phi, TWO_PI - phi) < AZIMUTH_SNAP:
                phi = 0.0
            pts.append((theta, phi))
        object.__setattr__(self, "points", tuple(sorted(pts)))

    @property
    def n_points(self) -> int:
        return len(self.points)

    def vectors(self) -> np.ndarray:
        return np.array([unit_vector(t, p) for t, p in self.points]).reshape(-1, 3)

    @classmethod
    def from_vectors(cls, vectors):
        return cls(tuple(point_from_vector(v) for v in np.asarray(vectors, dtype=float)))

    def rotated(self, rotation):
        return MajoranaConstellation.from_vectors(self.vectors() @ np.asarray(rotation).T)

    def mirrored(self):
        """Reflection ``phi -> -phi`` (orientation reversing)."""
        return MajoranaConstellation(tuple((t, -p) for t, p in self.points))

    def degrees(self):
        return [(math.degrees(t), math.degrees(p)) for t, p in self.points]

    def to_csv(self, digits=9) -> str:
        buf = io.StringIO()
        buf.write("theta_rad,phi_rad\n")
        for t, p in self.points:
            buf.write(f"{t + 0.0:.{digits}g},{p + 0.0:.{digits}g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or lines[0] != "theta_rad,phi_rad":
            raise ValueError("constellation CSV must start with header 'theta_rad,phi_rad'")
        return cls(tuple(tuple(float(x) for x in ln.split(",")) for ln in lines[1:]))


def majorana_polynomial(state: TwoModeState) -> np.ndarray:
    """Ascending coefficients ``c_n sqrt(C(N, n))``."""
    return state.amplitudes * sqrt_binomials(state.n_photons)


# generic frames used when a point cluster sits within deflation range of a pole
_GENERIC_FRAMES = (
    EulerAngles(math.sqrt(2) - 1, math.atan(math.sqrt(2)) / 2, (math.sqrt(5) - 1) / 4),
    EulerAngles(math.pi / 7, math.e / 5, math.sqrt(3) / 4),
)


def _has_tiny(coeffs):
    mags = np.abs(coeffs)
    limit = DEFLATION_TOL * np.linalg.norm(coeffs)
    return bool(np.any((mags > 0) & (mags <= limit)))


def _points_from_coeffs(coeffs, n_photons):
    scale = np.linalg.norm(coeffs)
    nz = np.nonzero(np.abs(coeffs) > DEFLATION_TOL * scale)[0]
    degree = int(nz[-1])
    n_south = n_photons - degree
    trimmed = coeffs[: degree + 1].copy()
    # negligible low-order terms are exact zeros (North pole points)
    trimmed[np.abs(trimmed) <= DEFLATION_TOL * scale] = 0
    points = [(math.pi, 0.0)] * n_south
    if degree > 0:
        roots = merge_clusters(trimmed, aberth_roots(trimmed))
        for z in roots:
            w = -z
            points.append((2 * math.atan(abs(w)), math.atan2(w.imag, w.real)))
    return MajoranaConstellation(tuple(points))


def to_constellation(state: TwoModeState) -> MajoranaConstellation:
    """Majorana points of ``state``.

    Coefficients below ``DEFLATION_TOL`` (relative) are dropped, putting points
    exactly on a pole.  When such a coefficient is tiny but not zero, a cluster
    lies close to a pole and dropping it would snap the whole cluster; the
    roots are then found in a generic rotated frame and rotated back.
    """
    coeffs = majorana_polynomial(state)
    if _has_tiny(coeffs):
        for frame in _GENERIC_FRAMES:
            moved = majorana_polynomial(apply_rotation(state, frame))
            if not _has_tiny(moved):
                points = _points_from_coeffs(moved, state.n_photons)
                return points.rotated(induced_so3(frame).T)
    return _points_from_coeffs(coeffs, state.n_photons)


def from_constellation(constellation: MajoranaConstellation) -> TwoModeState:
    """Expand the product of single-photon creators into Fock amplitudes."""
    n = constellation.n_points
    if n < 1:
        raise ValueError("a constellation needs at least one point")
    # coef[k] multiplies aR^+^(N-k) aL^+^k
    coef = np.array([1.0 + 0j])
    for theta, phi in constellation.points:
        u = math.cos(theta / 2)
        v = complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2)
        nxt = np.zeros(coef.size + 1, dtype=complex)
        nxt[:-1] += u * coef
        nxt[1:] += v * coef
        coef = nxt
    amps = np.array([coef[n - m] / math.sqrt(binomial(n, m)) for m in range(n + 1)])
    return make_from_amplitudes(n, amps)


def _angle(u, v):
    return math.atan2(np.linalg.norm(np.cross(u, v)), float(np.dot(u, v)))


def _key(point, ndigits=9):
    return (round(point[0], ndigits), round(point[1], ndigits))


def canonicalize(constellation: MajoranaConstellation, tol=1e-9):
    """Rotate so one point sits at the North pole and another on phi = 0.

    The pole point is the lexicographically largest ``(theta, phi)``; the
    meridian point is the remaining one with the largest polar angle.  Ties in
    that choice go to the candidate that leaves the smallest azimuths.  Returns the
    rotated constellation and the Euler angles that realize the rotation with
    :func:`su2limits.su2rot.apply_rotation`.
    """
    pts = list(constellation.points)
    if not pts:
        return constellation, EulerAngles(0.0, 0.0, 0.0)
    anchor = max(pts, key=_key)
    to_pole = rot_y(-anchor[0]) @ rot_z(-anchor[1])
    vecs = constellation.vectors() @ to_pole.T
    first = MajoranaConstellation.from_vectors(vecs)
    free = [p for p in first.points if tol < p[0] < math.pi - tol]
    if not free:
        return first, euler_from_so3(to_pole)
    top = max(p[0] for p in free)
    candidates = [p for p in free if p[0] >= top - tol]
    best = None
    for cand in candidates:
        rot = rot_z(-cand[1])
        out = MajoranaConstellation.from_vectors(vecs @ rot.T)
        out = _snap_meridian(out, cand[0], tol)
        key = _tie_key(out)
        if best is None or key < best[0]:
            best = (key, out, rot @ to_pole)
    _, out, total = best
    return out, euler_from_so3(total)


def _tie_key(c, ndigits=9):
    # azimuths first: polar angles of tied candidates agree only to round-off
    return (
        sorted(round(p, ndigits) for _, p in c.points),
        sorted(round(t, ndigits) for t, _ in c.points),
    )


def _snap_meridian(c, theta, tol):
    # the anchor's azimuth is 0 by construction; remove round-off (e.g. 2pi - 1e-16)
    pts = []
    for t, p in c.points:
        if abs(t - theta) <= tol and min(p, TWO_PI - p) <= 1e-9:
            p = 0.0
        pts.append((t, p))
    return MajoranaConstellation(tuple(pts))


def pairwise_angles(constellation: MajoranaConstellation) -> np.ndarray:
    v = constellation.vectors()
    out = [_angle(v[i], v[j]) for i in range(len(v)) for j in range(i + 1, len(v))]
    return np.sort(np.array(out))


class OrbitRelation(str, enum.Enum):
    SAME = "same"
    MIRROR_ONLY = "mirror_only"
    DIFFERENT = "different"


def _frame(p, q):
    u = p / np.linalg.norm(p)
    w = q - (q @ u) * u
    nw = np.linalg.norm(w)
    if nw < 1e-9:
        # q parallel to p: any perpendicular completes the frame
        trial = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        w = trial - (trial @ u) * u
        nw = np.linalg.norm(w)
    w = w / nw
    return np.column_stack([u, w, np.cross(u, w)])


def _matches(va, vb, rotation, tol):
    moved = va @ rotation.T
    cost = np.arccos(np.clip(moved @ vb.T, -1.0, 1.0))
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) <= tol


def _align(va, vb, tol):
    """A proper rotation taking point set ``va`` onto ``vb`` as multisets, or None."""
    n = len(va)
    if _matches(va, vb, np.eye(3), tol):
        # prefer the identity whenever it already works (symmetric configurations)
        return np.eye(3)
    if n == 1:
        return _frame(vb[0], vb[0]) @ _frame(va[0], va[0]).T
    # anchor pair of a: the least collinear one
    best, bi, bj = -1.0, 0, 0
    for i in range(n):
        for j in range(i + 1, n):
            s = np.linalg.norm(np.cross(va[i], va[j]))
            if s > best:
                best, bi, bj = s, i, j
    fa = _frame(va[bi], va[bj])
    target = _angle(va[bi], va[bj])
    for k in range(n):
        for m in range(n):
            if k == m:
                continue
            if abs(_angle(vb[k], vb[m]) - target) > 10 * tol:
                continue
            rotation = _frame(vb[k], vb[m]) @ fa.T
            if _matches(va, vb, rotation, tol):
                return rotation
            if best < 1e-9:
                # collinear set: the frame's free spin about the axis does not matter
                break
    return None


def same_orbit(a: TwoModeState, b: TwoModeState, tol=1e-6) -> OrbitRelation:
    """Classify two states as SU(2)-equivalent, mirror images only, or unrelated.

    Pairwise angular separations are compared first; only when those agree is
    an explicit alignment attempted, first with proper rotations and then
    against the mirror image ``phi -> -phi`` of ``a``.
    """
    return orbit_relation(a, b, tol)[0]


def orbit_relation(a: TwoModeState, b: TwoModeState, tol=1e-6):
    """Like :func:`same_orbit` but also returns a witness rotation for ``same``.

    The witness is an :class:`EulerAngles` with ``apply_rotation(a, e)`` equal
    to ``b`` up to a global phase.
    """
    if a.n_photons != b.n_photons:
        raise PhotonNumberMismatch(f"photon number mismatch: {a.n_photons} vs {b.n_photons}")
    ca, cb = to_constellation(a), to_constellation(b)
    if np.max(np.abs(pairwise_angles(ca) - pairwise_angles(cb)), initial=0.0) > 10 * tol:
        return OrbitRelation.DIFFERENT, None
    vb = cb.vectors()
    rotation = _align(ca.vectors(), vb, tol)
    if rotation is not None:
        return OrbitRelation.SAME, euler_from_so3(rotation)
    if _align(ca.mirrored().vectors(), vb, tol) is not None:
        return OrbitRelation.MIRROR_ONLY, None
    return OrbitRelation.DIFFERENT, None
