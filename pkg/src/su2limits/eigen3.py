"""Eigen-decomposition of real symmetric 3x3 matrices.

Eigenvalues come from the trigonometric solution of the characteristic cubic.
When the cubic's discriminant is numerically zero (a degenerate or nearly
degenerate spectrum) eigenvectors from row cross products are unreliable, so
the full decomposition falls back to cyclic Jacobi rotations.
"""

import math

import numpy as np

DISCRIMINANT_TOL = 1e-12


def eigvalsh3(a):
    """Ascending eigenvalues of one or many symmetric 3x3 matrices.

    Vectorized over leading axes: ``a`` has shape ``(..., 3, 3)`` and the
    result has shape ``(..., 3)``.
    """
    a = np.asarray(a, dtype=float)
    q = np.trace(a, axis1=-2, axis2=-1) / 3.0
    off = a[..., 0, 1] ** 2 + a[..., 0, 2] ** 2 + a[..., 1, 2] ** 2
    d0 = a[..., 0, 0] - q
    d1 = a[..., 1, 1] - q
    d2 = a[..., 2, 2] - q
    p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * off
    p = np.sqrt(p2 / 6.0)
    safe_p = np.where(p > 0, p, 1.0)
    b00, b11, b22 = d0 / safe_p, d1 / safe_p, d2 / safe_p
    b01 = a[..., 0, 1] / safe_p
    b02 = a[..., 0, 2] / safe_p
    b12 = a[..., 1, 2] / safe_p
    det_b = (
        b00 * (b11 * b22 - b12 * b12)
        - b01 * (b01 * b22 - b12 * b02)
        + b02 * (b01 * b12 - b11 * b02)
    )
    r = np.clip(det_b / 2.0, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    hi = q + 2.0 * p * np.cos(phi)
    lo = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    mid = 3.0 * q - hi - lo
    out = np.stack([lo, mid, hi], axis=-1)
    # p == 0 means a multiple of the identity
    out = np.where((p > 0)[..., None], out, q[..., None])
    return np.sort(out, axis=-1)


def eigvalsh3_refined(a):
    """Batched :func:`eigvalsh3` with nearly degenerate rows redone by Jacobi.

    The closed form loses about half the digits of a double eigenvalue; the
    few rows whose discriminant is below ``DISCRIMINANT_TOL`` are recomputed.
    """
    a = np.asarray(a, dtype=float)
    lam = eigvalsh3(a)
    flat_a = a.reshape(-1, 3, 3)
    flat = lam.reshape(-1, 3)
    scale = np.max(np.abs(flat), axis=1)
    safe = np.where(scale > 0, scale, 1.0)
    gaps = (flat[:, 1] - flat[:, 0]) * (flat[:, 2] - flat[:, 1]) * (flat[:, 2] - flat[:, 0]) / safe**3
    for i in np.flatnonzero((gaps * gaps < DISCRIMINANT_TOL) & (scale > 0)):
        flat[i] = jacobi_eigh3(flat_a[i])[0]
    return flat.reshape(lam.shape)


def cubic_discriminant(a, eigenvalues=None) -> float:
    """Scale-free discriminant: product of squared eigenvalue gaps over scale^6."""
    lam = eigvalsh3(a) if eigenvalues is None else eigenvalues
    scale = float(np.max(np.abs(lam)))
    if scale == 0.0:
        return 0.0
    g01, g12, g02 = lam[1] - lam[0], lam[2] - lam[1], lam[2] - lam[0]
    return float(((g01 / scale) * (g12 / scale) * (g02 / scale)) ** 2)


def jacobi_eigh3(a, max_sweeps=50):
    """Cyclic Jacobi eigen-decomposition; returns (ascending values, column vectors)."""
    m = np.array(a, dtype=float)
    v = np.eye(3)
    norm = math.sqrt(float(np.sum(m * m))) or 1.0
    for _ in range(max_sweeps):
        off = m[0, 1] ** 2 + m[0, 2] ** 2 + m[1, 2] ** 2
        if math.sqrt(off) <= 1e-17 * norm:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            if abs(m[p, q]) <= 1e-18 * norm:
                continue
            theta = (m[q, q] - m[p, p]) / (2.0 * m[p, q])
            t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            rot = np.eye(3)
            rot[p, p] = rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            m = rot.T @ m @ rot
            v = v @ rot
    vals = np.diag(m).copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], v[:, order]


def _null_vector(b):
    # eigenvector of a simple eigenvalue: the largest cross product of two rows of (A - lam I)
    crosses = [np.cross(b[0], b[1]), np.cross(b[0], b[2]), np.cross(b[1], b[2])]
    best = max(crosses, key=lambda c: float(c @ c))
    n = math.sqrt(float(best @ best))
    return best / n if n > 0 else None


def _orient(v):
    # deterministic sign: largest-magnitude component positive
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


def eigh3(a):
    """Ascending eigenvalues and orthonormal eigenvectors (as columns) of a symmetric 3x3.

    Uses the closed-form eigenvalues when the spectrum is well separated and
    Jacobi rotations otherwise.
    """
    a = np.asarray(a, dtype=float)
    lam = eigvalsh3(a)
    if cubic_discriminant(a, lam) < DISCRIMINANT_TOL:
        lam, vecs = jacobi_eigh3(a)
        return lam, np.column_stack([_orient(vecs[:, k]) for k in range(3)])
    eye = np.eye(3)
    v0 = _null_vector(a - lam[0] * eye)
    v2 = _null_vector(a - lam[2] * eye)
    if v0 is None or v2 is None:
        lam, vecs = jacobi_eigh3(a)
        return lam, np.column_stack([_orient(vecs[:, k]) for k in range(3)])
    # re-orthogonalize the extreme vectors, then complete the frame
    v2 = v2 - (v2 @ v0) * v0
    v2 /= np.linalg.norm(v2)
    v1 = np.cross(v2, v0)
    vecs = np.column_stack([_orient(v0), _orient(v1), _orient(v2)])
    return lam, vecs
