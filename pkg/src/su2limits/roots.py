"""Simultaneous polynomial root finding (Aberth-Ehrlich iteration)."""

import math

import numpy as np

# fixed irrational offsets keep the starting circle away from symmetric root sets
_ANGLE_OFFSET = math.sqrt(2) - 1
_RADIUS_JITTER = (math.sqrt(5) - 1) / 2


# backward errors below this are rounding noise for unit-norm coefficients
MERGE_FLOOR = 1e-15


def _horner(coeffs_desc, z):
    p = 0j
    dp = 0j
    mag = 0.0
    az = abs(z)
    for c in coeffs_desc:
        dp = dp * z + p
        p = p * z + c
        mag = mag * az + abs(c)
    return p, dp, mag


def aberth_roots(coeffs, tol=1e-13, max_iter=500, polish_sweeps=2):
    """All roots of ``sum(coeffs[k] * z**k)``; ``coeffs`` in ascending order.

    The leading coefficient must be nonzero.  Iteration stops once every
    residual ``|P(z)|`` is below ``tol`` times the rounding scale
    ``sum |c_k| |z|^k``, or after ``max_iter`` sweeps, then applies
    ``polish_sweeps`` further sweeps.
    """
    a = np.asarray(coeffs, dtype=complex)
    deg = a.size - 1
    if deg < 1:
        return np.zeros(0, dtype=complex)
    if a[-1] == 0:
        raise ValueError("leading coefficient must be nonzero")
    # exact zero roots first
    n_zero = 0
    while n_zero < deg and a[n_zero] == 0:
        n_zero += 1
    a = a[n_zero:]
    d = a.size - 1
    roots = np.zeros(n_zero, dtype=complex)
    if d == 0:
        return roots
    if d == 1:
        return np.concatenate([roots, [-a[0] / a[1]]])
    desc = a[::-1]
    radius = abs(a[0] / a[-1]) ** (1.0 / d)
    k = np.arange(d)
    z = radius * (1 + 0.01 * _RADIUS_JITTER * np.cos(k)) * np.exp(
        1j * (2 * np.pi * k / d + _ANGLE_OFFSET)
    )
    z = list(z)
    for _ in range(max_iter):
        converged = True
        for i in range(d):
            p, dp, mag = _horner(desc, z[i])
            if abs(p) <= tol * mag:
                continue
            converged = False
            z[i] = _aberth_step(desc, z, i, radius, p, dp)
        if converged:
            break
    # the residual test stops early inside tight clusters (root error ~ tol / gap**2);
    # a couple of unconditional sweeps take simple roots down to rounding level
    for _ in range(polish_sweeps):
        for i in range(d):
            p, dp, _mag = _horner(desc, z[i])
            if p != 0:
                z[i] = _aberth_step(desc, z, i, radius, p, dp)
    return np.concatenate([roots, np.array(z)])


def _aberth_step(desc, z, i, radius, p, dp):
    if dp == 0:
        return z[i] + radius * 1e-3 * complex(math.cos(i + 1), math.sin(i + 1))
    ratio = p / dp
    repulsion = sum(1.0 / (z[i] - z[j]) for j in range(len(z)) if j != i and z[i] != z[j])
    step = ratio / (1.0 - ratio * repulsion)
    return z[i] - step if np.isfinite(step) else z[i]


def _backward_error(coeffs, roots):
    # least-squares scale instead of fixing the leading coefficient: for roots
    # far from the origin the leading term is the least accurate one
    a = np.asarray(coeffs, dtype=complex)
    monic = np.poly(roots)[::-1]
    scale = np.vdot(monic, a) / np.vdot(monic, monic)
    return float(np.linalg.norm(scale * monic - a) / np.linalg.norm(a))


def _newton(coeffs_desc, z, steps=60):
    for _ in range(steps):
        p, dp, _mag = _horner(coeffs_desc, z)
        if dp == 0:
            break
        step = p / dp
        z -= step
        if abs(step) <= 1e-16 * (1 + abs(z)):
            break
    return z


def merge_clusters(coeffs, roots, radii=(0.1, 1e-2, 1e-3, 1e-4, 1e-5)):
    """Collapse tight root clusters onto refined multiple roots.

    Any iteration resolves an m-fold root only to about ``eps**(1/m)``.  The
    multiple root is however a simple root of the (m-1)-th derivative, so a
    cluster's tightest m members are replaced by that root, polished by Newton
    steps on the derivative, and the remaining roots are re-solved from the
    quotient ``P / (z - c)**m``.  Every candidate, including no merge, is
    scored by the backward error of the whole root set (how well the
    polynomial rebuilt from the roots matches ``coeffs``) and the best one is
    kept.  Clusters are searched at a decreasing ladder of ``radii`` so nested
    structure is still isolated.
    """
    roots = np.array(roots, dtype=complex)
    if roots.size < 2:
        return roots
    a = np.asarray(coeffs, dtype=complex)
    err = _backward_error(a, roots)
    for radius in radii:
        while True:
            trial, trial_err = _best_merge(a, roots, radius, err)
            if trial is None:
                break
            roots, err = trial, trial_err
    return roots


def _clusters(roots, radius):
    unassigned = list(range(roots.size))
    while unassigned:
        members = [unassigned.pop(0)]
        grew = True
        while grew:
            grew = False
            for j in list(unassigned):
                if min(abs(roots[j] - roots[m]) for m in members) < radius * (1 + abs(roots[j])):
                    members.append(j)
                    unassigned.remove(j)
                    grew = True
        if len(members) > 1:
            yield members


def _polish_multiple(a, guess, m):
    if abs(guess) > 1:
        # polish 1/z on the reversed polynomial, better conditioned far out
        return 1 / _newton(np.polyder(a, m - 1), 1 / guess)
    return _newton(np.polyder(a[::-1], m - 1), guess)


def _deflate(a, center, m):
    """Ascending coefficients of ``P / (z - center)**m``, remainder dropped."""
    q = np.asarray(a, dtype=complex)
    for _ in range(m):
        if abs(center) <= 1:
            # forward synthetic division on descending coefficients
            desc = q[::-1]
            out = np.empty(desc.size - 1, dtype=complex)
            acc = 0j
            for k in range(out.size):
                acc = acc * center + desc[k]
                out[k] = acc
            q = out[::-1]
        else:
            # divide the reversed polynomial by (y - 1/center); stable for |center| > 1
            inv = 1 / center
            out = np.empty(q.size - 1, dtype=complex)
            acc = 0j
            for k in range(out.size):
                acc = acc * inv + q[k]
                out[k] = acc
            q = out
    return q


def _tightest(roots, members, m):
    best = None
    for i in members:
        near = sorted(members, key=lambda j: abs(roots[j] - roots[i]))[:m]
        spread = max(abs(roots[j] - roots[i]) for j in near)
        if best is None or spread < best[0]:
            best = (spread, near)
    return best[1]


def _best_merge(a, roots, radius, err):
    # candidates reconstruct the coefficients to rounding whatever the split,
    # so among those within reach of the best error the highest multiplicity wins
    candidates = [(0, err, None)]
    for members in _clusters(roots, radius):
        vals = roots[members]
        existing = max(int(np.sum(vals == v)) for v in vals)
        for m in range(len(members), existing, -1):
            chosen = _tightest(roots, members, m)
            center = _polish_multiple(a, complex(np.mean(roots[chosen])), m)
            quotient = _deflate(a, center, m)
            rest = np.zeros(0, dtype=complex)
            if quotient.size > 1:
                rest = merge_clusters(quotient, aberth_roots(quotient), (radius,))
            trial = np.concatenate([np.full(m, center), rest])
            candidates.append((m, _backward_error(a, trial), trial))
    best_err = min(c[1] for c in candidates)
    reach = max(10 * best_err, MERGE_FLOOR)
    eligible = [c for c in candidates if c[1] <= reach]
    m, trial_err, trial = max(eligible, key=lambda c: (c[0], -c[1]))
    return trial, trial_err
