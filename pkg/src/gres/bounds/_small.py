"""Scalar-arithmetic Lambda for x-p uncorrelated one- and two-mode CMs.

Same algorithm as :func:`gres.bounds.lambda_.lambda_xp`, written out for
2x2 blocks (stored as 4-tuples ``(m11, m12, m21, m22)``) because NumPy call
overhead dominates at this size. Used in optimiser inner loops.
"""

from __future__ import annotations

import math

INF = float("inf")


def _mul(a, b):
    return (
        a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3],
    )


def _t(a):
    return (a[0], a[2], a[1], a[3])


def _det(a):
    return a[0] * a[3] - a[1] * a[2]


def _inv(a):
    d = _det(a)
    return (a[3] / d, -a[1] / d, -a[2] / d, a[0] / d)


def _sym_eig(a):
    """Eigenvalues (ascending) and rotation angle of the larger eigenvector."""
    m = 0.5 * (a[0] + a[3])
    h = math.hypot(0.5 * (a[0] - a[3]), 0.5 * (a[1] + a[2]))
    return m - h, m + h, 0.5 * math.atan2(a[1] + a[2], a[0] - a[3])


def _sym_sqrt(a):
    """Principal square root of a 2x2 symmetric positive definite matrix."""
    s = math.sqrt(_det(a))
    t = math.sqrt(a[0] + a[3] + 2.0 * s)
    return ((a[0] + s) / t, a[1] / t, a[2] / t, (a[3] + s) / t)


def _min_eig(a):
    return _sym_eig(a)[0]


def _edge_value(t_sq_hi, t_sq_lo, t_floor):
    """Symplectic eigenvalues ``t = 1 / nu''`` from the eigenvalues of ``t^2``.

    Round-off can push a vanishing ``t^2`` slightly negative; such values
    are clamped. Returns ``None`` when ``rho''`` would be unphysical.
    """
    t_hi = math.sqrt(max(t_sq_hi, 0.0))
    t_lo = math.sqrt(max(t_sq_lo, 0.0))
    if t_hi > 1.0 + t_floor:
        return None
    return min(t_hi, 1.0), min(t_lo, 1.0)


def lambda_two_mode(X, P, Xs, Ps, t_floor):
    """Lambda for ``gamma = X (+) P`` and ``gamma_sigma = Xs (+) Ps`` (2x2 tuples)."""
    if _min_eig(Xs) <= 0.0 or _min_eig(Ps) <= 0.0:
        return INF
    scale = max(Xs[0], Xs[3], 1.0)
    dx = tuple(p - q for p, q in zip(Xs, X))
    dp = tuple(p - q for p, q in zip(Ps, P))
    if _min_eig(dx) < -1e-12 * scale or _min_eig(dp) < -1e-12 * scale:
        return INF

    root = _sym_sqrt(Xs)
    inv_root = _inv(root)
    lo, hi, th = _sym_eig(_mul(_mul(root, Ps), root))
    if lo <= 0.0:
        return INF
    c, s = math.cos(th), math.sin(th)
    O = (c, -s, s, c)  # columns: eigenvectors for hi, lo
    nu = (math.sqrt(hi), math.sqrt(lo))
    u = tuple((v - 1.0) / (v + 1.0) for v in nu)
    if min(u) <= 1e-12:
        return INF
    sn = (math.sqrt(nu[0]), math.sqrt(nu[1]))
    A = _mul(root, O)
    A = (A[0] / sn[0], A[1] / sn[1], A[2] / sn[0], A[3] / sn[1])
    Ai = _mul(_t(O), inv_root)
    Ai = (Ai[0] * sn[0], Ai[1] * sn[0], Ai[2] * sn[1], Ai[3] * sn[1])
    Xp = _mul(_mul(Ai, X), _t(Ai))
    Pp = _mul(_mul(_t(A), P), A)
    Xp = (Xp[0] + 1.0, 0.5 * (Xp[1] + Xp[2]), 0.5 * (Xp[1] + Xp[2]), Xp[3] + 1.0)
    Pp = (Pp[0] + 1.0, 0.5 * (Pp[1] + Pp[2]), 0.5 * (Pp[1] + Pp[2]), Pp[3] + 1.0)

    g = (1.0 / math.sqrt(u[0]), 1.0 / math.sqrt(u[1]))

    def rescale(M):
        Mi = _inv(M)
        off = g[0] * g[1] * (Mi[1] + Mi[2])
        return (
            g[0] * g[0] * (2.0 * Mi[0] - 1.0) + 1.0, off,
            off, g[1] * g[1] * (2.0 * Mi[3] - 1.0) + 1.0,
        )

    # c = 2 (gamma'' + I)^-1 blockwise; it stays finite on the edge of existence
    cx, cp = rescale(Xp), rescale(Pp)
    tol = -1e-10 * max(g[0] * g[0], g[1] * g[1], 1.0)
    if _min_eig(cx) < tol or _min_eig(cp) < tol:
        return INF
    bx = (2.0 - cx[0], -cx[1], -cx[2], 2.0 - cx[3])
    bp = (2.0 - cp[0], -cp[1], -cp[2], 2.0 - cp[3])
    if _min_eig(bx) <= 0.0 or _min_eig(bp) <= 0.0:
        return INF
    # gamma''^-1 = c (2 - c)^-1 per block; t^2 = eig(Mx Mp)
    dbx, dbp = _det(bx), _det(bp)
    prod = _mul(_mul(cx, _inv(bx)), _mul(cp, _inv(bp)))
    tr, det = prod[0] + prod[3], _det(cx) * _det(cp) / (dbx * dbp)
    disc = max(tr * tr - 4.0 * det, 0.0)
    e_hi = 0.5 * (tr + math.sqrt(disc))
    e_lo = det / e_hi if e_hi > 0.0 else 0.0
    t = _edge_value(e_hi, e_lo, t_floor)
    if t is None:
        return INF
    denom = _det(Xp) * _det(Pp) * dbx * dbp
    if not denom > 0.0:
        return INF
    return 16.0 / ((1.0 - u[0]) * (1.0 - u[1]) * (1.0 + t[0]) * (1.0 + t[1]) * math.sqrt(denom))


def lambda_one_mode(x, p, xs, ps, t_floor):
    """Lambda for ``gamma = diag(x, p)`` and ``gamma_sigma = diag(xs, ps)``."""
    if xs <= 0.0 or ps <= 0.0:
        return INF
    scale = max(xs, 1.0)
    if xs - x < -1e-12 * scale or ps - p < -1e-12 * scale:
        return INF
    nu = math.sqrt(xs * ps)
    u = (nu - 1.0) / (nu + 1.0)
    if u <= 1e-12:
        return INF
    # S = diag(sqrt(xs / nu), sqrt(ps / nu))
    xp = x * nu / xs + 1.0
    pp = p * nu / ps + 1.0
    cx = (2.0 / xp - 1.0) / u + 1.0
    cp = (2.0 / pp - 1.0) / u + 1.0
    tol = -1e-10 * max(1.0 / u, 1.0)
    if cx < tol or cp < tol or cx >= 2.0 or cp >= 2.0:
        return INF
    t = _edge_value(cx * cp / ((2.0 - cx) * (2.0 - cp)), 0.0, t_floor)
    if t is None:
        return INF
    return 4.0 / ((1.0 - u) * (1.0 + t[0]) * math.sqrt(xp * pp * (2.0 - cx) * (2.0 - cp)))
