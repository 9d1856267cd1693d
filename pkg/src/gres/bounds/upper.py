"""Upper bounds: minimise Lambda over charts of the free-state boundary."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from ..config import TOL
from ..criteria import is_classical, is_fully_separable_symmetric, is_separable_two_mode
from ..exceptions import Unsupported
from ..optimize import (
    Objective,
    low_discrepancy,
    minimize_scalar_screened,
    multi_start_minimize,
    screened_starts,
)
from ..symplectic import SymmetricSpec
from .families import SINGLE, TWO_MODE, classify_input
from . import _small
from .lambda_ import lambda_fast
from .result import BoundResult, check_resource

DEFAULT_STARTS = 8
#: candidate pool screened for the multi-start searches
POOL = 64
#: NM tolerance on the (log-)chart coordinates
CHART_TOL = 1e-7
#: looser tolerance for the exploratory runs of a multi-start search
EXPLORE_TOL = 1e-4
#: evaluation budget per local search
MAX_EVAL = 4000
#: box for the Cholesky factors ``(l11, l21, l22)`` of both blocks in the two-mode charts
CHOL_BOX = (np.array([0.0, -3.0, 0.0, 0.0, -3.0, 0.0]), np.full(6, 3.0))
#: box for the ``(s, phi)`` unit-trace directions of both blocks in the split chart
SPLIT_BOX = (np.array([0.0, -math.pi, 0.0, -math.pi]), np.array([1.0, 2 * math.pi, 1.0, 2 * math.pi]))
#: smallest thermal exponent allowed in the symmetric chart (nu = e^{2s})
S_FLOOR = 1e-7


def _eigenframe(gamma: np.ndarray):
    """Rotation ``R`` (det +1) and eigenvalues ``(lmax, lmin)`` of a 2x2 CM."""
    w, v = np.linalg.eigh(gamma)
    R = v[:, ::-1].copy()
    if np.linalg.det(R) < 0:
        R[:, 1] *= -1.0
    return R, w[::-1]


# --- single mode ----------------------------------------------------------

def single_mode_upper(gamma: np.ndarray, chart: str = "axis") -> BoundResult:
    """Nonclassicality upper bound for one mode.

    ``chart='axis'`` searches ``sigma = R diag(e^t, 1) R^T`` in the
    eigenframe of ``gamma`` (one parameter); ``chart='boundary'`` searches the
    whole classical boundary ``I + w w^T`` via ``(log a, log b)``.
    """
    if is_classical(gamma):
        return BoundResult(1.0, "free", True)
    R, (lmax, lmin) = _eigenframe(gamma)
    span = float(np.log(lmax + 1.0 / lmin)) + 2.0

    if chart == "axis":
        # Lambda is invariant under the joint rotation R^T (.) R
        def f(t):
            return _lam1(lmax, lmin, np.exp(t), 1.0)

        res = minimize_scalar_screened(f, 0.0, span, grid=33, tol=1e-10)
        return BoundResult(res.best_value, "numeric", res.converged, tuple(res.best_point), res.evaluations)

    if chart != "boundary":
        raise ValueError(f"unknown chart {chart!r}")

    def g(x):
        a, b = np.exp(x)
        c = np.sqrt((a - 1.0) * (b - 1.0))
        return lambda_fast(gamma, np.array([[a, c], [c, b]]))

    obj = Objective(2, g, np.zeros(2), np.full(2, span))
    starts = screened_starts(obj, low_discrepancy(obj.lower, obj.upper, 32), DEFAULT_STARTS)
    res = multi_start_minimize(obj, starts, tol=CHART_TOL)
    return BoundResult(res.best_value, "numeric", res.converged, tuple(res.best_point), res.evaluations)


# --- two-mode standard form -----------------------------------------------

def _blocks(gamma):
    X = (gamma[0, 0], gamma[0, 1], gamma[1, 0], gamma[1, 1])
    P = (gamma[2, 2], gamma[2, 3], gamma[3, 2], gamma[3, 3])
    return X, P


def _lam2(X, P, Xs, Ps) -> float:
    return _small.lambda_two_mode(X, P, Xs, Ps, TOL.nu_floor)


def _lam1(x, p, xs, ps) -> float:
    return _small.lambda_one_mode(x, p, xs, ps, TOL.nu_floor)


def classical_scale(g, d) -> float | None:
    """Smallest ``t >= 0`` with ``g + t d >= I`` for symmetric 2x2 tuples ``(m11, m12, m22)``.

    ``lambda_min(g - I + t d)`` is nondecreasing for ``d >= 0`` and crosses
    zero at the largest root of the quadratic ``det(g - I + t d)``, provided
    the trace there is nonnegative; otherwise (rank-one ``d`` pointing the
    wrong way) it never does and ``None`` is returned.
    """
    A = (g[0] - 1.0, g[1], g[2] - 1.0)
    if A[0] >= 0.0 and A[2] >= 0.0 and A[0] * A[2] - A[1] * A[1] >= 0.0:
        return 0.0
    p0, p1, p2 = _sym_det_poly(A, d)
    if p2 > 1e-300:
        disc = p1 * p1 - 4.0 * p2 * p0
        if disc < 0.0:
            return None
        # numerically stable largest root
        q = -0.5 * (p1 + math.copysign(math.sqrt(disc), p1))
        roots = [q / p2, p0 / q if q != 0.0 else -math.inf]
        t = max(roots)
    elif abs(p1) > 1e-300:
        t = -p0 / p1
    else:
        return None
    if t <= 0.0 or A[0] + A[2] + t * (d[0] + d[2]) < 0.0:
        return None
    return t


def _chol_directions(x):
    return _gram(x[0], x[1], x[2]), _gram(x[3], x[4], x[5])


def _unit_trace(s, phi):
    """PSD 2x2 direction with trace 1, as ``(m11, m12, m22)``; ``s`` in [0, 1]."""
    z, w = s * math.cos(phi), 0.5 * s * math.sin(phi)
    return (0.5 * (1.0 + z), w, 0.5 * (1.0 - z))


def _split_directions(x):
    return _unit_trace(x[0], x[1]), _unit_trace(x[2], x[3])


def _classical_scales(gx, gp, dx, dp, split: bool):
    tx, tp = classical_scale(gx, dx), classical_scale(gp, dp)
    if tx is None or tp is None:
        return None
    return (tx, tp) if split else (max(tx, tp),) * 2


def _classical_chart(gamma, split: bool = False):
    """Free states ``gamma + (tx Dx (+) tp Dp)`` on the classical boundary.

    Finite Lambda needs ``sigma >= gamma`` and classicality ``sigma >= I``.
    The Cholesky chart (6 parameters) uses one scale ``tx = tp``, the
    smallest achieving both. The split chart (4 parameters) moves each block
    onto the boundary on its own. It is much better conditioned when the
    optimum has both blocks on the boundary, but cannot leave one inside.
    """
    X, P = _blocks(gamma)
    gx = (X[0], X[1], X[3])
    gp = (P[0], P[1], P[3])
    directions = _split_directions if split else _chol_directions

    def f(x):
        dx, dp = directions(x)
        scales = _classical_scales(gx, gp, dx, dp, split)
        if scales is None:
            return np.inf
        tx, tp = scales
        sx = (gx[0] + tx * dx[0], gx[1] + tx * dx[1], gx[2] + tx * dx[2])
        sp = (gp[0] + tp * dp[0], gp[1] + tp * dp[1], gp[2] + tp * dp[2])
        return _lam2(X, P, (sx[0], sx[1], sx[1], sx[2]), (sp[0], sp[1], sp[1], sp[2]))

    return f


def free_state_from_point(gamma, point) -> np.ndarray:
    """Classical CM behind a two-mode nonclassicality upper-bound point.

    Accepts the 6-parameter Cholesky point or the 4-parameter split point
    reported in :attr:`BoundResult.point`.
    """
    gamma = np.asarray(gamma, dtype=float)
    split = len(point) == 4
    X, P = _blocks(gamma)
    gx, gp = (X[0], X[1], X[3]), (P[0], P[1], P[3])
    dx, dp = (_split_directions if split else _chol_directions)(point)
    scales = _classical_scales(gx, gp, dx, dp, split)
    if scales is None:
        raise ValueError("point does not reach the classical boundary")
    sigma = gamma.copy()
    for (i, j), t, d in (((0, 1), scales[0], dx), ((2, 3), scales[1], dp)):
        sigma[i, i] += t * d[0]
        sigma[i, j] += t * d[1]
        sigma[j, i] += t * d[1]
        sigma[j, j] += t * d[2]
    return sigma


def _two_mode_nonclassicality(gamma, starts: int) -> BoundResult:
    best = None
    evals = 0
    for split, (lo, hi) in ((False, CHOL_BOX), (True, SPLIT_BOX)):
        obj = Objective(len(lo), _classical_chart(gamma, split), lo, hi)
        seeds = screened_starts(obj, low_discrepancy(lo, hi, 4 * POOL), starts)
        if not seeds:
            continue
        res = multi_start_minimize(obj, seeds, tol=CHART_TOL, max_eval=MAX_EVAL, explore_tol=EXPLORE_TOL)
        evals += res.evaluations
        if best is None or res.best_value < best.best_value:
            best = res
    if best is None:
        return BoundResult(np.inf, "numeric", False)
    return BoundResult(best.best_value, "numeric", best.converged, tuple(best.best_point), evals)


def _sym_det_poly(A, B):
    """Coefficients of ``det(A + t B)`` for symmetric 2x2 tuples ``(m11, m12, m22)``."""
    return (
        A[0] * A[2] - A[1] * A[1],
        A[0] * B[2] + A[2] * B[0] - 2.0 * A[1] * B[1],
        B[0] * B[2] - B[1] * B[1],
    )


def _sym_trace_prod(A, B):
    return A[0] * B[0] + 2.0 * A[1] * B[1] + A[2] * B[2]


def _gram(l0, l1, l2):
    """``L L^T`` for ``L = [[l0, 0], [l1, l2]]``."""
    return (l0 * l0, l0 * l1, l1 * l1 + l2 * l2)


def ppt_scale(gx, gpt, dx, dpt) -> float | None:
    """Smallest ``t > 0`` putting ``(gx + t dx) (+) (gpt + t dpt)`` on the PPT boundary.

    ``gpt, dpt`` are the partially transposed p blocks. With ``X, P`` the
    blocks, ``f(t) = det X det P - tr(X P) + 1 = (nu1^2 - 1)(nu2^2 - 1)``.
    Symplectic eigenvalues grow monotonically under PSD additions, so the
    sign of ``f`` changes exactly once.
    """
    px, pp = _sym_det_poly(gx, dx), _sym_det_poly(gpt, dpt)
    tr = (
        _sym_trace_prod(gx, gpt),
        _sym_trace_prod(gx, dpt) + _sym_trace_prod(dx, gpt),
        _sym_trace_prod(dx, dpt),
    )

    def f(t):
        return (px[0] + t * (px[1] + t * px[2])) * (pp[0] + t * (pp[1] + t * pp[2])) - (
            tr[0] + t * (tr[1] + t * tr[2])
        ) + 1.0

    if f(0.0) >= 0.0:
        return 0.0
    hi = 1.0
    for _ in range(80):
        if f(hi) > 0.0:
            return brentq(f, 0.0, hi, xtol=1e-15, rtol=1e-15)
        hi *= 2.0
    return None


def _separable_chart(gamma):
    """Free states ``gamma + t (Lx Lx^T (+) Lp Lp^T)`` on the PPT boundary.

    Finite Lambda needs ``sigma >= gamma``, so this covers every useful
    x-p block-diagonal separable state; a rank-deficient ``L`` is a box bound.
    """
    X, P = _blocks(gamma)
    gx = (X[0], X[1], X[3])
    gp = (P[0], P[1], P[3])
    gpt = (P[0], -P[1], P[3])

    def f(x):
        dx = _gram(x[0], x[1], x[2])
        dp = _gram(x[3], x[4], x[5])
        t = ppt_scale(gx, gpt, dx, (dp[0], -dp[1], dp[2]))
        if t is None:
            return np.inf
        sx = (gx[0] + t * dx[0], gx[1] + t * dx[1], gx[2] + t * dx[2])
        sp = (gp[0] + t * dp[0], gp[1] + t * dp[1], gp[2] + t * dp[2])
        return _lam2(X, P, (sx[0], sx[1], sx[1], sx[2]), (sp[0], sp[1], sp[1], sp[2]))

    return f


def _two_mode_entanglement(gamma, starts: int) -> BoundResult:
    lo, hi = CHOL_BOX
    obj = Objective(6, _separable_chart(gamma), lo, hi)
    seeds = screened_starts(obj, low_discrepancy(lo, hi, 4 * POOL), starts)
    if not seeds:
        return BoundResult(np.inf, "numeric", False)
    res = multi_start_minimize(obj, seeds, tol=CHART_TOL, max_eval=MAX_EVAL, explore_tol=EXPLORE_TOL)
    return BoundResult(res.best_value, "numeric", res.converged, tuple(res.best_point), res.evaluations)


# --- symmetric states ------------------------------------------------------

def _symmetric_nonclassicality(spec: SymmetricSpec) -> BoundResult:
    first, rest = spec.mode_blocks()
    r1 = single_mode_upper(first)
    r2 = single_mode_upper(rest)
    return BoundResult(
        float(r1.value * r2.value ** (spec.n - 1)),
        "numeric:decomposed",
        r1.converged and r2.converged,
        r1.point + r2.point,
        r1.evaluations + r2.evaluations,
    )


def symmetric_free_blocks(s1: float, r1: float, s2: float):
    """Normal-mode blocks of a symmetric free state on the full-separability boundary."""
    r2 = s1 + s2 - r1
    sig1 = np.diag([np.exp(2 * s1 + 2 * r1), np.exp(2 * s1 - 2 * r1)])
    sig2 = np.diag([np.exp(2 * s2 - 2 * r2), np.exp(2 * s2 + 2 * r2)])
    return sig1, sig2


def _symmetric_entanglement(spec: SymmetricSpec, starts: int) -> BoundResult:
    if spec.c1 < 0 or spec.c2 < 0:
        raise Unsupported("symmetric entanglement bounds need c1, c2 >= 0")
    rho1, rho2 = spec.mode_blocks()
    m = spec.n - 1

    e, g, f_, h = rho1[0, 0], rho1[1, 1], rho2[0, 0], rho2[1, 1]

    def f(x):
        sig1, sig2 = symmetric_free_blocks(*x)
        l1 = _lam1(e, g, sig1[0, 0], sig1[1, 1])
        if not np.isfinite(l1):
            return np.inf
        return l1 * _lam1(f_, h, sig2[0, 0], sig2[1, 1]) ** m

    span = float(max(3.0, 0.5 * np.log(max(spec.e, spec.h) / min(spec.f, spec.g)) + 2.0))
    lo = np.array([S_FLOOR, -span, S_FLOOR])
    hi = np.array([span, span, span])
    obj = Objective(3, f, lo, hi)
    # the finite region can be a few percent of the box at weak squeezing
    seeds = screened_starts(obj, low_discrepancy(lo, hi, 16 * POOL), starts)
    if not seeds:
        return BoundResult(np.inf, "numeric:decomposed", False)
    res = multi_start_minimize(obj, seeds, tol=CHART_TOL)
    return BoundResult(
        res.best_value, "numeric:decomposed", res.converged, tuple(res.best_point), res.evaluations
    )


# --- public entry point ------------------------------------------------------

def upper_bound(state, resource: str, starts: int = DEFAULT_STARTS) -> BoundResult:
    """Numeric upper bound ``inf Lambda`` over a chart of free states.

    ``state`` is a single-mode CM, a two-mode standard form (CM or
    :class:`~gres.symplectic.TwoModeStandardForm`), a
    :class:`~gres.symplectic.SymmetricSpec` or a GHZ spec. The returned value
    is not clamped; a non-converged search is flagged, not raised.
    """
    check_resource(resource)
    fam = classify_input(state)
    gamma = fam.gamma
    if resource == "nonclassicality" and is_classical(gamma):
        return BoundResult(1.0, "free", True)

    if fam.kind == SINGLE:
        if resource == "entanglement":
            return BoundResult(1.0, "free", True)
        return single_mode_upper(gamma)
    if fam.kind == TWO_MODE:
        if resource == "nonclassicality":
            return _two_mode_nonclassicality(gamma, starts)
        if is_separable_two_mode(gamma):
            return BoundResult(1.0, "free", True)
        return _two_mode_entanglement(gamma, starts)

    spec = fam.spec
    if resource == "nonclassicality":
        return _symmetric_nonclassicality(spec)
    if spec.c1 >= 0 and spec.c2 >= 0 and is_fully_separable_symmetric(spec):
        return BoundResult(1.0, "free", True)
    return _symmetric_entanglement(spec, starts)


__all__ = ["upper_bound", "single_mode_upper", "symmetric_free_blocks", "ppt_scale", "free_state_from_point"]
