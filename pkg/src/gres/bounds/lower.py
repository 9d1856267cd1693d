"""Lower bounds from Gaussian witness states.

For a witness with CM ``gamma_w`` the nonclassicality robustness obeys
``R >= sqrt(det(gamma_w + I) / det(gamma_w + gamma))``; for entanglement
``I`` is replaced by the infimum over product squeezed states. The best
witnesses are infinitely large, so the searches run over closed-form limit
charts rather than over large finite matrices.

Two-mode chart coordinates: the witness blocks satisfy
``c_wj / a_wj -> p_j`` and ``a_wj b_wj - c_wj^2 = eps_j |c_wj|``; witness
physicality then restricts ``|p q|`` to ``[x_-, x_+]`` (see
:func:`~gres.bounds.exact.x_minus`), parameterised here by
``tau in [0, 1]`` through ``log|pq| = (2 tau - 1) log x_+``.
"""

from __future__ import annotations

import math

import numpy as np

from ..exceptions import InvalidArgument, Unsupported
from ..optimize import (
    Objective,
    low_discrepancy,
    minimize_scalar_screened,
    multi_start_minimize,
    screened_starts,
)
from ..symplectic import SymmetricSpec, TwoModeStandardForm, as_cm, num_modes
from ..criteria import is_classical, is_separable_two_mode
from .exact import block_value, single_mode_value, x_plus
from .families import SINGLE, TWO_MODE, classify_input
from .result import BoundResult, check_resource

#: range of log|p| searched by the two-mode charts
LOG_P_SPAN = 9.0
#: eps_j = expm1(e_j) with e_j in [0, EPS_LOG_MAX]
EPS_LOG_MAX = math.log1p(200.0)
CHART_TOL = 1e-9
EXPLORE_TOL = 1e-5
MAX_EVAL = 4000
STARTS = 8
POOL = 128


# --- finite witnesses -------------------------------------------------------

def witness_ratio(gamma, gamma_w) -> float:
    """``sqrt(det(gamma_w + I) / det(gamma_w + gamma))`` for a physical witness CM."""
    gamma, gamma_w = as_cm(gamma), as_cm(gamma_w)
    if gamma.shape != gamma_w.shape:
        raise InvalidArgument("state and witness CMs differ in size")
    eye = np.eye(gamma.shape[0])
    _, num = np.linalg.slogdet(gamma_w + eye)
    _, den = np.linalg.slogdet(gamma_w + gamma)
    return float(np.exp(0.5 * (num - den)))


def _product_squeezed(logs: np.ndarray) -> np.ndarray:
    x = np.exp(logs)
    return np.diag(np.r_[x, 1.0 / x])


def entanglement_witness_ratio(gamma, gamma_w) -> float:
    """Two-mode witness value with the inner infimum over product squeezed states.

    ``sqrt(inf_{x,y} det(gamma_w + diag(x, y, 1/x, 1/y)) / det(gamma_w + gamma))``;
    the infimum is found numerically in ``(log x, log y)``.
    """
    gamma, gamma_w = as_cm(gamma), as_cm(gamma_w)
    if num_modes(gamma) != 2 or gamma_w.shape != gamma.shape:
        raise Unsupported("entanglement witness ratio is implemented for two modes")

    def logdet(v):
        sign, ld = np.linalg.slogdet(gamma_w + _product_squeezed(v))
        return ld if sign > 0 else np.inf

    span = 2.0 + 0.5 * abs(math.log(np.linalg.cond(gamma_w)))
    obj = Objective(2, logdet, np.full(2, -span), np.full(2, span))
    res = multi_start_minimize(
        obj, [np.zeros(2), np.array([span / 2, -span / 2]), np.array([-span / 2, span / 2])],
        tol=1e-10,
    )
    _, den = np.linalg.slogdet(gamma_w + gamma)
    return float(np.exp(0.5 * (res.best_value - den)))


# --- single-mode chart ------------------------------------------------------

def _single_chart(a: float, b: float, c: float):
    """Witness value on ``(theta, e)``: ``p = tan theta`` and ``eps = expm1(e)``."""

    def value(theta: float, e: float) -> float:
        s, co = math.sin(theta), math.cos(theta)
        eps = math.expm1(e)
        cross = eps * abs(s * co)
        den = b * co * co + a * s * s + cross - 2.0 * c * s * co
        return math.sqrt((1.0 + cross) / den) if den > 0 else 0.0

    return value


def single_mode_lower(gamma) -> BoundResult:
    """Nonclassicality lower bound for one mode over the ``(p, eps)`` witness chart."""
    gamma = as_cm(gamma)
    a, b, c = gamma[0, 0], gamma[1, 1], gamma[0, 1]
    value = _single_chart(a, b, c)
    # the eps direction only lowers the value; scan theta first, then polish both
    scan = minimize_scalar_screened(lambda t: -value(t, 0.0), -0.5 * math.pi, 0.5 * math.pi, grid=65)
    theta0 = float(scan.best_point[0])
    obj = Objective(
        2, lambda x: -value(x[0], x[1]),
        np.array([theta0 - 0.5, 0.0]), np.array([theta0 + 0.5, EPS_LOG_MAX]),
    )
    res = multi_start_minimize(obj, [np.array([theta0, 0.0]), np.array([theta0, 0.5])], tol=CHART_TOL)
    best = max(-res.best_value, -scan.best_value)
    return BoundResult(best, "numeric:witness", res.converged, tuple(res.best_point), res.evaluations + scan.evaluations)


# --- two-mode charts --------------------------------------------------------

def _signs(spec: TwoModeStandardForm) -> tuple:
    return (1.0,) if spec.c1 >= 0 and spec.c2 >= 0 else (1.0, -1.0)


def _pq(log_p: float, sign: float, eps1: float, eps2: float, tau: float):
    log_x = math.log(x_plus(eps1, eps2))
    p = sign * math.exp(log_p)
    q = sign * math.exp((2.0 * tau - 1.0) * log_x - log_p)
    return p, q


def _nc_value(spec, p, q, eps1, eps2) -> float:
    f1 = block_value(spec.a, spec.b, spec.c1, p, eps1)
    f2 = block_value(spec.a, spec.b, spec.c2, q, eps2)
    return math.sqrt(f1 * f2) if f1 > 0 and f2 > 0 else 0.0


def _denominators(spec, p, q, eps1, eps2):
    a, b = spec.a, spec.b
    d1 = b + a * p * p + eps1 * abs(p) - 2.0 * spec.c1 * p
    d2 = b + a * q * q + eps2 * abs(q) - 2.0 * spec.c2 * q
    return d1, d2


def _ent_value_nested(spec, p, q, eps1, eps2) -> float:
    """Entanglement witness value with the product-state infimum done numerically.

    For fixed ``x`` the infimum over ``y`` of ``(A + y)(B + 1/y)`` is
    ``(sqrt(AB) + 1)^2``; the remaining ``x`` is searched in log scale.
    """
    d1, d2 = _denominators(spec, p, q, eps1, eps2)
    if d1 <= 0 or d2 <= 0:
        return 0.0
    ap, aq = abs(p), abs(q)
    pp, qq = p * p, q * q

    def inner(t):
        x = math.exp(t)
        return (eps1 * ap + x * pp) * (eps2 * aq + qq / x)

    if eps1 * eps2 <= 0.0:
        # one cross term vanishes; the infimum is the x -> 0 or x -> inf limit
        best = pp * qq
    else:
        # convex in log x, minimum near where both cross terms balance
        centre = 0.5 * math.log((eps1 * ap * qq) / (eps2 * aq * pp))
        best = minimize_scalar_screened(inner, centre - 8.0, centre + 8.0, grid=5, tol=1e-12).best_value
    num = math.sqrt(max(best, 0.0)) + 1.0
    return num / math.sqrt(d1 * d2)


def _ent_value_closed(spec, p, q, eps1, eps2) -> float:
    d1, d2 = _denominators(spec, p, q, eps1, eps2)
    if d1 <= 0 or d2 <= 0:
        return 0.0
    pq = abs(p * q)
    return (1.0 + pq + math.sqrt(eps1 * eps2 * pq)) / math.sqrt(d1 * d2)


def _maximise(value, lower, upper, seeds=(), starts=STARTS) -> BoundResult:
    obj = Objective(len(lower), lambda x: -value(x), np.asarray(lower, float), np.asarray(upper, float))
    cands = low_discrepancy(obj.lower, obj.upper, POOL)
    chosen = screened_starts(obj, cands, starts, extra=seeds)
    res = multi_start_minimize(obj, chosen, tol=CHART_TOL, max_eval=MAX_EVAL, explore_tol=EXPLORE_TOL)
    return BoundResult(-res.best_value, "numeric", res.converged, tuple(res.best_point), res.evaluations)


def chart_one(spec: TwoModeStandardForm, resource: str) -> BoundResult:
    """Chart (i): ``eps = 0`` and ``q = 1/p``."""
    best = BoundResult(1.0, "chart:eps0", True)
    for sign in _signs(spec):
        def value(t, sign=sign):
            p, q = _pq(t, sign, 0.0, 0.0, 0.5)
            if resource == "nonclassicality":
                return _nc_value(spec, p, q, 0.0, 0.0)
            return _ent_value_closed(spec, p, q, 0.0, 0.0)

        res = minimize_scalar_screened(lambda t: -value(t), -LOG_P_SPAN, LOG_P_SPAN, grid=129, tol=1e-12)
        if -res.best_value > best.value:
            best = BoundResult(-res.best_value, "chart:eps0", res.converged, (sign, float(res.best_point[0])), res.evaluations)
    return best


def chart_two(spec: TwoModeStandardForm, resource: str, seeds=(), tau: float = 0.0) -> BoundResult:
    """Chart (ii): free ``(p, eps1, eps2)`` with ``|pq|`` pinned to an end of ``[x_-, x_+]``.

    ``tau = 0`` gives ``q = x_- / p``; ``tau = 1`` gives the mirror chart
    ``q = x_+ / p``, where the optimum lies when only the second block is
    squeezed below vacuum (``a - c < 1 <= b - c``).
    """
    method = "chart:x-minus" if tau == 0.0 else "chart:x-plus"
    best = BoundResult(1.0, method, True)
    for sign in _signs(spec):
        def value(x, sign=sign):
            e1, e2 = math.expm1(x[1]), math.expm1(x[2])
            p, q = _pq(x[0], sign, e1, e2, tau)
            if resource == "nonclassicality":
                return _nc_value(spec, p, q, e1, e2)
            return _ent_value_closed(spec, p, q, e1, e2)

        res = _maximise(
            value, [-LOG_P_SPAN, 0.0, 0.0], [LOG_P_SPAN, EPS_LOG_MAX, EPS_LOG_MAX],
            seeds=[s for sg, s in seeds if sg == sign],
        )
        if res.value > best.value:
            best = BoundResult(res.value, method, res.converged, (sign,) + res.point, res.evaluations)
    return best


def chart_one_block(spec: TwoModeStandardForm) -> BoundResult:
    """Chart (iii): one witness block taken to ``eps -> inf`` (nonclassicality only)."""
    vx = single_mode_value(spec.a, spec.b, spec.c1)
    vp = single_mode_value(spec.a, spec.b, spec.c2)
    return BoundResult(max(vx, vp), "chart:one-block", True, ("x" if vx >= vp else "p",))


def lower_bound_charted(spec: TwoModeStandardForm, resource: str) -> BoundResult:
    """Best of the two-mode limit charts, floored at 1."""
    check_resource(resource)
    if not isinstance(spec, TwoModeStandardForm):
        spec = classify_input(spec).spec
        if not isinstance(spec, TwoModeStandardForm):
            raise Unsupported("charted lower bounds need a two-mode standard form")
    first = chart_one(spec, resource)
    seeds = []
    if first.point:
        seeds.append((first.point[0], np.array([first.point[1], 0.0, 0.0])))
    results = [first, chart_two(spec, resource, seeds), chart_two(spec, resource, seeds, tau=1.0)]
    if resource == "nonclassicality":
        results.append(chart_one_block(spec))
    best = max(results, key=lambda r: r.value)
    conv = all(r.converged for r in results)
    return BoundResult(max(best.value, 1.0), best.method, conv, best.point, sum(r.evaluations for r in results))


def _two_mode_witness(spec: TwoModeStandardForm, resource: str) -> BoundResult:
    """Full four-parameter chart ``(log p, e1, e2, tau)``."""
    value_fn = _nc_value if resource == "nonclassicality" else _ent_value_nested
    seeds_by_sign = {}
    first = chart_one(spec, resource)
    if first.point:
        seeds_by_sign.setdefault(first.point[0], []).append(np.array([first.point[1], 0.0, 0.0, 0.5]))
    chart_seeds = [(first.point[0], np.array([first.point[1], 0.0, 0.0]))] if first.point else ()
    evals = first.evaluations
    for tau in (0.0, 1.0):
        edge = chart_two(spec, resource, chart_seeds, tau=tau)
        evals += edge.evaluations
        if edge.point:
            sg, lp, e1, e2 = edge.point
            seeds_by_sign.setdefault(sg, []).append(np.array([lp, e1, e2, tau]))

    best = BoundResult(1.0, "numeric:witness", True)
    for sign in _signs(spec):
        def value(x, sign=sign):
            e1, e2 = math.expm1(x[1]), math.expm1(x[2])
            p, q = _pq(x[0], sign, e1, e2, x[3])
            return value_fn(spec, p, q, e1, e2)

        res = _maximise(
            value, [-LOG_P_SPAN, 0.0, 0.0, 0.0], [LOG_P_SPAN, EPS_LOG_MAX, EPS_LOG_MAX, 1.0],
            seeds=seeds_by_sign.get(sign, ()),
        )
        evals += res.evaluations
        if res.value > best.value:
            best = BoundResult(res.value, "numeric:witness", res.converged, (sign,) + res.point)
    if resource == "nonclassicality":
        block = chart_one_block(spec)
        if block.value > best.value:
            best = BoundResult(block.value, "numeric:witness", True, block.point)
    return BoundResult(best.value, best.method, best.converged, best.point, evals)


# --- symmetric states ---------------------------------------------------------

def _symmetric_nonclassicality(spec: SymmetricSpec) -> BoundResult:
    first, rest = spec.mode_blocks()
    l1 = single_mode_lower(first)
    l2 = single_mode_lower(rest)
    return BoundResult(
        l1.value * l2.value ** (spec.n - 1),
        "numeric:witness-decomposed",
        l1.converged and l2.converged,
        l1.point + l2.point,
        l1.evaluations + l2.evaluations,
    )


def symmetric_witness_value(spec: SymmetricSpec, g_w: float, f_w: float) -> float:
    """Limit witness value with ``e_w, h_w -> inf``; the product-state ``x`` is searched numerically."""
    m = spec.n - 1
    f, g = spec.f, spec.g

    def log_num(t):
        x = math.exp(t)
        return math.log(g_w + 1.0 / x) + m * math.log(f_w + x)

    res = minimize_scalar_screened(log_num, -30.0, 30.0, grid=61, tol=1e-12)
    log_den = math.log(g_w + g) + m * math.log(f_w + f)
    return math.exp(0.5 * (res.best_value - log_den))


def _symmetric_entanglement(spec: SymmetricSpec) -> BoundResult:
    if spec.c1 < 0 or spec.c2 < 0:
        raise Unsupported("symmetric entanglement bounds need c1, c2 >= 0")
    if min(spec.f, spec.g) <= 0:
        raise InvalidArgument("symmetric CM has a non-positive normal-mode variance")
    scale = math.log1p(4.0 * spec.n * max(spec.f, spec.g, 1.0))

    def value(x):
        return symmetric_witness_value(spec, math.expm1(x[0]), math.expm1(x[1]))

    seed = np.array([0.0, math.log1p((spec.n - 2) * spec.f)])
    res = _maximise(value, [0.0, 0.0], [scale, scale], seeds=[seed], starts=4)
    return BoundResult(res.value, "numeric:witness-symmetric", res.converged, res.point, res.evaluations)


# --- public entry point ---------------------------------------------------------

def lower_bound_witness(state, resource: str) -> BoundResult:
    """Witness lower bound (unclamped) for a supported state.

    Single mode: ``(p, eps)`` chart. Two-mode standard form: four-parameter
    chart, with the product-squeezed infimum solved numerically for
    entanglement. Symmetric and GHZ states: decomposed into normal modes
    (nonclassicality) or the ``(g_w, f_w)`` limit chart (entanglement).
    """
    check_resource(resource)
    fam = classify_input(state)
    if resource == "nonclassicality" and is_classical(fam.gamma):
        return BoundResult(1.0, "free", True)
    if fam.kind == SINGLE:
        if resource == "entanglement":
            return BoundResult(1.0, "free", True)
        return single_mode_lower(fam.gamma)
    if fam.kind == TWO_MODE:
        if resource == "entanglement" and is_separable_two_mode(fam.gamma):
            return BoundResult(1.0, "free", True)
        return _two_mode_witness(fam.spec, resource)
    if resource == "nonclassicality":
        return _symmetric_nonclassicality(fam.spec)
    return _symmetric_entanglement(fam.spec)


__all__ = [
    "witness_ratio",
    "entanglement_witness_ratio",
    "single_mode_lower",
    "chart_one",
    "chart_two",
    "chart_one_block",
    "lower_bound_charted",
    "lower_bound_witness",
    "symmetric_witness_value",
]
