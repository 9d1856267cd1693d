"""Deterministic derivative-free minimisation with box constraints.

Local searches use the Nelder-Mead simplex from SciPy, restarted from the
best vertex with a fresh simplex until a restart stops improving. Inequality
penalties ``g(x) <= 0`` enter as ``w * max(0, g)^2`` with the weight raised
tenfold on every restart. Infeasible points may evaluate to ``+inf``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize
from scipy.optimize import minimize_scalar
from scipy.stats import qmc

from .config import TOL


@dataclass
class Objective:
    dimension: int
    evaluate: Callable[[np.ndarray], float]
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    penalties: Sequence[tuple] = field(default_factory=tuple)

    def __post_init__(self):
        if self.lower is not None:
            self.lower = np.asarray(self.lower, dtype=float)
        if self.upper is not None:
            self.upper = np.asarray(self.upper, dtype=float)

    def clip(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.lower is not None:
            x = np.maximum(x, self.lower)
        if self.upper is not None:
            x = np.minimum(x, self.upper)
        return x

    def penalized(self, x: np.ndarray, scale: float = 1.0) -> float:
        try:
            value = float(self.evaluate(x))
        except (ArithmeticError, ValueError, np.linalg.LinAlgError):
            return np.inf
        if np.isnan(value):
            return np.inf
        for g, w in self.penalties:
            excess = max(0.0, float(g(x)))
            value += scale * w * excess * excess
        return value

    def max_violation(self, x: np.ndarray) -> float:
        return max((float(g(x)) for g, _ in self.penalties), default=0.0)


@dataclass(frozen=True)
class OptimResult:
    best_point: np.ndarray
    best_value: float
    evaluations: int
    converged: bool


def _simplex(obj: Objective, x0: np.ndarray, step: np.ndarray) -> np.ndarray:
    d = len(x0)
    simplex = np.tile(x0, (d + 1, 1))
    for i in range(d):
        y = x0.copy()
        y[i] += step[i]
        if obj.upper is not None and y[i] > obj.upper[i]:
            y[i] = x0[i] - step[i]
        simplex[i + 1] = obj.clip(y)
    return simplex


def minimize(
    obj: Objective,
    start,
    tol: float = TOL.optimizer_xtol,
    max_eval: int = TOL.optimizer_max_eval,
    step=0.1,
    max_restarts: int = 6,
) -> OptimResult:
    """Local Nelder-Mead search from ``start``.

    ``converged`` is true when a restart did not improve the value by more
    than ``tol`` (relative) and the last simplex either had diameter below
    ``tol`` or values spread by less than that. The second case covers
    flat valleys, where the point is ill-defined but the value is not.
    """
    x = obj.clip(np.asarray(start, dtype=float))
    if len(x) != obj.dimension:
        raise ValueError(f"start has dimension {len(x)}, expected {obj.dimension}")
    step = np.broadcast_to(np.asarray(step, dtype=float), x.shape).copy()
    bounds = None
    if obj.lower is not None or obj.upper is not None:
        lo = obj.lower if obj.lower is not None else np.full(obj.dimension, -np.inf)
        hi = obj.upper if obj.upper is not None else np.full(obj.dimension, np.inf)
        bounds = list(zip(lo, hi))

    evals = 0
    scale = 1.0
    best_val = obj.penalized(x, scale)
    evals += 1
    converged = False
    for _ in range(max_restarts + 1):
        budget = max_eval - evals
        if budget <= obj.dimension + 1:
            break
        res = _scipy_minimize(
            lambda z: obj.penalized(z, scale),
            x,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "initial_simplex": _simplex(obj, x, step),
                "xatol": tol,
                "fatol": tol * max(1.0, abs(best_val)) if np.isfinite(best_val) else tol,
                "maxfev": budget,
                "adaptive": obj.dimension > 2,
            },
        )
        evals += int(res.nfev)
        simplex = res.final_simplex[0]
        diameter = float(np.max(np.abs(simplex - simplex[0])))
        improvement = best_val - float(res.fun)
        if float(res.fun) <= best_val:
            x, best_val = obj.clip(res.x), float(res.fun)
        ftol = tol * max(1.0, abs(best_val))
        spread = float(np.ptp(res.final_simplex[1]))
        if (diameter < tol or spread <= ftol) and improvement <= ftol:
            converged = True
            break
        # restart with a smaller simplex around the incumbent
        step = np.maximum(step * 0.5, 10 * tol)
        scale *= 10.0

    value = obj.penalized(x, 1.0)
    evals += 1
    feasible = obj.max_violation(x) <= 1e-6
    return OptimResult(x, value, evals, converged and feasible)


def multi_start_minimize(
    obj: Objective,
    starts,
    tol: float = TOL.optimizer_xtol,
    max_eval: int = TOL.optimizer_max_eval,
    step=0.1,
    explore_tol: Optional[float] = None,
) -> OptimResult:
    """Best of independent :func:`minimize` runs.

    The winner is the lowest value; ties are broken by the lexicographically
    smallest point so that the start order does not matter. With
    ``explore_tol`` every start first runs at that looser tolerance and only
    the winner is refined to ``tol``.
    """
    starts = [np.asarray(s, dtype=float) for s in starts]
    if not starts:
        raise ValueError("need at least one start")
    first_tol = tol if explore_tol is None else max(tol, explore_tol)
    results = [minimize(obj, s, first_tol, max_eval, step) for s in starts]
    best = min(results, key=lambda r: (r.best_value, tuple(r.best_point)))
    evals = sum(r.evaluations for r in results)
    if first_tol > tol and np.isfinite(best.best_value):
        polished = minimize(obj, best.best_point, tol, max_eval, np.asarray(step) * 0.1)
        evals += polished.evaluations
        if polished.best_value <= best.best_value:
            best = polished
    return OptimResult(best.best_point, best.best_value, evals, best.converged)


def low_discrepancy(lower, upper, count: int) -> np.ndarray:
    """Deterministic (unscrambled) Halton points in the box ``[lower, upper]``."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    pts = qmc.Halton(d=len(lower), scramble=False).random(count + 1)[1:]
    return lower + pts * (upper - lower)


def screened_starts(obj: Objective, candidates, keep: int, extra=()) -> list:
    """The ``keep`` best finite candidates (plus ``extra`` seeds, always kept)."""
    scored = []
    for x in list(extra) + list(candidates):
        x = obj.clip(np.asarray(x, dtype=float))
        v = obj.penalized(x)
        if np.isfinite(v):
            scored.append((v, tuple(x)))
    scored.sort()
    seen, out = set(), []
    for v, x in scored:
        if x in seen:
            continue
        seen.add(x)
        out.append(np.array(x))
        if len(out) == keep:
            break
    return out


def minimize_scalar_screened(f, lower: float, upper: float, grid: int = 33, tol: float = 1e-10):
    """Grid screen on ``[lower, upper]`` followed by bounded Brent refinement.

    Infinite values are replaced by a huge finite number so that Brent's
    golden-section fallback can move away from infeasible points.
    Returns an :class:`OptimResult` with a 1-element point.
    """
    xs = np.linspace(lower, upper, grid)
    vals = np.array([f(x) for x in xs], dtype=float)
    vals[~np.isfinite(vals)] = np.inf
    i = int(np.argmin(vals))
    if not np.isfinite(vals[i]):
        return OptimResult(np.array([xs[i]]), np.inf, grid, False)
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, grid - 1)]

    def safe(x):
        v = f(x)
        return v if np.isfinite(v) else 1e300

    res = minimize_scalar(safe, bounds=(lo, hi), method="bounded", options={"xatol": tol})
    x, v = (float(res.x), float(res.fun)) if res.fun <= vals[i] else (float(xs[i]), float(vals[i]))
    return OptimResult(np.array([x]), v, grid + int(res.nfev), bool(res.success))
