"""``robustness``: pick closed forms and numeric searches for a state and merge them."""

from __future__ import annotations

from ..exceptions import InvalidArgument, Unsupported
from ..criteria import is_classical, is_fully_separable_symmetric, is_separable_two_mode
from .exact import (
    conjecture_label,
    exact_single_mode,
    exact_symmetric_nonclassicality,
    exact_two_mode_squeezed_thermal,
    ghz_entanglement_bounds,
    symmetric_entanglement_lower,
)
from .families import GHZ_FAMILY, SINGLE, SYMMETRIC, TWO_MODE, classify_input
from .lower import lower_bound_charted, lower_bound_witness
from .result import BoundResult, RobustnessBounds, check_resource, combine
from .upper import DEFAULT_STARTS, upper_bound

METHODS = ("auto", "analytic", "numeric")


def _pair(lower: BoundResult, upper: BoundResult) -> dict:
    return {
        "lower": float(lower.value),
        "upper": float(upper.value),
        "lower_method": lower.method,
        "upper_method": upper.method,
        "converged": bool(lower.converged and upper.converged),
    }


def _analytic(fam, resource: str):
    """Closed-form ``(lower, upper)`` or ``None`` when the family has none."""
    if fam.kind == SINGLE:
        if resource == "entanglement":
            return BoundResult(1.0, "free"), BoundResult(1.0, "free")
        g = fam.gamma
        v = exact_single_mode(g[0, 0], g[1, 1], g[0, 1])
        return BoundResult(v, "analytic:single-mode"), BoundResult(v, "analytic:single-mode")

    if fam.kind == TWO_MODE:
        spec = fam.spec
        if spec.is_squeezed_thermal and spec.c1 >= 0:
            ex = exact_two_mode_squeezed_thermal(spec.a, spec.b, spec.c1)
            tag = f"analytic:tmst-branch-{ex.branch}"
            return BoundResult(ex.value, tag), BoundResult(ex.value, tag)
        return None

    spec = fam.spec
    if resource == "nonclassicality":
        v = exact_symmetric_nonclassicality(spec)
        return BoundResult(v, "analytic:symmetric"), BoundResult(v, "analytic:symmetric")
    if fam.kind == GHZ_FAMILY:
        g = fam.ghz
        b = ghz_entanglement_bounds(g.n, g.r, g.eta)
        return BoundResult(b.lower, b.lower_method), BoundResult(b.upper, b.upper_method)
    return None


def _numeric(fam, state, resource: str, starts: int):
    lower = lower_bound_witness(state, resource)
    if fam.kind == TWO_MODE and lower.method != "free":
        charted = lower_bound_charted(fam.spec, resource)
        if charted.value > lower.value:
            lower = BoundResult(
                charted.value, charted.method, lower.converged and charted.converged,
                charted.point, lower.evaluations + charted.evaluations,
            )
    upper = upper_bound(state, resource, starts=starts)
    return lower, upper


def _free(fam, resource: str) -> bool:
    if resource == "nonclassicality":
        return bool(is_classical(fam.gamma))
    if fam.kind == SINGLE:
        return True
    if fam.kind == TWO_MODE:
        return is_separable_two_mode(fam.gamma)
    spec = fam.spec
    return spec.c1 >= 0 and spec.c2 >= 0 and is_fully_separable_symmetric(spec)


def robustness(state, resource: str, method: str = "auto", starts: int = DEFAULT_STARTS) -> RobustnessBounds:
    """Lower and upper bounds on the robustness of ``state``.

    ``state`` may be a CM (single mode, two-mode standard form or symmetric),
    a :class:`~gres.symplectic.TwoModeStandardForm`,
    a :class:`~gres.symplectic.SymmetricSpec` or a
    :class:`~gres.bounds.families.GHZ`.

    ``method``:

    * ``analytic``: closed forms only; raises :class:`Unsupported` if the
      family has none for this resource.
    * ``numeric``: witness and free-state searches only.
    * ``auto``: both; the tightest lower and upper values are reported and
      each pipeline's own result is kept in ``metadata``.

    Bounds are floored at 1.
    """
    check_resource(resource)
    if method not in METHODS:
        raise InvalidArgument(f"method must be one of {METHODS}, got {method!r}")
    fam = classify_input(state)
    meta = {"family": fam.kind, "n": fam.n}

    if fam.kind in (SYMMETRIC, GHZ_FAMILY) and resource == "entanglement":
        meta["lower_status"] = conjecture_label(fam.n)

    if _free(fam, resource):
        free = BoundResult(1.0, "free")
        return combine(resource, free, free, meta)

    analytic = None if method == "numeric" else _analytic(fam, resource)
    if method == "analytic":
        if analytic is None:
            if fam.kind == SYMMETRIC:
                lo = BoundResult(symmetric_entanglement_lower(fam.spec), "analytic:symmetric-witness")
                raise Unsupported(
                    "no closed-form upper bound for this symmetric state "
                    f"(analytic lower bound {lo.value:.6g}); use method='numeric'"
                )
            raise Unsupported("no closed form for this state; use method='numeric' or 'auto'")
        meta["analytic"] = _pair(*analytic)
        return combine(resource, analytic[0], analytic[1], meta)

    numeric = _numeric(fam, state, resource, starts)
    meta["numeric"] = _pair(*numeric)
    if analytic is None:
        return combine(resource, numeric[0], numeric[1], meta)

    meta["analytic"] = _pair(*analytic)
    if analytic[1].value - analytic[0].value <= 1e-12 * analytic[1].value:
        # an exact value; the numeric pipeline only confirms it
        lower, upper = analytic
    else:
        lower = max(analytic[0], numeric[0], key=lambda r: r.value)
        upper = min(analytic[1], numeric[1], key=lambda r: r.value)
    meta["numeric_agrees"] = bool(
        abs(numeric[0].value - analytic[0].value) <= 1e-3 * analytic[0].value
        and abs(numeric[1].value - analytic[1].value) <= 1e-3 * analytic[1].value
    )
    return combine(resource, lower, upper, meta)


__all__ = ["robustness", "METHODS"]
