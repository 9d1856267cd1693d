"""Closed-form robustness values and bounds for the supported families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidArgument
from ..symplectic import SymmetricSpec, TwoModeStandardForm, is_physical
from .result import BoundResult, RobustnessBounds

#: Relative tolerance used to decide that a point sits on a branch boundary.
BOUNDARY_TOL = 1e-12


def _check_single_mode(a: float, b: float, c: float) -> None:
    if not (a > 0 and b > 0 and a * b - c * c >= 1.0 - 1e-10):
        raise InvalidArgument(f"unphysical single-mode parameters a={a}, b={b}, c={c}")


def single_mode_value(a: float, b: float, c: float) -> float:
    """``sqrt(2 / (a + b - sqrt((a-b)^2 + 4c^2)))``, i.e. ``lambda_min^-1/2``, unclamped."""
    lam_min = 0.5 * (a + b - np.hypot(a - b, 2.0 * c))
    return float(1.0 / np.sqrt(lam_min))


def exact_single_mode(a: float, b: float, c: float) -> float:
    """Robustness of nonclassicality of the single-mode CM ``[[a, c], [c, b]]``."""
    _check_single_mode(a, b, c)
    return max(single_mode_value(a, b, c), 1.0)


# --- two-mode squeezed thermal ------------------------------------------------

def _branch_values(a: float, b: float, c: float) -> dict:
    vals = {1: 2.0 / (a + b - 2.0 * c), 2: 1.0}
    d3 = (a - 1.0) * (b + 1.0) - c * c
    d4 = (a + 1.0) * (b - 1.0) - c * c
    vals[3] = 2.0 * (a - 1.0) / d3 if d3 > 0 else np.inf
    vals[4] = 2.0 * (b - 1.0) / d4 if d4 > 0 else np.inf
    return vals


@dataclass(frozen=True)
class ExactValue:
    value: float
    branch: int
    #: every branch whose closure contains the point, with its formula value
    boundary: tuple = ()

    def __float__(self) -> float:
        return self.value


def squeezed_thermal_branch(a: float, b: float, c: float) -> int:
    """Branch id: 1 (a-c<1, b-c<1), 2 (delta>=0), 3 (a-c>=1, b-c<1), 4 (a-c<1, b-c>=1)."""
    delta = (a - 1.0) * (b - 1.0) - c * c
    if a - c < 1.0 and b - c < 1.0:
        return 1
    if delta >= 0.0:
        return 2
    return 3 if a - c >= 1.0 else 4


def _closure_branches(a: float, b: float, c: float) -> tuple:
    tol = BOUNDARY_TOL * max(1.0, abs(a), abs(b), abs(c))
    delta = (a - 1.0) * (b - 1.0) - c * c
    x, y = a - c - 1.0, b - c - 1.0
    out = []
    if x <= tol and y <= tol:
        out.append(1)
    if delta >= -tol:
        out.append(2)
    if x >= -tol and y <= tol and delta <= tol:
        out.append(3)
    if x <= tol and y >= -tol and delta <= tol:
        out.append(4)
    return tuple(out)


def exact_two_mode_squeezed_thermal(a: float, b: float, c: float) -> ExactValue:
    """Robustness of nonclassicality (and entanglement) of a two-mode squeezed thermal state.

    The CM is ``[[a, c], [c, b]] (+) [[a, -c], [-c, b]]`` with ``c >= 0``.
    ``boundary`` lists ``(branch, value)`` pairs for all branches meeting at
    the point, so callers can see both sides of a boundary.
    """
    spec = TwoModeStandardForm(a, b, c, c)
    if c < 0:
        raise InvalidArgument("squeezed thermal parameterization needs c >= 0")
    if not spec.is_squeezed_thermal or not is_physical(spec.expand()):
        raise InvalidArgument(f"({a}, {b}, {c}) is not a physical two-mode squeezed thermal CM")
    vals = _branch_values(a, b, c)
    branch = squeezed_thermal_branch(a, b, c)
    boundary = tuple((k, float(vals[k])) for k in _closure_branches(a, b, c))
    return ExactValue(max(float(vals[branch]), 1.0), branch, boundary)


# --- symmetric states ---------------------------------------------------------

def _symmetric_blocks(spec: SymmetricSpec):
    e, f, g, h = spec.e, spec.f, spec.g, spec.h
    if min(e, f, g, h) <= 0:
        raise InvalidArgument("symmetric CM has a non-positive normal-mode variance")
    return e, f, g, h


def exact_symmetric_nonclassicality(spec: SymmetricSpec) -> float:
    """Product of the single-mode values of the normal-mode blocks."""
    e, f, g, h = _symmetric_blocks(spec)
    first = max(e ** -0.5, g ** -0.5, 1.0)
    rest = max(f ** -0.5, h ** -0.5, 1.0)
    return float(first * rest ** (spec.n - 1))


def symmetric_entanglement_lower(spec: SymmetricSpec) -> float:
    """``max(1 / sqrt((a - c1)(b - (n-1) c2)), 1)``.

    Tight only if product Gaussian states maximise the witness mean over
    product states (checked numerically for three modes).
    """
    _, f, g, _ = _symmetric_blocks(spec)
    return float(max((f * g) ** -0.5, 1.0))


def ghz_free_state_s1(r: float, eta: float) -> float:
    return 0.25 * np.log(np.exp(4 * r) + np.exp(4 * r - 4 * eta) - 1.0)


def conjecture_label(n: int) -> str:
    return "conjecture-conditional" if n >= 4 else "numerically-verified"


def ghz_entanglement_bounds(n: int, r: float, eta: float = 0.0) -> RobustnessBounds:
    """Bounds on the entanglement robustness of an n-mode GHZ state in thermal noise.

    ``upper = e^{2r - 2 eta}`` (clamped at 1); it is also recomputed from the
    explicit separable free state via :func:`~gres.bounds.lambda_upper`,
    reported in ``metadata['upper_from_free_state']``.
    """
    from .lambda_ import lambda_upper

    if int(n) != n or n < 2:
        raise InvalidArgument("GHZ bounds need n >= 2 modes")
    if r < 0 or eta < 0:
        raise InvalidArgument("GHZ bounds need r >= 0 and eta >= 0")
    spec = SymmetricSpec.ghz(int(n), r, eta)
    lower = symmetric_entanglement_lower(spec)
    upper = float(max(np.exp(2 * r - 2 * eta), 1.0))

    meta = {"lower_status": conjecture_label(int(n))}
    if r > eta:
        s1 = ghz_free_state_s1(r, eta)
        rho1 = np.diag([np.exp(2 * r + 2 * eta), np.exp(-2 * r + 2 * eta)])
        sigma1 = np.diag([np.exp(4 * s1 - 2 * r + 2 * eta), np.exp(2 * r - 2 * eta)])
        # second normal mode: sigma_2 = rho_2, contributing a factor 1
        meta["upper_from_free_state"] = lambda_upper(rho1, sigma1)
        meta["free_state_s1"] = float(s1)
    return RobustnessBounds(
        resource="entanglement",
        lower=lower,
        upper=upper,
        lower_method="analytic:symmetric-witness",
        upper_method="analytic:ghz",
        converged=True,
        metadata=meta,
    )


# --- asymptotic witness charts for two-mode standard forms --------------------

def block_value(a: float, b: float, c: float, p: float, eps: float) -> float:
    """Limit of one block ratio ``f_j`` for an infinitely large witness.

    The witness block has ``c_w / a_w -> p`` and ``a_w b_w - c_w^2 = eps |c_w|``.
    """
    ap = abs(p)
    den = b + a * p * p + eps * ap - 2.0 * c * p
    return (1.0 + eps * ap + p * p) / den


def x_minus(eps1: float, eps2: float) -> float:
    """Smaller root of ``x + 1/x = eps1 eps2 + 2``."""
    e = eps1 * eps2
    return 1.0 + 0.5 * e - 0.5 * np.sqrt(e * e + 4.0 * e)


def x_plus(eps1: float, eps2: float) -> float:
    e = eps1 * eps2
    return 1.0 + 0.5 * e + 0.5 * np.sqrt(e * e + 4.0 * e)


def nonclassicality_chart_value(spec: TwoModeStandardForm, p, q, eps1, eps2) -> float:
    """Square root of ``f_1 f_2`` on the asymptotic witness chart."""
    f1 = block_value(spec.a, spec.b, spec.c1, p, eps1)
    f2 = block_value(spec.a, spec.b, spec.c2, q, eps2)
    if f1 <= 0 or f2 <= 0:
        return 0.0
    return float(np.sqrt(f1 * f2))


def entanglement_chart_value(spec: TwoModeStandardForm, p, q, eps1, eps2) -> float:
    """Entanglement witness value with the product-squeezed infimum taken in closed form.

    ``inf_{x,y} (eps1|p| + y + x p^2)(eps2|q| + 1/y + q^2/x)`` equals
    ``(1 + |pq| + sqrt(eps1 eps2 |pq|))^2`` by Cauchy-Schwarz.
    """
    a, b = spec.a, spec.b
    d1 = b + a * p * p + eps1 * abs(p) - 2.0 * spec.c1 * p
    d2 = b + a * q * q + eps2 * abs(q) - 2.0 * spec.c2 * q
    if d1 <= 0 or d2 <= 0:
        return 0.0
    pq = abs(p * q)
    return float((1.0 + pq + np.sqrt(eps1 * eps2 * pq)) / np.sqrt(d1 * d2))


def one_block_value(a: float, b: float, c: float) -> float:
    """Chart with one witness block taken to infinity: ``lambda_min^-1/2`` of the other block."""
    return single_mode_value(a, b, c)


def degenerate_chart_value(spec: TwoModeStandardForm) -> float:
    """``sqrt(2 / (a + b - sqrt((a-b)^2 + 4 c1^2)))``, independent of ``c2``."""
    return single_mode_value(spec.a, spec.b, spec.c1)


def bound_from(value: float, method: str, point=()) -> BoundResult:
    return BoundResult(max(float(value), 1.0), method, True, tuple(point))
