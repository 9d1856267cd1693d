import numpy as np
import pytest

from gres.bounds import (
    lambda_upper,
    lower_bound_charted,
    lower_bound_witness,
    upper_bound,
)
from gres.bounds.exact import exact_single_mode, exact_two_mode_squeezed_thermal
from gres.bounds.result import ROUNDOFF, BoundResult, combine
from gres.bounds.upper import classical_scale, free_state_from_point, ppt_scale, single_mode_upper
from gres.criteria import is_classical, is_separable_two_mode, partial_transpose
from gres.exceptions import InvalidArgument
from gres.symplectic import SymmetricSpec, TwoModeStandardForm

from conftest import squeezed_thermal_1


def _sym(m):
    return (m[0, 0], m[0, 1], m[1, 1])


def test_classical_scale_lands_on_boundary(rng):
    for _ in range(20):
        a = rng.uniform(0.3, 3.0)
        g = np.array([[a, 0.1], [0.1, 1.0 / a + 0.2]])
        v = rng.normal(size=(2, 2))
        d = v @ v.T
        t = classical_scale(_sym(g), _sym(d))
        assert t is not None
        m = g + t * d - np.eye(2)
        assert abs(np.linalg.eigvalsh(m)[0]) < 1e-9
        if t > 1e-9:
            m = g + 0.99 * t * d - np.eye(2)
            assert np.linalg.eigvalsh(m)[0] < 0


def test_classical_scale_already_classical_and_hopeless():
    assert classical_scale((2.0, 0.0, 2.0), (1.0, 0.0, 0.0)) == 0.0
    # rank-one push along x can never lift the p variance above 1
    assert classical_scale((2.0, 0.0, 0.5), (1.0, 0.0, 0.0)) is None


def test_ppt_scale_lands_on_boundary():
    spec = TwoModeStandardForm.squeezed_thermal(1.0, 1.0, 0.5)
    g = spec.expand()
    gx = _sym(g[:2, :2])
    gpt = _sym(partial_transpose(g)[2:, 2:])
    d = (1.0, 0.3, 1.0)
    t = ppt_scale(gx, gpt, d, d)
    assert t is not None and t > 0
    dd = np.array([[1.0, 0.3], [0.3, 1.0]])
    sigma = g + t * np.block([[dd, np.zeros((2, 2))], [np.zeros((2, 2)), np.diag([1, -1]) @ dd @ np.diag([1, -1])]])
    assert is_separable_two_mode(sigma + 1e-9 * np.eye(4))
    assert not is_separable_two_mode(g + 0.99 * (sigma - g))


def test_single_mode_upper_matches_exact():
    g = squeezed_thermal_1(0.6, 1.3)
    res = single_mode_upper(g)
    assert res.converged
    assert res.value == pytest.approx(exact_single_mode(g[0, 0], g[1, 1], g[0, 1]), rel=1e-8)


def test_single_mode_lower_matches_exact():
    g = squeezed_thermal_1(0.6, 1.3)
    res = lower_bound_witness(g, "nonclassicality")
    assert res.value == pytest.approx(exact_single_mode(g[0, 0], g[1, 1], g[0, 1]), rel=1e-8)


@pytest.mark.parametrize("abc", [(1.8, 1.8, 1.4), (3.0, 1.5, 1.2), (2.5, 2.5, 1.0)])
@pytest.mark.parametrize("resource", ["nonclassicality", "entanglement"])
def test_two_mode_bounds_sandwich_exact(abc, resource):
    a, b, c = abc
    spec = TwoModeStandardForm(a, b, c, c)
    g = spec.expand()
    if resource == "entanglement" and is_separable_two_mode(g):
        assert upper_bound(g, resource).method == "free"
        assert lower_bound_charted(spec, resource).value == pytest.approx(1.0, abs=1e-12)
        return
    exact = exact_two_mode_squeezed_thermal(a, b, c).value
    lo = lower_bound_charted(spec, resource)
    hi = upper_bound(g, resource)
    assert lo.value <= hi.value * (1 + 1e-7)
    if resource == "nonclassicality":
        assert lo.value == pytest.approx(exact, rel=1e-3)
        assert hi.value == pytest.approx(exact, rel=1e-3)


@pytest.mark.parametrize(
    "spec",
    [TwoModeStandardForm(2.0, 1.7, 1.3, 0.9), TwoModeStandardForm(3.0, 1.5, 1.2, 1.2)],
)
def test_upper_bound_point_is_a_certificate(spec):
    g = spec.expand()
    res = upper_bound(g, "nonclassicality")
    assert res.converged
    sigma = free_state_from_point(g, res.point)
    assert np.linalg.eigvalsh(sigma - np.eye(4))[0] > -1e-9
    assert np.linalg.eigvalsh(sigma - g)[0] > -1e-9
    assert lambda_upper(g, sigma) == pytest.approx(res.value, rel=1e-9)


def test_free_state_from_point_charts():
    g = TwoModeStandardForm(1.8, 1.8, 1.4, 1.4).expand()
    chol = free_state_from_point(g, (1.0, 0.2, 0.5, 0.7, -0.1, 0.9))
    split = free_state_from_point(g, (0.3, 1.0, 0.6, -2.0))
    for sigma in (chol, split):
        assert abs(np.linalg.eigvalsh(sigma - np.eye(4))[0]) < 1e-9
    # the split chart puts both blocks on the boundary
    for block in (split[:2, :2], split[2:, 2:]):
        assert abs(np.linalg.eigvalsh(block - np.eye(2))[0]) < 1e-9


def test_symmetric_lower_at_most_upper():
    spec = SymmetricSpec.ghz(3, 0.4, 0.2)
    for resource in ("nonclassicality", "entanglement"):
        lo = lower_bound_witness(spec, resource).value
        hi = upper_bound(spec, resource).value
        assert lo <= hi * (1 + 1e-7)


def test_combine_floors_and_snaps():
    r = combine("entanglement", BoundResult(0.5, "x"), BoundResult(0.9, "y"))
    assert r.lower == r.upper == 1.0
    hi = 2.0
    r = combine("entanglement", BoundResult(hi * (1 + 0.5 * ROUNDOFF), "x"), BoundResult(hi, "y"))
    assert r.lower == r.upper == hi
    assert "rounded_crossing" in r.metadata
    r = combine("entanglement", BoundResult(2.1, "x"), BoundResult(2.0, "y"))
    assert r.lower > r.upper and not r.ordered


def test_bad_resource():
    with pytest.raises(InvalidArgument):
        upper_bound(np.eye(2), "magic")
