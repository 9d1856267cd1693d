import numpy as np
import pytest

from gres.bounds.exact import (
    conjecture_label,
    entanglement_chart_value,
    exact_single_mode,
    exact_symmetric_nonclassicality,
    exact_two_mode_squeezed_thermal,
    ghz_entanglement_bounds,
    nonclassicality_chart_value,
    squeezed_thermal_branch,
    symmetric_entanglement_lower,
    x_minus,
    x_plus,
)
from gres.exceptions import InvalidArgument
from gres.symplectic import SymmetricSpec, TwoModeStandardForm


def test_single_mode_squeezed_thermal():
    r, nu = 0.7, 1.5
    v = exact_single_mode(nu * np.exp(2 * r), nu * np.exp(-2 * r), 0.0)
    assert v == pytest.approx(np.exp(r) / np.sqrt(nu))


def test_single_mode_classical_is_one():
    assert exact_single_mode(3.0, 2.0, 0.5) == 1.0


def test_single_mode_rejects_unphysical():
    with pytest.raises(InvalidArgument):
        exact_single_mode(0.5, 0.5, 0.0)


def test_tmsv_value():
    s = TwoModeStandardForm.squeezed_thermal(1.0, 1.0, 0.5)
    ex = exact_two_mode_squeezed_thermal(s.a, s.b, s.c1)
    assert ex.branch == 1
    assert ex.value == pytest.approx(np.e)


@pytest.mark.parametrize(
    "abc, branch",
    [((1.5, 1.5, 1.1), 1), ((3.0, 3.0, 1.0), 2), ((3.0, 1.5, 1.2), 3), ((1.5, 3.0, 1.2), 4)],
)
def test_branch_classification(abc, branch):
    assert squeezed_thermal_branch(*abc) == branch
    assert exact_two_mode_squeezed_thermal(*abc).branch == branch


def test_branch_continuity_across_boundaries():
    # walk c through every boundary crossing for a few (a, b) and compare sides
    for a, b in [(3.0, 1.5), (1.5, 3.0), (3.0, 2.2), (2.0, 2.0)]:
        crossings = [a - 1.0, b - 1.0, np.sqrt((a - 1.0) * (b - 1.0))]
        for c in crossings:
            if not 0 < c < np.sqrt(a * b - 1):
                continue
            lo = exact_two_mode_squeezed_thermal(a, b, c * (1 - 1e-12))
            hi = exact_two_mode_squeezed_thermal(a, b, c * (1 + 1e-12))
            assert hi.value == pytest.approx(lo.value, rel=1e-9)
            on = exact_two_mode_squeezed_thermal(a, b, c)
            vals = [v for _, v in on.boundary]
            assert max(vals) - min(vals) <= 1e-9 * max(vals)


def test_boundary_point_lists_both_branches():
    a, b = 3.0, 3.0
    c = 2.0  # delta = 4 - 4 = 0
    ex = exact_two_mode_squeezed_thermal(a, b, c)
    branches = {k for k, _ in ex.boundary}
    assert {2, 3, 4} & branches and len(branches) >= 2
    vals = [v for _, v in ex.boundary]
    assert max(vals) - min(vals) < 1e-12


def test_tmst_rejects_bad_input():
    with pytest.raises(InvalidArgument):
        exact_two_mode_squeezed_thermal(1.0, 1.0, 0.5)
    with pytest.raises(InvalidArgument):
        exact_two_mode_squeezed_thermal(2.0, 2.0, -0.5)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_ghz_nonclassicality(n):
    r = 0.4
    assert exact_symmetric_nonclassicality(SymmetricSpec.ghz(n, r)) == pytest.approx(np.exp(n * r))


def test_ghz_entanglement_bounds():
    b = ghz_entanglement_bounds(4, 0.5)
    assert b.lower == pytest.approx(np.e) and b.upper == pytest.approx(np.e)
    assert b.metadata["lower_status"] == "conjecture-conditional"
    noisy = ghz_entanglement_bounds(3, 0.5, 0.1)
    assert noisy.upper == pytest.approx(np.exp(0.8))
    assert noisy.metadata["upper_from_free_state"] == pytest.approx(noisy.upper, rel=1e-9)
    assert ghz_entanglement_bounds(3, 0.2, 0.5).upper == 1.0


def test_conjecture_label():
    assert conjecture_label(3) == "numerically-verified"
    assert conjecture_label(5) == "conjecture-conditional"


def test_symmetric_entanglement_lower_floor():
    assert symmetric_entanglement_lower(SymmetricSpec(3, 2.0, 2.0, 0.1, 0.1)) == 1.0


def test_x_roots():
    e1, e2 = 0.7, 1.3
    for x in (x_minus(e1, e2), x_plus(e1, e2)):
        assert x + 1 / x == pytest.approx(e1 * e2 + 2)
    assert x_minus(e1, e2) * x_plus(e1, e2) == pytest.approx(1.0)


def test_chart_values_reach_tmsv():
    s = TwoModeStandardForm.squeezed_thermal(1.0, 1.0, 0.5)
    # branch 1 optimum sits at p = q = 1, eps = 0
    assert nonclassicality_chart_value(s, 1.0, 1.0, 0.0, 0.0) == pytest.approx(np.e)
    assert entanglement_chart_value(s, 1.0, 1.0, 0.0, 0.0) == pytest.approx(np.e)
