import numpy as np
import pytest

from gres.symplectic import TwoModeStandardForm

#: one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict = {}


def tmsv(r: float) -> np.ndarray:
    return TwoModeStandardForm.squeezed_thermal(1.0, 1.0, r).expand()


def squeezed_thermal_1(r: float, nu: float) -> np.ndarray:
    return np.diag([nu * np.exp(2 * r), nu * np.exp(-2 * r)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
