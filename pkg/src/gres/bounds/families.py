"""Recognise the state families the bounds engine supports."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..exceptions import InvalidArgument, Unsupported
from ..symplectic import SymmetricSpec, TwoModeStandardForm, as_cm, is_physical, num_modes

SINGLE = "single-mode"
TWO_MODE = "two-mode-standard"
SYMMETRIC = "symmetric"
GHZ_FAMILY = "ghz"
SUPPORTED = (SINGLE, TWO_MODE, SYMMETRIC, GHZ_FAMILY)


@dataclass(frozen=True)
class GHZ:
    """n-mode CV-GHZ state with squeezing ``r`` after thermal channels ``2N+1 = e^{2 eta}``."""

    n: int
    r: float
    eta: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidArgument("GHZ states need n >= 2 modes")
        if self.r < 0 or self.eta < 0:
            raise InvalidArgument("GHZ states need r >= 0 and eta >= 0")

    @property
    def spec(self) -> SymmetricSpec:
        return SymmetricSpec.ghz(int(self.n), self.r, self.eta)

    def expand(self) -> np.ndarray:
        return self.spec.expand()


@dataclass(frozen=True)
class Family:
    kind: str
    gamma: np.ndarray
    spec: Optional[Union[TwoModeStandardForm, SymmetricSpec]] = None
    ghz: Optional[GHZ] = None

    @property
    def n(self) -> int:
        return self.gamma.shape[0] // 2


def _unsupported(detail: str) -> Unsupported:
    return Unsupported(f"{detail}; supported families: {', '.join(SUPPORTED)}")


def _close(x: np.ndarray, y: np.ndarray) -> bool:
    return bool(np.abs(x - y).max() <= 1e-12 * max(1.0, float(np.abs(y).max())))


def _from_matrix(gamma: np.ndarray) -> Family:
    n = num_modes(gamma)
    if n == 1:
        return Family(SINGLE, gamma)
    if n == 2:
        spec = TwoModeStandardForm(gamma[0, 0], gamma[1, 1], gamma[0, 1], -gamma[2, 3])
        if _close(gamma, spec.expand()):
            return Family(TWO_MODE, spec.expand(), spec)
        raise _unsupported("two-mode CM is not in standard form")
    spec = SymmetricSpec(n, gamma[0, 0], gamma[n, n], gamma[0, 1], -gamma[n, n + 1])
    if _close(gamma, spec.expand()):
        return Family(SYMMETRIC, spec.expand(), spec)
    raise _unsupported(f"{n}-mode CM is not of the symmetric form")


def classify_input(state) -> Family:
    """Map a CM or a family spec to a :class:`Family`; raises Unsupported otherwise."""
    if isinstance(state, GHZ):
        fam = Family(GHZ_FAMILY, state.expand(), state.spec, state)
    elif isinstance(state, TwoModeStandardForm):
        fam = Family(TWO_MODE, as_cm(state.expand()), state)
    elif isinstance(state, SymmetricSpec):
        fam = Family(SYMMETRIC, as_cm(state.expand()), state)
    elif isinstance(state, (np.ndarray, list, tuple)):
        fam = _from_matrix(as_cm(state))
    else:
        raise _unsupported(f"cannot interpret {type(state).__name__} as a state")
    phys = is_physical(fam.gamma)
    if not phys:
        raise InvalidArgument(
            f"unphysical CM (min eigenvalue of gamma + i Delta = {phys.min_eigenvalue:.3e})"
        )
    return fam
