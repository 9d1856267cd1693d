"""Classicality / separability tests and boundary charts of the free sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import TOL
from .exceptions import InvalidArgument, Unsupported
from .symplectic import (
    SymmetricSpec,
    as_cm,
    is_physical,
    num_modes,
    symplectic_form,
)

CLASSICAL_BOUNDARY = "classical-boundary"
SEPARABLE_BOUNDARY = "separable-boundary"


@dataclass(frozen=True)
class ClassicalityReport:
    classical: bool
    margin: float

    def __bool__(self) -> bool:
        return self.classical


def is_classical(gamma) -> ClassicalityReport:
    """A Gaussian state is classical iff ``gamma - I >= 0``.

    ``margin`` is the smallest eigenvalue of ``gamma - I``.
    """
    gamma = as_cm(gamma)
    phys = is_physical(gamma)
    if not phys:
        raise InvalidArgument(
            f"unphysical CM (min eigenvalue of gamma + i Delta = {phys.min_eigenvalue:.3e})"
        )
    margin = float(np.linalg.eigvalsh(gamma)[0] - 1.0)
    return ClassicalityReport(margin >= -TOL.psd, margin)


def _check_orthogonal_symplectic(O: np.ndarray, n: int) -> None:
    if O.shape != (2 * n, 2 * n):
        raise InvalidArgument("transformation has the wrong shape")
    eye = np.eye(2 * n)
    D = symplectic_form(n)
    if np.abs(O @ O.T - eye).max() > 1e-9:
        raise InvalidArgument("transformation is not orthogonal")
    if np.abs(O @ D @ O.T - D).max() > 1e-9:
        raise InvalidArgument("transformation is not symplectic")


def classicality_invariance_check(gamma, O) -> bool:
    """Verdict of :func:`is_classical`, asserting it survives ``gamma -> O gamma O^T``."""
    gamma = as_cm(gamma)
    O = np.asarray(O, dtype=float)
    _check_orthogonal_symplectic(O, num_modes(gamma))
    before = is_classical(gamma).classical
    after = is_classical(O @ gamma @ O.T).classical
    if before != after:
        raise AssertionError("classicality changed under an orthogonal symplectic map")
    return before


def partial_transpose(gamma) -> np.ndarray:
    """Flip the sign of the last momentum (``p_n -> -p_n``)."""
    gamma = as_cm(gamma)
    flip = np.ones(gamma.shape[0])
    flip[-1] = -1.0
    return gamma * np.outer(flip, flip)


def two_mode_separable_boundary_residual(gamma_sigma) -> float:
    """``det(gamma_sigma^{T_B} + i Delta)`` for a two-mode CM.

    Zero on the PPT boundary, negative for entangled and positive for
    separable states in the interior.
    """
    gamma_sigma = as_cm(gamma_sigma)
    if num_modes(gamma_sigma) != 2:
        raise Unsupported("separability residual is implemented for two modes only")
    det = np.linalg.det(partial_transpose(gamma_sigma) + 1j * symplectic_form(2))
    scale = max(1.0, float(np.abs(gamma_sigma).max()) ** 4)
    if abs(det.imag) > 1e-12 * scale:
        raise ArithmeticError(f"determinant has imaginary residue {det.imag:.3e}")
    return float(det.real)


def is_separable_two_mode(gamma) -> bool:
    """PPT test; exact for two-mode Gaussian states."""
    pt = partial_transpose(gamma)
    return bool(np.linalg.eigvalsh(pt + 1j * symplectic_form(2))[0] >= -TOL.psd)


def is_fully_separable_symmetric(spec: SymmetricSpec) -> bool:
    """``(a - c1) [b - (n-1) c2] >= 1`` for a symmetric CM with ``c1, c2 >= 0``."""
    if spec.a <= 0 or spec.b <= 0 or spec.c1 < 0 or spec.c2 < 0:
        raise InvalidArgument("criterion needs a, b > 0 and c1, c2 >= 0")
    return bool(spec.f * spec.g >= 1.0 - TOL.equality)


@dataclass(frozen=True)
class FreeStateParams:
    """Boundary free states in standard form.

    ``a[j], b[j]`` are the diagonal variances of block ``j`` (x block first,
    then p block for two modes); ``a`` refers to mode 1, ``b`` to mode 2.
    For one mode there is a single block ``[[a, c], [c, b]]``.

    classical-boundary: ``c_j = kappa_j sqrt((a_j - 1)(b_j - 1))``;
    separable-boundary (two modes): ``c_1 = c_sigma1`` and ``c_2`` is solved
    from the PPT boundary condition.
    """

    kind: str
    n: int
    a: tuple
    b: tuple
    kappa: tuple = (1.0, 1.0)
    c_sigma1: Optional[float] = None

    def expand(self) -> np.ndarray:
        if self.kind == CLASSICAL_BOUNDARY:
            return classical_boundary_expand(self)
        if self.kind == SEPARABLE_BOUNDARY:
            return separable_boundary_expand(self)
        raise InvalidArgument(f"unknown free-state kind {self.kind!r}")


def standard_form_cm(a1, b1, c1, a2, b2, c2) -> np.ndarray:
    z = np.zeros((2, 2))
    return np.block(
        [[np.array([[a1, c1], [c1, b1]]), z], [z, np.array([[a2, -c2], [-c2, b2]])]]
    )


def classical_boundary_expand(p: FreeStateParams) -> np.ndarray:
    if p.kind != CLASSICAL_BOUNDARY:
        raise InvalidArgument("not a classical-boundary parameter set")
    blocks = 1 if p.n == 1 else 2
    if p.n not in (1, 2) or len(p.a) != blocks or len(p.b) != blocks:
        raise InvalidArgument("classical boundary chart covers one- and two-mode standard forms")
    a = np.asarray(p.a, dtype=float)
    b = np.asarray(p.b, dtype=float)
    if np.any(a < 1.0) or np.any(b < 1.0):
        raise InvalidArgument("classical boundary needs diagonal variances >= 1")
    kappa = np.asarray(p.kappa[:blocks], dtype=float)
    if np.any(kappa < 0.0) or np.any(kappa > 1.0):
        raise InvalidArgument("kappa must lie in [0, 1]")
    c = kappa * np.sqrt((a - 1.0) * (b - 1.0))
    if p.n == 1:
        return np.array([[a[0], c[0]], [c[0], b[0]]])
    return standard_form_cm(a[0], b[0], c[0], a[1], b[1], c[1])


def separable_c2(a1, b1, c1, a2, b2) -> Optional[float]:
    """Largest ``c2`` keeping the standard-form CM on the PPT boundary.

    Solves ``D1 (a2 b2 - c2^2) - 2 c1 c2 - a1 a2 - b1 b2 + 1 = 0`` with
    ``D1 = a1 b1 - c1^2``. Returns ``None`` when no real root exists.
    """
    D1 = a1 * b1 - c1 * c1
    if D1 <= 0:
        return None
    K = D1 * a2 * b2 - a1 * a2 - b1 * b2 + 1.0
    disc = c1 * c1 + D1 * K
    if disc < 0:
        return None
    return (-c1 + np.sqrt(disc)) / D1


def separable_boundary_expand(p: FreeStateParams) -> np.ndarray:
    if p.kind != SEPARABLE_BOUNDARY or p.n != 2:
        raise InvalidArgument("separable boundary chart covers two-mode standard forms")
    a1, a2 = p.a
    b1, b2 = p.b
    c1 = p.c_sigma1 if p.c_sigma1 is not None else 0.0
    c2 = separable_c2(a1, b1, c1, a2, b2)
    if c2 is None:
        raise InvalidArgument("no separable boundary point for these parameters")
    return standard_form_cm(a1, b1, c1, a2, b2, c2)
