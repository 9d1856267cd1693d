"""Covariance matrices, the symplectic form and Williamson normal form.

Conventions used throughout the package:

* quadratures are ordered ``(x_1, ..., x_n, p_1, ..., p_n)``;
* the vacuum (and every coherent state) has covariance matrix ``I``;
* the symplectic form is ``Delta = [[0, -I], [I, 0]]``;
* first moments are always zero, so a state is fully described by its CM.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .config import TOL
from .exceptions import InvalidArgument, SingularState


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def _symplectic_form(n: int) -> np.ndarray:
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return _frozen(np.block([[zero, -eye], [eye, zero]]))


def symplectic_form(n: int) -> np.ndarray:
    """Return the ``2n x 2n`` symplectic form ``[[0, -I], [I, 0]]`` (read-only)."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidArgument(f"mode count must be a positive integer, got {n!r}")
    return _symplectic_form(int(n))


def num_modes(gamma: np.ndarray) -> int:
    gamma = np.asarray(gamma)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2:
        raise InvalidArgument(f"expected a 2n x 2n matrix, got shape {gamma.shape}")
    return gamma.shape[0] // 2


def as_cm(gamma) -> np.ndarray:
    """Validate ``gamma`` as a real symmetric even-dimensional matrix.

    Only the symmetric part is kept, so tiny asymmetries from upstream
    arithmetic are removed.
    """
    gamma = np.asarray(gamma, dtype=float)
    num_modes(gamma)
    if not np.all(np.isfinite(gamma)):
        raise InvalidArgument("covariance matrix has non-finite entries")
    scale = np.maximum(1.0, np.abs(gamma))
    if np.any(np.abs(gamma - gamma.T) > TOL.symmetry * scale):
        raise InvalidArgument("covariance matrix is not symmetric")
    return 0.5 * (gamma + gamma.T)


@dataclass(frozen=True)
class PhysicalityReport:
    physical: bool
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return self.physical


def is_physical(gamma) -> PhysicalityReport:
    """Check the uncertainty relation ``gamma + i Delta >= 0``."""
    gamma = as_cm(gamma)
    n = num_modes(gamma)
    lam = np.linalg.eigvalsh(gamma + 1j * symplectic_form(n))[0]
    return PhysicalityReport(bool(lam >= -TOL.psd), float(lam))


def _psd_sqrt(gamma: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(gamma)
    if w[0] <= 0.0:
        raise InvalidArgument(
            f"covariance matrix is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    return (v * np.sqrt(w)) @ v.T


def symplectic_eigenvalues(gamma) -> np.ndarray:
    """Symplectic eigenvalues of ``gamma``, sorted in descending order.

    They are the moduli of the eigenvalues ``+-i nu`` of ``Delta^-1 gamma``;
    numerically we diagonalise the Hermitian matrix
    ``i gamma^1/2 Delta^-1 gamma^1/2``, which is similar up to a factor ``i``.
    """
    gamma = as_cm(gamma)
    n = num_modes(gamma)
    root = _psd_sqrt(gamma)
    herm = 1j * root @ (-symplectic_form(n)) @ root
    w = np.linalg.eigvalsh(herm)
    return w[n:][::-1].copy()


@dataclass(frozen=True)
class SymplecticDecomposition:
    """``gamma = S diag(nu, nu) S^T`` with ``S`` symplectic."""

    S: np.ndarray
    nu: np.ndarray

    @property
    def n(self) -> int:
        return len(self.nu)

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(np.concatenate([self.nu, self.nu]))

    def reconstruct(self) -> np.ndarray:
        return self.S @ self.diagonal @ self.S.T


def _williamson_diagonal(gamma: np.ndarray, n: int):
    """Shortcut for CMs that are already ``diag(nu, nu)`` up to mode order."""
    if np.count_nonzero(gamma - np.diag(np.diag(gamma))):
        return None
    d = np.diag(gamma)
    if not np.array_equal(d[:n], d[n:]):
        return None
    order = np.argsort(-d[:n], kind="stable")
    perm = np.zeros((n, n))
    perm[order, np.arange(n)] = 1.0
    zero = np.zeros((n, n))
    S = np.block([[perm, zero], [zero, perm]])
    return SymplecticDecomposition(S, d[:n][order].copy())


def williamson(gamma) -> SymplecticDecomposition:
    """Williamson decomposition of a positive definite CM.

    With ``A = gamma^-1/2 Delta gamma^-1/2`` (real antisymmetric), the
    Hermitian matrix ``iA`` has eigenpairs ``(+-lambda_k, v_k)``. Writing
    ``v_k = (e_k + i f_k) / sqrt(2)`` for the positive branch gives an
    orthonormal basis with ``A e = lambda f`` and ``A f = -lambda e``; then
    ``S = gamma^1/2 [e | f] diag(sqrt(lambda), sqrt(lambda))`` and
    ``nu = 1 / lambda``.

    Each ``v_k`` is rephased so that its largest entry (first one on ties) is
    real and positive, which makes the output deterministic. ``nu`` is
    sorted in descending order.
    """
    gamma = as_cm(gamma)
    n = num_modes(gamma)
    shortcut = _williamson_diagonal(gamma, n)
    if shortcut is not None:
        if shortcut.nu[-1] <= 0:
            raise InvalidArgument("covariance matrix is not positive definite")
        return shortcut

    w, v = np.linalg.eigh(gamma)
    if w[0] <= 0.0:
        raise InvalidArgument(
            f"covariance matrix is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    root = (v * np.sqrt(w)) @ v.T
    inv_root = (v / np.sqrt(w)) @ v.T
    A = inv_root @ symplectic_form(n) @ inv_root
    lam, vec = np.linalg.eigh(1j * A)
    lam = lam[n:]
    vec = vec[:, n:]

    mags = np.abs(vec)
    for k in range(n):
        j = int(np.flatnonzero(mags[:, k] >= mags[:, k].max() * (1 - 1e-8))[0])
        vec[:, k] *= np.conj(vec[j, k]) / mags[j, k]

    e = np.sqrt(2.0) * vec.real
    f = np.sqrt(2.0) * vec.imag
    O = np.hstack([e, f])
    scale = np.sqrt(np.concatenate([lam, lam]))
    S = root @ O * scale
    return SymplecticDecomposition(S, 1.0 / lam)


def hmat(n: int, diag: float, off: float) -> np.ndarray:
    """``n x n`` matrix with ``diag`` on the diagonal and ``off`` elsewhere."""
    return np.full((n, n), float(off)) + (float(diag) - float(off)) * np.eye(n)


def symmetric_diagonalizer(n: int) -> np.ndarray:
    """Orthogonal symplectic ``X (+) X`` that diagonalises symmetric CMs.

    Row 0 of ``X`` is the uniform vector; row ``k`` (k >= 1) is the
    normalised Helmert contrast ``(1, ..., 1, -k, 0, ..., 0)`` with ``k``
    leading ones.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidArgument(f"symmetric diagonalizer needs n >= 2, got {n!r}")
    X = np.zeros((n, n))
    X[0] = 1.0 / np.sqrt(n)
    for k in range(1, n):
        X[k, :k] = 1.0
        X[k, k] = -float(k)
        X[k] /= np.sqrt(k * (k + 1))
    zero = np.zeros((n, n))
    return np.block([[X, zero], [zero, X]])


@dataclass(frozen=True)
class TwoModeStandardForm:
    """Two-mode CM ``[[a, c1], [c1, b]] (+) [[a, -c2], [-c2, b]]``."""

    a: float
    b: float
    c1: float
    c2: float

    def expand(self) -> np.ndarray:
        gx = np.array([[self.a, self.c1], [self.c1, self.b]], dtype=float)
        gp = np.array([[self.a, -self.c2], [-self.c2, self.b]], dtype=float)
        return np.block([[gx, np.zeros((2, 2))], [np.zeros((2, 2)), gp]])

    @classmethod
    def squeezed_thermal(cls, nu1: float, nu2: float, r: float) -> "TwoModeStandardForm":
        """Two-mode squeezed thermal state ``S2(r) (tau_nu1 x tau_nu2) S2(r)^+``."""
        nup = 0.5 * (nu1 + nu2)
        num = 0.5 * (nu1 - nu2)
        c = nup * np.sinh(2 * r)
        return cls(nup * np.cosh(2 * r) + num, nup * np.cosh(2 * r) - num, c, c)

    @property
    def is_squeezed_thermal(self) -> bool:
        return abs(self.c1 - self.c2) <= 1e-12 * max(1.0, abs(self.c1))


@dataclass(frozen=True)
class SymmetricSpec:
    """n-mode symmetric CM ``H_n(a, c1) (+) H_n(b, -c2)``."""

    n: int
    a: float
    b: float
    c1: float
    c2: float

    def __post_init__(self):
        if self.n < 2:
            raise InvalidArgument(f"symmetric states need n >= 2, got {self.n}")

    def expand(self) -> np.ndarray:
        n = self.n
        zero = np.zeros((n, n))
        return np.block(
            [[hmat(n, self.a, self.c1), zero], [zero, hmat(n, self.b, -self.c2)]]
        )

    @property
    def e(self) -> float:
        return self.a + (self.n - 1) * self.c1

    @property
    def f(self) -> float:
        return self.a - self.c1

    @property
    def g(self) -> float:
        return self.b - (self.n - 1) * self.c2

    @property
    def h(self) -> float:
        return self.b + self.c2

    def mode_blocks(self):
        """Single-mode CMs ``diag(e, g)`` and ``diag(f, h)`` after rotation.

        The first occurs once, the second ``n - 1`` times.
        """
        return np.diag([self.e, self.g]), np.diag([self.f, self.h])

    @classmethod
    def ghz(cls, n: int, r: float, eta: float = 0.0) -> "SymmetricSpec":
        """CV-GHZ state, optionally sent through thermal channels ``e^{2 eta}``."""
        scale = np.exp(2 * eta)
        up, dn = np.exp(2 * r), np.exp(-2 * r)
        a = scale * (up + (n - 1) * dn) / n
        b = scale * (dn + (n - 1) * up) / n
        c = scale * (up - dn) / n
        return cls(n, a, b, c, c)


def expand(spec: Union[SymmetricSpec, TwoModeStandardForm]) -> np.ndarray:
    if isinstance(spec, (SymmetricSpec, TwoModeStandardForm)):
        return spec.expand()
    raise InvalidArgument(f"cannot expand {type(spec).__name__}")


@lru_cache(maxsize=None)
def _pauli_kron(n: int):
    eye = np.eye(n)
    s1 = np.kron(np.array([[0.0, 1.0], [1.0, 0.0]]), eye)
    s3 = np.kron(np.diag([1.0, -1.0]), eye)
    return _frozen(s1), _frozen(s3)


@lru_cache(maxsize=None)
def complex_transform(n: int) -> np.ndarray:
    """Unitary ``L`` mapping real quadratures to the complex (t, t') frame."""
    eye = np.eye(n)
    return _frozen(np.block([[-1j * eye, -eye], [1j * eye, -eye]]) / np.sqrt(2.0))


@dataclass(frozen=True)
class ComplexBeta:
    beta: np.ndarray
    normalization: float

    @property
    def exponent_matrix(self) -> np.ndarray:
        """``sigma_1 (x) I + beta``, the quadratic form of the generating function."""
        n = self.beta.shape[0] // 2
        return _pauli_kron(n)[0] + self.beta


def complex_beta(gamma) -> ComplexBeta:
    """Fock-space generating matrix ``beta`` of a zero-mean Gaussian state.

    ``beta = (s3 x I)(L gamma L^T / 2 + s1 x I / 2)^-1 (s3 x I)``; the state
    normalization is ``|det beta|^1/2 = 2^n det(gamma + I)^-1/2``.
    """
    gamma = as_cm(gamma)
    n = num_modes(gamma)
    det_plus = np.linalg.det(gamma + np.eye(2 * n))
    if not abs(det_plus) > 1e-300 or np.linalg.cond(gamma + np.eye(2 * n)) > 1e14:
        raise SingularState("gamma + I is singular")
    L = complex_transform(n)
    s1, s3 = _pauli_kron(n)
    inner = 0.5 * (L @ gamma @ L.T) + 0.5 * s1
    beta = s3 @ np.linalg.inv(inner) @ s3
    return ComplexBeta(beta, float(np.sqrt(abs(np.linalg.det(beta)))))


def gamma_from_beta(beta: np.ndarray, imag_tol: float = 1e-8) -> np.ndarray:
    """Invert :func:`complex_beta`, returning the real CM.

    Raises :class:`SingularState` if ``beta`` is not invertible and
    :class:`InvalidArgument` if the recovered matrix is not real.
    """
    n = beta.shape[0] // 2
    L = complex_transform(n)
    s1, s3 = _pauli_kron(n)
    core = s3 @ beta @ s3
    if np.linalg.cond(core) > 1e14:
        raise SingularState("beta is singular")
    gt_plus = 2.0 * np.linalg.inv(core)
    gamma_plus = L.conj().T @ gt_plus @ L.conj()
    scale = max(1.0, float(np.abs(gamma_plus).max()))
    if np.abs(gamma_plus.imag).max() > imag_tol * scale:
        raise InvalidArgument("beta does not describe a real covariance matrix")
    g = gamma_plus.real - np.eye(2 * n)
    return 0.5 * (g + g.T)


# --- sampling helpers (used by tests and property checks) -------------------


def orthogonal_symplectic(U: np.ndarray) -> np.ndarray:
    """Real orthogonal symplectic matrix ``[[Re U, -Im U], [Im U, Re U]]``."""
    U = np.asarray(U, dtype=complex)
    return np.block([[U.real, -U.imag], [U.imag, U.real]])


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_orthogonal_symplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    return orthogonal_symplectic(random_unitary(n, rng))


def random_symplectic(n: int, rng: np.random.Generator, max_squeeze: float = 1.0) -> np.ndarray:
    """Bloch-Messiah product ``O1 diag(e^r, e^-r) O2`` with random factors."""
    r = rng.uniform(-max_squeeze, max_squeeze, size=n)
    squeeze = np.diag(np.exp(np.concatenate([r, -r])))
    return (
        random_orthogonal_symplectic(n, rng)
        @ squeeze
        @ random_orthogonal_symplectic(n, rng)
    )


def random_physical_cm(
    n: int, rng: np.random.Generator, max_squeeze: float = 1.0, max_nu: float = 3.0
) -> np.ndarray:
    nu = rng.uniform(1.0, max_nu, size=n)
    S = random_symplectic(n, rng, max_squeeze)
    g = S @ np.diag(np.concatenate([nu, nu])) @ S.T
    return 0.5 * (g + g.T)


# --- JSON I/O ---------------------------------------------------------------


def cm_from_json(text: str) -> np.ndarray:
    """Parse ``{"n": int, "ordering": "xxpp", "matrix": [[...]]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidArgument("CM document must be a JSON object")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidArgument("field 'n' must be a positive integer")
    if doc.get("ordering", "xxpp") != "xxpp":
        raise InvalidArgument("only the 'xxpp' ordering is supported")
    rows = doc.get("matrix")
    if not isinstance(rows, list) or len(rows) != 2 * n:
        raise InvalidArgument(f"'matrix' must have {2 * n} rows")
    for row in rows:
        if not isinstance(row, list) or len(row) != 2 * n:
            raise InvalidArgument(f"every row of 'matrix' must have {2 * n} entries")
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise InvalidArgument("matrix entries must be numbers")
    return as_cm(np.array(rows, dtype=float))


def cm_to_json(gamma) -> str:
    gamma = as_cm(gamma)
    return json.dumps(
        {"n": num_modes(gamma), "ordering": "xxpp", "matrix": gamma.tolist()}
    )
