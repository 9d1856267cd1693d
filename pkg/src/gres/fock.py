"""Brute-force truncated Fock-space representation of Gaussian operators.

Every zero-mean Gaussian operator here is written through its generating
function ``N exp(1/2 z^T M z)`` with ``z = (t_1..t_n, t'_1..t'_n)``; the
matrix element ``<l|.|m>`` is ``N sqrt(l! m!)`` times the coefficient of
``t^l t'^m``. The coefficients are obtained by expanding the exponential as a
power series of the quadratic form, which is exact up to the cutoff.
"""

from __future__ import annotations

import string
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .config import TOL
from .exceptions import InvalidArgument, RootNotFound, Unsupported
from .symplectic import (
    as_cm,
    complex_beta,
    complex_transform,
    hmat,
    num_modes,
    symplectic_form,
    williamson,
    _pauli_kron,
)

MAX_DIM = 4096
DEFAULT_CUTOFFS = {1: 40, 2: 12, 3: 4}


@dataclass(frozen=True)
class FockTensor:
    """Operator on ``cutoff**n`` Fock states, rows/cols flattened row-major."""

    n: int
    cutoff: int
    elements: np.ndarray
    prefactor: float = 1.0

    @property
    def trace_deficit(self) -> float:
        return float(1.0 - np.trace(self.elements).real)

    @property
    def hermiticity_error(self) -> float:
        return float(np.abs(self.elements - self.elements.conj().T).max())

    def truncate(self, cutoff: int) -> "FockTensor":
        """Restrict to ``k_j < cutoff`` on every mode."""
        if cutoff > self.cutoff:
            raise InvalidArgument("cannot enlarge a truncated tensor")
        K = self.cutoff
        t = self.elements.reshape((K,) * (2 * self.n))
        t = t[(slice(0, cutoff),) * (2 * self.n)]
        dim = cutoff**self.n
        return FockTensor(self.n, cutoff, t.reshape(dim, dim), self.prefactor)

    def tensor(self) -> np.ndarray:
        return self.elements.reshape((self.cutoff,) * (2 * self.n))


def _check_size(n: int, cutoff: int) -> None:
    if cutoff < 1:
        raise InvalidArgument(f"cutoff must be >= 1, got {cutoff}")
    if cutoff**n > MAX_DIM:
        raise Unsupported(
            f"cutoff**n = {cutoff}**{n} = {cutoff**n} exceeds the dense limit {MAX_DIM}"
        )


def generating_coefficients(M: np.ndarray, cutoff: int) -> np.ndarray:
    """Taylor coefficients of ``exp(1/2 z^T M z)`` with every degree < cutoff.

    Returns an array of shape ``(cutoff,) * len(z)``.
    """
    d = M.shape[0]
    K = cutoff
    # q_ij multiplies z_i z_j once per unordered pair
    pairs = []
    for i in range(d):
        for j in range(i, d):
            q = 0.5 * M[i, i] if i == j else 0.5 * (M[i, j] + M[j, i])
            if q == 0:
                continue
            shift = [0] * d
            shift[i] += 1
            shift[j] += 1
            if max(shift) >= K:
                continue
            dst = tuple(slice(s, None) for s in shift)
            src = tuple(slice(0, K - s) for s in shift)
            pairs.append((q, dst, src))

    term = np.zeros((K,) * d, dtype=complex)
    term[(0,) * d] = 1.0
    out = term.copy()
    for k in range(1, d * (K - 1) // 2 + 1):
        nxt = np.zeros_like(term)
        for q, dst, src in pairs:
            nxt[dst] += q * term[src]
        term = nxt / k
        if not term.any():
            break
        out += term
    return out


def _elements(M: np.ndarray, prefactor: float, n: int, cutoff: int) -> np.ndarray:
    coef = generating_coefficients(M, cutoff)
    half_log_fact = 0.5 * gammaln(np.arange(cutoff) + 1.0)
    weight = np.zeros((cutoff,) * (2 * n))
    for axis in range(2 * n):
        shape = [1] * (2 * n)
        shape[axis] = cutoff
        weight = weight + half_log_fact.reshape(shape)
    dim = cutoff**n
    return (prefactor * coef * np.exp(weight)).reshape(dim, dim)


def fock_elements(gamma, cutoff: int) -> FockTensor:
    """Truncated density matrix of the zero-mean Gaussian state with CM ``gamma``."""
    gamma = as_cm(gamma)
    n = num_modes(gamma)
    _check_size(n, cutoff)
    cb = complex_beta(gamma)
    return FockTensor(n, cutoff, _elements(cb.exponent_matrix, cb.normalization, n, cutoff))


def fock_elements_single_mode(gamma, cutoff: int) -> FockTensor:
    """Closed-form single-mode elements.

    With ``(L (gamma + I) L^T / 2)^-1 = [[B, A], [A, B']]``::

        rho_lm = sum_{k + 2j = l, k + 2i = m} sqrt(l! m!) / (k! i! j!)
                 * sqrt(A^2 - B B') (1 - A)^k (B/2)^j (B'/2)^i

    (``B' = B`` for CMs without x-p correlations).
    """
    gamma = as_cm(gamma)
    if gamma.shape != (2, 2):
        raise InvalidArgument("single-mode formula needs a 2 x 2 CM")
    if cutoff < 1:
        raise InvalidArgument(f"cutoff must be >= 1, got {cutoff}")
    L = complex_transform(1)
    inv = np.linalg.inv(0.5 * (L @ (gamma + np.eye(2)) @ L.T))
    B1, A, B2 = inv[0, 0], inv[0, 1], inv[1, 1]
    norm = np.sqrt(abs(A * A - B1 * B2))
    lf = gammaln(np.arange(cutoff) + 1.0)
    rho = np.zeros((cutoff, cutoff), dtype=complex)
    for l in range(cutoff):
        for m in range(cutoff):
            if (l - m) % 2:
                continue
            total = 0.0 + 0.0j
            for k in range(min(l, m) % 2, min(l, m) + 1, 2):
                j, i = (l - k) // 2, (m - k) // 2
                log_mag = 0.5 * (lf[l] + lf[m]) - lf[k] - lf[i] - lf[j]
                total += np.exp(log_mag) * (1 - A) ** k * (B1 / 2) ** j * (B2 / 2) ** i
            rho[l, m] = norm * total
    return FockTensor(1, cutoff, rho)


# --- brute-force Lambda -------------------------------------------------------


@dataclass(frozen=True)
class BruteForceLambda:
    value: float
    cutoffs: tuple
    converged: bool
    divergent: bool
    history: tuple = field(default=())


def _top_eig(mat: np.ndarray) -> float:
    herm = 0.5 * (mat + mat.conj().T)
    return float(np.linalg.eigvalsh(herm)[-1])


def brute_force_lambda(gamma, sigma, cutoff: int | None = None, min_cutoff: int | None = None) -> BruteForceLambda:
    """Top eigenvalue of the truncated ``sigma_th^-1/2 rho' sigma_th^-1/2``.

    Estimates are taken at cutoffs ``cutoff, cutoff - 2, ...`` down to
    ``min_cutoff`` (step 2 because Gaussian elements pair up by photon-number
    parity, so neighbouring cutoffs often give identical estimates). A run is
    divergent when the estimate grows by more than 2% twice in a row at the
    largest cutoffs; it is converged when the last two estimates differ by
    less than 1e-4 relative.
    """
    gamma = as_cm(gamma)
    gs = as_cm(sigma.expand() if hasattr(sigma, "expand") else sigma)
    n = num_modes(gamma)
    if cutoff is None:
        cutoff = DEFAULT_CUTOFFS.get(n, 3)
    _check_size(n, cutoff)
    if min_cutoff is None:
        min_cutoff = max(2, cutoff // 2)

    dec = williamson(gs)
    u = (dec.nu - 1.0) / (dec.nu + 1.0)
    if np.any(u <= TOL.equality):
        raise InvalidArgument("free state has a pure symplectic mode")
    S_inv = np.linalg.inv(dec.S)
    gp = S_inv @ gamma @ S_inv.T
    rho = fock_elements(gp, cutoff).tensor()

    # weight prod_i (1-u_i)^-1 u_i^-(l_i+m_i)/2 in log domain
    logw = np.full((cutoff,) * (2 * n), -np.sum(np.log1p(-u)))
    k = np.arange(cutoff)
    for axis in range(2 * n):
        shape = [1] * (2 * n)
        shape[axis] = cutoff
        logw = logw + (-0.5 * k * np.log(u[axis % n])).reshape(shape)
    with np.errstate(over="ignore", invalid="ignore"):
        varrho = rho * np.exp(logw)

    history = []
    levels = list(range(cutoff, min_cutoff - 1, -2))[::-1]
    for kc in levels:
        block = varrho[(slice(0, kc),) * (2 * n)].reshape(kc**n, kc**n)
        # overflowing weights only happen when the operator is unbounded
        history.append(_top_eig(block) if np.all(np.isfinite(block)) else np.inf)

    if not np.all(np.isfinite(history)):
        return BruteForceLambda(np.inf, tuple(levels[-2:]), False, True, tuple(history))
    growth = [history[i + 1] / history[i] - 1.0 for i in range(len(history) - 1)]
    divergent = len(growth) >= 2 and growth[-1] > 0.02 and growth[-2] > 0.02
    converged = (
        not divergent
        and len(history) >= 2
        and abs(history[-1] - history[-2]) <= 1e-4 * abs(history[-1])
    )
    return BruteForceLambda(
        value=history[-1],
        cutoffs=tuple(levels[-2:]),
        converged=converged,
        divergent=divergent,
        history=tuple(history),
    )


# --- witness operators --------------------------------------------------------


def fmat(n: int, sym: float, rest: float) -> np.ndarray:
    """Symmetric matrix with eigenvalue ``sym`` on (1,..,1) and ``rest`` elsewhere."""
    return hmat(n, (sym + (n - 1) * rest) / n, (sym - rest) / n)


@dataclass(frozen=True)
class WitnessEigenParams:
    """Symmetric witness CM ``F_n(a, b) (+) F_n(c, d)`` in eigenvalue form.

    ``a, b`` are the x-block eigenvalues on the symmetric vector and its
    complement, ``c, d`` the p-block ones. These are not the state
    parameters of :class:`~gres.symplectic.SymmetricSpec`.
    """

    n: int
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) <= 0:
            raise InvalidArgument("witness eigenvalues must be positive")
        if self.a * self.c < 1 - 1e-12 or self.b * self.d < 1 - 1e-12:
            raise InvalidArgument("witness CM violates the uncertainty relation")

    @classmethod
    def from_cm_params(cls, n, a_w, b_w, c_w1, c_w2) -> "WitnessEigenParams":
        """From ``H_n(a_w, c_w1) (+) H_n(b_w, c_w2)``."""
        return cls(n, a_w + (n - 1) * c_w1, a_w - c_w1, b_w + (n - 1) * c_w2, b_w - c_w2)

    def gamma(self, y: float = 1.0) -> np.ndarray:
        """Witness CM after the local presqueezing ``x -> x / y, p -> y p``."""
        n = self.n
        zero = np.zeros((n, n))
        return np.block(
            [[fmat(n, self.a, self.b) / y, zero], [zero, y * fmat(n, self.c, self.d)]]
        )

    def beta(self, y: float = 1.0) -> np.ndarray:
        return complex_beta(self.gamma(y)).beta


def nullify_residual(y: float, a: float, b: float, c: float, d: float, n: int) -> float:
    return -y / (a + y) + 1.0 / (c * y + 1.0) - (n - 1) * y / (b + y) + (n - 1) / (d * y + 1.0)


def presqueeze_nullify(a: float, b: float, c: float, d: float, n: int) -> float:
    """Presqueezing ``y > 0`` that zeroes the diagonal of ``s1 (x) I + beta(y)``.

    The residual is strictly decreasing from ``n`` at ``y = 0`` to ``-n`` at
    infinity, so the root is unique; it is bracketed and refined by Brent's
    method.
    """
    if min(a, b, c, d) <= 0:
        raise InvalidArgument("presqueeze parameters must be positive")
    f = lambda y: nullify_residual(y, a, b, c, d, n)  # noqa: E731
    hi = 1.0
    for _ in range(200):
        if f(hi) < 0:
            break
        hi *= 2.0
    else:
        raise RootNotFound(f"no sign change up to y = {hi:.3e} (residual {f(hi):.3e})")
    lo = hi / 2.0
    while f(lo) < 0:
        lo /= 2.0
        if lo < 1e-300:
            raise RootNotFound("residual negative arbitrarily close to zero")
    return float(brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500))


def witness_fock(beta: np.ndarray, cutoff: int) -> FockTensor:
    """Fock tensor of the Gaussian witness with generating matrix ``beta``.

    The diagonal of ``s1 (x) I + beta`` must already be nullified.
    """
    beta = np.asarray(beta, dtype=complex)
    n = beta.shape[0] // 2
    _check_size(n, cutoff)
    M = _pauli_kron(n)[0] + beta
    diag = np.abs(np.diag(M)).max()
    if diag > 1e-10:
        raise InvalidArgument(f"diagonal of s1 + beta is not nullified (max {diag:.3e})")
    prefactor = float(np.sqrt(abs(np.linalg.det(beta))))
    return FockTensor(n, cutoff, _elements(M, prefactor, n, cutoff), prefactor)


# --- product-state maximisation -----------------------------------------------


@dataclass(frozen=True)
class ProductPureState:
    coefficients: tuple

    def __post_init__(self):
        for c in self.coefficients:
            if abs(np.linalg.norm(c) - 1.0) > 1e-12:
                raise InvalidArgument("product-state factors must be unit vectors")

    def is_vacuum(self, tol: float = 1e-6) -> bool:
        return all(abs(abs(c[0]) - 1.0) <= tol for c in self.coefficients)

    def vector(self) -> np.ndarray:
        out = np.array([1.0 + 0j])
        for c in self.coefficients:
            out = np.kron(out, c)
        return out


@dataclass(frozen=True)
class ProductMeanResult:
    mean: float
    m0: float
    state: ProductPureState
    converged: bool


def _mode_matrix(W: np.ndarray, vecs: list, j: int) -> np.ndarray:
    n = len(vecs)
    rows = string.ascii_lowercase[:n]
    cols = string.ascii_lowercase[n : 2 * n]
    operands = [W]
    spec = [rows + cols]
    for i in range(n):
        if i == j:
            continue
        operands += [vecs[i].conj(), vecs[i]]
        spec += [rows[i], cols[i]]
    expr = ",".join(spec) + "->" + rows[j] + cols[j]
    return np.einsum(expr, *operands, optimize=True)


def _mean(W: np.ndarray, vecs: list) -> float:
    return float(np.real(_mode_matrix(W, vecs, 0) @ vecs[0] @ vecs[0].conj()))


def max_product_mean(
    omega: FockTensor, starts: int = 8, seed: int = 0, max_sweeps: int = 500, tol: float = 1e-10
) -> ProductMeanResult:
    """Maximise ``<psi|omega|psi>`` over product pure states.

    Alternating maximisation: with all factors but one fixed the mean is a
    Hermitian quadratic form in the free factor, which is replaced by its top
    eigenvector. Runs from the vacuum and ``starts`` random product states.
    """
    n, K = omega.n, omega.cutoff
    W = omega.tensor()
    W = 0.5 * (W + np.conj(W.reshape(K**n, K**n).T).reshape(W.shape))
    rng = np.random.default_rng(seed)

    inits = [[np.eye(K, dtype=complex)[0] for _ in range(n)]]
    for _ in range(starts):
        vecs = []
        for _ in range(n):
            v = rng.standard_normal(K) + 1j * rng.standard_normal(K)
            vecs.append(v / np.linalg.norm(v))
        inits.append(vecs)

    best = None
    all_converged = True
    for vecs in inits:
        vecs = [v.copy() for v in vecs]
        value = _mean(W, vecs)
        converged = False
        for _ in range(max_sweeps):
            for j in range(n):
                A = _mode_matrix(W, vecs, j)
                w, v = np.linalg.eigh(0.5 * (A + A.conj().T))
                top = v[:, -1]
                # fix the global phase so that the vacuum amplitude is real >= 0
                idx = int(np.argmax(np.abs(top) > 1e-12))
                top = top * np.exp(-1j * np.angle(top[idx]))
                vecs[j] = top / np.linalg.norm(top)
            new = _mean(W, vecs)
            if abs(new - value) <= tol * max(1.0, abs(new)):
                value = new
                converged = True
                break
            value = new
        all_converged &= converged
        if best is None or value > best[0] + 1e-14:
            best = (value, [v.copy() for v in vecs])

    value, vecs = best
    return ProductMeanResult(
        mean=value,
        m0=value / omega.prefactor,
        state=ProductPureState(tuple(vecs)),
        converged=all_converged,
    )


@dataclass(frozen=True)
class WitnessReport:
    params: WitnessEigenParams
    cutoff: int
    y: float
    m0: float
    vacuum_maximizer: bool
    converged: bool
    nullification: float
    hermiticity_error: float
    seconds: float

    def to_dict(self) -> dict:
        p = self.params
        return {
            "n": p.n,
            "params": {"a": p.a, "b": p.b, "c": p.c, "d": p.d},
            "cutoff": self.cutoff,
            "y": self.y,
            "M0": self.m0,
            "maximizer": "vacuum" if self.vacuum_maximizer else "non-vacuum",
            "converged": self.converged,
            "nullification_residual": self.nullification,
            "hermiticity_error": self.hermiticity_error,
            "seconds": self.seconds,
        }


def verify_witness(params: WitnessEigenParams, cutoff: int, starts: int = 8, seed: int = 0) -> WitnessReport:
    """Presqueeze, build the witness in the Fock basis and maximise its product-state mean."""
    _check_size(params.n, cutoff)
    t0 = time.perf_counter()
    y = presqueeze_nullify(params.a, params.b, params.c, params.d, params.n)
    beta = params.beta(y)
    M = _pauli_kron(params.n)[0] + beta
    omega = witness_fock(beta, cutoff)
    res = max_product_mean(omega, starts=starts, seed=seed)
    return WitnessReport(
        params=params,
        cutoff=cutoff,
        y=y,
        m0=res.m0,
        vacuum_maximizer=res.state.is_vacuum(),
        converged=res.converged,
        nullification=float(np.abs(np.diag(M)).max()),
        hermiticity_error=omega.hermiticity_error,
        seconds=time.perf_counter() - t0,
    )


def ppt_partial_transpose_check(gamma) -> bool:
    """True when the partially transposed two-mode CM is physical (separable)."""
    gamma = as_cm(gamma)
    if num_modes(gamma) != 2:
        raise InvalidArgument("partial-transpose check is for two-mode CMs")
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    pt = flip @ gamma @ flip
    lam = np.linalg.eigvalsh(pt + 1j * symplectic_form(2))[0]
    return bool(lam >= -1e-10)
