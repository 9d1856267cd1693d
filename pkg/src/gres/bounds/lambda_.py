"""Largest eigenvalue of ``sigma^-1/2 rho sigma^-1/2`` for Gaussian rho, sigma.

Writing ``sigma = U_F sigma_th U_F^+`` (Williamson), the operator is unitarily
equivalent to ``sigma_th^-1/2 rho' sigma_th^-1/2`` with ``rho' = U_F^+ rho U_F``.
In the Fock generating function of ``rho'`` the thermal weights act as a
rescaling ``(t, t') -> Gamma (t, t')``, so the result is again a (possibly
unnormalisable) Gaussian operator proportional to a state ``rho''``; its top
eigenvalue follows from the symplectic spectrum of ``rho''``.

Everything is expressed through ``A = (gamma'' + I)^-1`` and ``t = 1/nu''``,
which remain finite where ``rho''`` degenerates into an operator with flat
directions (e.g. ``sigma = rho`` gives ``Lambda = 1``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import TOL
from . import _small
from ..exceptions import InvalidArgument, Nonexistence
from ..symplectic import (
    _pauli_kron,
    as_cm,
    complex_beta,
    complex_transform,
    num_modes,
    symplectic_form,
    williamson,
)


@dataclass(frozen=True)
class LambdaContext:
    """Intermediate quantities of one Lambda evaluation.

    ``a_second = (gamma'' + I)^-1`` and ``t_second = 1 / nu''``. Both stay
    finite where ``rho''`` stops being normalisable (``t -> 0``), which is
    where the free state touches the state along a whole mode.
    """

    u: np.ndarray
    gamma_prime: np.ndarray
    a_second: np.ndarray
    t_second: np.ndarray
    value: float

    @property
    def nu_second(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 1.0 / self.t_second

    @property
    def gamma_second(self) -> np.ndarray | None:
        """CM of ``rho''``; ``None`` when it is not normalisable."""
        if np.any(self.t_second == 0.0):
            return None
        return np.linalg.inv(self.a_second) - np.eye(len(self.a_second))


def _value(u, det_gp_plus, det_b, t) -> float:
    """``prod(1 - u)^-1 2^n det(gamma'+I)^-1/2 det(I - A)^-1/2 / prod(1 + t)``."""
    n = len(u)
    return float(2.0**n / (np.prod((1.0 - u) * (1.0 + t)) * np.sqrt(det_gp_plus * det_b)))


def _edge_t(t_sq: np.ndarray):
    """``t`` from (possibly slightly negative) ``t^2``; ``None`` if unphysical."""
    t = np.sqrt(np.maximum(np.sort(t_sq.real), 0.0))
    if t[-1] > 1.0 + TOL.nu_floor:
        return None
    return np.minimum(t, 1.0)


def _symplectic_t(M: np.ndarray) -> np.ndarray:
    """Squared symplectic eigenvalues of a PSD (possibly singular) matrix."""
    n = M.shape[0] // 2
    w = np.linalg.eigvals(symplectic_form(n) @ M)
    return np.sort(w.imag**2)[::2]


def _from_core(core: np.ndarray, n: int, tol: float):
    """``A = (gamma'' + I)^-1`` from the complex-frame core; ``None`` if Lambda is infinite."""
    L = complex_transform(n)
    A = 0.5 * (L.T @ core @ L)
    scale = max(1.0, float(np.abs(A).max()))
    if not np.isfinite(scale) or np.abs(A.imag).max() > 1e-8 * scale:
        return None
    A = 0.5 * (A.real + A.real.T)
    eye = np.eye(2 * n)
    if np.linalg.eigvalsh(A)[0] < -tol or np.linalg.eigvalsh(eye - A)[0] <= 0.0:
        return None
    return A


def _as_sigma(sigma) -> np.ndarray:
    expand = getattr(sigma, "expand", None)
    return as_cm(expand() if expand is not None else sigma)


def lambda_context(gamma, sigma) -> LambdaContext:
    """Run the full pipeline and return every intermediate quantity.

    ``sigma`` is either a CM or anything with an ``expand()`` method
    (e.g. :class:`~gres.criteria.FreeStateParams`). Raises
    :class:`~gres.exceptions.Nonexistence` when the conjugated operator is
    unbounded, i.e. ``rho''`` is not a physical state.
    """
    gamma = as_cm(gamma)
    gs = _as_sigma(sigma)
    n = num_modes(gamma)
    if num_modes(gs) != n:
        raise InvalidArgument("state and free state have different mode counts")

    try:
        dec = williamson(gs)
    except InvalidArgument as exc:
        raise Nonexistence(f"free state CM is degenerate: {exc}") from exc
    u = (dec.nu - 1.0) / (dec.nu + 1.0)
    if np.any(u <= 1e-12):
        raise Nonexistence("free state has a pure symplectic mode (nu_sigma = 1)")

    S_inv = np.linalg.inv(dec.S)
    gp = S_inv @ gamma @ S_inv.T
    gp = 0.5 * (gp + gp.T)
    beta_p = complex_beta(gp).beta

    s1 = _pauli_kron(n)[0]
    scale = np.concatenate([1.0 / np.sqrt(u), 1.0 / np.sqrt(u)])
    beta_pp = scale[:, None] * (beta_p + s1) * scale[None, :] - s1

    s3 = _pauli_kron(n)[1]
    A = _from_core(s3 @ beta_pp @ s3, n, 1e-10 * max(1.0, float(np.max(1.0 / u))))
    if A is None:
        raise Nonexistence("sigma^-1/2 rho sigma^-1/2 is unbounded")
    eye = np.eye(2 * n)
    B = eye - A
    t = _edge_t(_symplectic_t(np.linalg.solve(B, A)))
    if t is None:
        raise Nonexistence("rho'' violates the uncertainty relation")
    value = _value(u, np.linalg.det(gp + eye), np.linalg.det(B), t)
    return LambdaContext(u, gp, A, t, value)


def lambda_upper(gamma, sigma) -> float:
    """Largest eigenvalue of ``sigma^-1/2 rho sigma^-1/2``.

    Raises :class:`~gres.exceptions.Nonexistence` if it is unbounded.
    """
    return lambda_context(gamma, sigma).value


def lambda_or_inf(gamma, sigma) -> float:
    """:func:`lambda_upper` with nonexistence mapped to ``+inf``."""
    try:
        return lambda_context(gamma, sigma).value
    except Nonexistence:
        return np.inf


def lambda_fast(gamma: np.ndarray, gs: np.ndarray) -> float:
    """Same value as :func:`lambda_or_inf` for pre-validated inputs, with less overhead.

    Intended for optimiser inner loops. The Williamson phase fixing is skipped
    since thermal states are phase invariant, and ``S^-1`` is formed from the
    orthonormal eigenbasis instead of a general inverse.
    """
    dim = gamma.shape[0]
    n = dim // 2
    D = symplectic_form(n)
    s1 = _pauli_kron(n)[0]
    L = complex_transform(n)
    eye = np.eye(dim)

    w, v = np.linalg.eigh(gs)
    if w[0] <= 0.0:
        return np.inf
    # finite Lambda needs gamma_sigma >= gamma (observed on all sampled pairs);
    # rejecting early also avoids ill-conditioned inversions near that edge
    if np.linalg.eigvalsh(gs - gamma)[0] < -1e-12 * w[-1]:
        return np.inf
    inv_root = (v / np.sqrt(w)) @ v.T
    lam, vec = np.linalg.eigh(1j * (inv_root @ D @ inv_root))
    lam = lam[n:]
    u = (1.0 - lam) / (1.0 + lam)
    if np.any(u <= 1e-12):
        return np.inf
    vec = vec[:, n:] * np.sqrt(2.0)
    O = np.hstack([vec.real, vec.imag])
    lam2 = np.concatenate([lam, lam])
    S_inv = (O.T @ inv_root) / np.sqrt(lam2)[:, None]

    gp = S_inv @ gamma @ S_inv.T
    gp_plus = 0.5 * (gp + gp.T) + eye
    inner = np.linalg.inv(L @ gp_plus @ L.T)
    g = 1.0 / np.sqrt(np.concatenate([u, u]))
    core = g[:, None] * (2.0 * inner - s1) * g[None, :] + s1
    A = _from_core(core, n, 1e-10 * max(1.0, float(np.max(g)) ** 2))
    if A is None:
        return np.inf
    B = eye - A
    t = _edge_t(_symplectic_t(np.linalg.solve(B, A)))
    if t is None:
        return np.inf
    det = np.linalg.det(gp_plus) * np.linalg.det(B)
    if not det > 0:
        return np.inf
    return _value(u, det, 1.0, t)


def _xp_blocks(gamma: np.ndarray):
    n = gamma.shape[0] // 2
    return gamma[:n, :n], gamma[n:, n:]


def is_xp_block_diagonal(gamma: np.ndarray) -> bool:
    n = gamma.shape[0] // 2
    return not np.any(gamma[:n, n:])


def lambda_xp(gamma: np.ndarray, gs: np.ndarray) -> float:
    """Lambda for CMs without x-p correlations, in real ``n x n`` arithmetic.

    For ``gamma = X (+) P`` the complex-frame matrices have the block form
    ``[[A, B], [B, A]]`` with ``A + B = P + I`` and ``A - B = -(X + I)``, and
    the thermal rescaling preserves it. Hence
    ``X'' + I = 2 [G (2 (X' + I)^-1 - I) G + I]^-1`` (same for ``P``) with
    ``G = diag(u^-1/2)``. Returns ``+inf`` where :func:`lambda_fast` would.
    """
    X, P = _xp_blocks(gamma)
    Xs, Ps = _xp_blocks(gs)
    n = X.shape[0]
    eye = np.eye(n)

    w, v = np.linalg.eigh(Xs)
    if w[0] <= 0.0 or np.linalg.eigvalsh(Ps)[0] <= 0.0:
        return np.inf
    scale = max(w[-1], 1.0)
    if (np.linalg.eigvalsh(Xs - X)[0] < -1e-12 * scale
            or np.linalg.eigvalsh(Ps - P)[0] < -1e-12 * scale):
        return np.inf
    root = (v * np.sqrt(w)) @ v.T
    inv_root = (v / np.sqrt(w)) @ v.T
    nu2, O = np.linalg.eigh(root @ Ps @ root)
    nu = np.sqrt(nu2)
    u = (nu - 1.0) / (nu + 1.0)
    if np.any(u <= 1e-12):
        return np.inf
    A_inv = (O.T @ inv_root) * np.sqrt(nu)[:, None]   # A = Xs^1/2 O nu^-1/2
    A = root @ O / np.sqrt(nu)[None, :]
    Xp = A_inv @ X @ A_inv.T + eye
    Pp = A.T @ P @ A + eye

    g = 1.0 / np.sqrt(u)
    cx = g[:, None] * (2.0 * np.linalg.inv(Xp) - eye) * g[None, :] + eye
    cp = g[:, None] * (2.0 * np.linalg.inv(Pp) - eye) * g[None, :] + eye
    # c = 2 (gamma'' + I)^-1 per block, finite on the edge of existence
    cx, cp = 0.5 * (cx + cx.T), 0.5 * (cp + cp.T)
    tol = -1e-10 * max(1.0, float(g.max()) ** 2)
    if np.linalg.eigvalsh(cx)[0] < tol or np.linalg.eigvalsh(cp)[0] < tol:
        return np.inf
    bx, bp = 2.0 * eye - cx, 2.0 * eye - cp
    if np.linalg.eigvalsh(bx)[0] <= 0.0 or np.linalg.eigvalsh(bp)[0] <= 0.0:
        return np.inf
    # gamma''^-1 = c (2 - c)^-1 blockwise, so t^2 = eig(Mx Mp)
    Mx, Mp = np.linalg.solve(bx, cx), np.linalg.solve(bp, cp)
    t_sq = np.sort(np.linalg.eigvals(Mx @ Mp).real)
    rest = np.prod(t_sq[1:])
    if rest > 0:
        # the smallest eigenvalue carries an absolute error ~ eps * t_sq.max();
        # the determinant pins it down to relative precision
        det_m = np.linalg.det(cx) * np.linalg.det(cp) / (np.linalg.det(bx) * np.linalg.det(bp))
        t_sq[0] = det_m / rest
    t = _edge_t(t_sq)
    if t is None:
        return np.inf
    det = np.linalg.det(Xp) * np.linalg.det(Pp) * np.linalg.det(bx / 2.0) * np.linalg.det(bp / 2.0)
    if not det > 0:
        return np.inf
    return _value(u, det, 1.0, t)


def lambda_standard(gamma: np.ndarray, gs: np.ndarray) -> float:
    """:func:`lambda_xp` with a scalar fast path for one and two modes."""
    n = gamma.shape[0] // 2
    if n == 1:
        return _small.lambda_one_mode(
            gamma[0, 0], gamma[1, 1], gs[0, 0], gs[1, 1], TOL.nu_floor
        ) if gamma[0, 1] == 0.0 and gs[0, 1] == 0.0 else lambda_xp(gamma, gs)
    if n == 2:
        X = (gamma[0, 0], gamma[0, 1], gamma[1, 0], gamma[1, 1])
        P = (gamma[2, 2], gamma[2, 3], gamma[3, 2], gamma[3, 3])
        Xs = (gs[0, 0], gs[0, 1], gs[1, 0], gs[1, 1])
        Ps = (gs[2, 2], gs[2, 3], gs[3, 2], gs[3, 3])
        return _small.lambda_two_mode(X, P, Xs, Ps, TOL.nu_floor)
    return lambda_xp(gamma, gs)
