"""Analytic labelers for two-qubit states: concurrence and geometric discord.

Both measures need only small Hermitian eigenproblems, solved here by a
cyclic complex Jacobi iteration so the labels do not depend on a LAPACK
build.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ContractError
from .states import SIGMA_Y, to_bloch

LABEL_TOL = 1e-9
HERMITIAN_TOL = 1e-10
OFF_DIAG_TOL = 1e-13
MAX_SWEEPS = 100
# eigenvalues of rho below this are treated as exact zeros before the square root
_ZERO_EIGEN = 1e-14

_SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off.real**2 + off.imag**2)))


def hermitian_eigen(m, max_sweeps: int = MAX_SWEEPS, tol: float = OFF_DIAG_TOL):
    """Eigen-decompose a Hermitian matrix with cyclic Jacobi rotations.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Hermitian (or real symmetric) matrix.
    max_sweeps : int
        Upper bound on full sweeps over the off-diagonal pairs.
    tol : float
        Stop once the off-diagonal Frobenius norm falls below this value.

    Returns
    -------
    w : ndarray, shape (n,)
        Eigenvalues in descending order.
    v : ndarray, shape (n, n)
        Unit eigenvectors as columns, ``m @ v[:, k] == w[k] * v[:, k]``.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractError("matrix has non-finite entries")
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ContractError("matrix is not Hermitian within 1e-10")
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)

    for _ in range(max_sweeps):
        if _off_norm(a) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(tau) + math.hypot(1.0, tau))
                if tau < 0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # phase-fix column q so a[p, q] is real, then a real Givens rotation
                cph = phase.conjugate()
                col_p = a[:, p].copy()
                col_q = a[:, q] * cph
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :] * phase
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vec_p = v[:, p].copy()
                vec_q = v[:, q] * cph
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = hermitian_eigen(rho)
    w = np.where(w > _ZERO_EIGEN, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def factored_jacobi_roots(b, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Square roots of the eigenvalues of ``b^H b``, descending.

    Runs the Jacobi iteration on ``b^H b`` in factored form: each rotation
    acts on two columns of ``b`` (one-sided Jacobi), so the Gram entries are
    never squared and small roots keep full absolute accuracy.
    """
    b = np.array(b, dtype=complex)
    n = b.shape[1]
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                col_p, col_q = b[:, p], b[:, q]
                app = float(np.vdot(col_p, col_p).real)
                aqq = float(np.vdot(col_q, col_q).real)
                apq = np.vdot(col_p, col_q)
                mag = abs(apq)
                if mag <= 1e-15 * np.sqrt(app * aqq) or mag < 1e-300:
                    continue
                rotated = True
                phase = apq / mag
                tau = (aqq - app) / (2.0 * mag)
                t = 1.0 / (abs(tau) + math.hypot(1.0, tau))
                if tau < 0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                old_p = col_p.copy()
                new_q = col_q * phase.conjugate()
                b[:, p] = c * old_p - s * new_q
                b[:, q] = s * old_p + c * new_q
        if not rotated:
            break
    return np.sort(np.linalg.norm(b, axis=0))[::-1]


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    ``max(0, mu1 - mu2 - mu3 - mu4)`` with mu_k the descending square roots of
    the eigenvalues of ``sqrt(rho) @ rho_tilde @ sqrt(rho)`` and ``rho_tilde``
    the spin-flipped state. That matrix equals ``B^H B`` with
    ``B = sqrt(rho_tilde) @ sqrt(rho)``, so the roots come from
    :func:`factored_jacobi_roots` on ``B``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ContractError(f"concurrence needs a 4x4 matrix, got {rho.shape}")
    root = _psd_sqrt(rho)
    root_tilde = _SPIN_FLIP @ root.conj() @ _SPIN_FLIP
    mu = factored_jacobi_roots(root_tilde @ root)
    c = mu[0] - mu[1] - mu[2] - mu[3]
    return float(min(max(c, 0.0), 1.0))


def geometric_discord(rho) -> float:
    """Geometric discord ``(|a|^2 + tr(T T^T) - lambda_max(a a^T + T T^T)) / 4``."""
    bf = to_bloch(rho)
    a, t = bf.a, bf.t
    k = np.outer(a, a) + t @ t.T
    w, _ = hermitian_eigen(k)
    d = 0.25 * (a @ a + np.trace(t @ t.T) - w[0])
    return float(max(d, 0.0))


def geometric_discord_bd(t11: float, t22: float, t33: float) -> float:
    sq = np.array([t11, t22, t33], dtype=float) ** 2
    return float(0.25 * (sq.sum() - sq.max()))


@dataclass(frozen=True)
class EntanglementLabel:
    value: int
    concurrence: float


@dataclass(frozen=True)
class DiscordLabel:
    value: int
    discord: float


def entanglement_label(rho) -> EntanglementLabel:
    """+1 (entangled) iff the concurrence exceeds 1e-9, else -1 (separable)."""
    c = concurrence(rho)
    return EntanglementLabel(1 if c > LABEL_TOL else -1, c)


def discord_label(rho) -> DiscordLabel:
    """+1 (non-zero discord) iff the geometric discord exceeds 1e-9, else -1."""
    d = geometric_discord(rho)
    return DiscordLabel(1 if d > LABEL_TOL else -1, d)
