"""Statevector simulation of the ZZ + UC feature map and fidelity-kernel Gram matrices.

Qubit ``j`` carries feature ``x[j]`` and is the ``j``-th least significant bit
of the basis index. One repetition of the map applies, to every qubit,
``Rx(alpha * x[j])`` followed by ``Ry(alpha * x[j])``, then
``RZZ(2 * alpha * x[j] * x[k]) = exp(-i alpha x[j] x[k] Z_j Z_k)`` on every
pair ``j < k``. The ZZ terms commute, so the whole entangling layer is a
single diagonal phase.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import ContractError

log = logging.getLogger(__name__)

ALPHA_GRID = (0.5, 1.0, np.pi / 2, np.pi)
DEFAULT_MEMORY_CAP = 4 * 2**30


@dataclass(frozen=True)
class FeatureMapConfig:
    d: int = 16
    alpha: float = np.pi
    reps: int = 2
    uc_order: str = "rx-ry"

    def __post_init__(self):
        if self.d < 1:
            raise ContractError(f"feature map needs d >= 1, got {self.d}")
        if self.reps < 1:
            raise ContractError(f"feature map needs reps >= 1, got {self.reps}")
        if not self.alpha > 0:
            raise ContractError(f"angle scale must be positive, got {self.alpha}")
        if self.uc_order != "rx-ry":
            raise ContractError("only the Rx-then-Ry UC ordering is supported")

    def state_bytes(self) -> int:
        return 16 * 2**self.d


@lru_cache(maxsize=4)
def _z_signs(d: int) -> np.ndarray:
    idx = np.arange(2**d)[:, None]
    signs = 1.0 - 2.0 * ((idx >> np.arange(d)) & 1)
    signs.setflags(write=False)
    return signs


def _uc_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    rx = np.array([[c, -1j * s], [-1j * s, c]])
    ry = np.array([[c, -s], [s, c]], dtype=complex)
    return ry @ rx


def encode(x, cfg: FeatureMapConfig) -> np.ndarray:
    """Prepare the feature-map state for ``x`` starting from ``|0...0>``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (cfg.d,):
        raise ContractError(f"feature vector has shape {x.shape}, feature map expects ({cfg.d},)")
    n = 2**cfg.d
    zx = _z_signs(cfg.d) @ x
    # sum_{j<k} x_j x_k z_j z_k == ((z.x)^2 - |x|^2) / 2
    zz_phase = np.exp(-1j * cfg.alpha * 0.5 * (zx * zx - x @ x))
    gates = [(j, _uc_matrix(cfg.alpha * xj)) for j, xj in enumerate(x) if xj != 0.0]

    psi = np.zeros(n, dtype=complex)
    psi[0] = 1.0
    for _ in range(cfg.reps):
        for j, u in gates:
            view = psi.reshape(n >> (j + 1), 2, 1 << j)
            lo, hi = view[:, 0, :], view[:, 1, :]
            out = np.empty_like(view)
            out[:, 0, :] = u[0, 0] * lo + u[0, 1] * hi
            out[:, 1, :] = u[1, 0] * lo + u[1, 1] * hi
            psi = out.reshape(n)
        psi = psi * zz_phase
    return psi / np.linalg.norm(psi)


def fidelity_kernel(xi, xj, cfg: FeatureMapConfig) -> float:
    """``|<psi(xi)|psi(xj)>|^2``."""
    return float(abs(np.vdot(encode(xi, cfg), encode(xj, cfg))) ** 2)


def encode_many(X, cfg: FeatureMapConfig, n_jobs: int = 1) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != cfg.d:
        raise ContractError(f"expected an (n, {cfg.d}) feature array, got {X.shape}")
    if n_jobs > 1 and len(X) > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            states = list(pool.map(lambda row: encode(row, cfg), X))
    else:
        states = [encode(row, cfg) for row in X]
    return np.array(states) if states else np.zeros((0, 2**cfg.d), dtype=complex)


def _overlap(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    amp = rows.conj() @ cols.T
    return amp.real**2 + amp.imag**2


def _symmetrize(k: np.ndarray) -> np.ndarray:
    upper = np.triu(k)
    return upper + np.triu(k, 1).T


def gram_matrix(X, Y=None, cfg: FeatureMapConfig | None = None, memory_cap: int = DEFAULT_MEMORY_CAP,
                n_jobs: int = 1) -> np.ndarray:
    """Fidelity-kernel Gram matrix.

    With ``Y`` omitted returns the symmetric ``len(X) x len(X)`` matrix;
    otherwise the cross-kernel with test rows ``Y`` and training columns ``X``.
    Every vector is encoded once when all statevectors fit in ``memory_cap``
    bytes; otherwise states are re-encoded block by block.
    """
    cfg = cfg or FeatureMapConfig()
    X = np.asarray(X, dtype=float)
    rows = X if Y is None else np.asarray(Y, dtype=float)
    n_states = len(X) + (0 if Y is None else len(rows))
    if n_states * cfg.state_bytes() <= memory_cap:
        sx = encode_many(X, cfg, n_jobs)
        if Y is None:
            return _symmetrize(_overlap(sx, sx))
        return _overlap(encode_many(rows, cfg, n_jobs), sx)

    block = max(1, memory_cap // (2 * cfg.state_bytes()))
    log.info("statevector cache exceeds %d bytes; using blocks of %d states", memory_cap, block)
    k = np.empty((len(rows), len(X)))
    for c0 in range(0, len(X), block):
        sc = encode_many(X[c0:c0 + block], cfg, n_jobs)
        r_stop = c0 + 1 if Y is None else len(rows)
        for r0 in range(0, r_stop, block):
            sr = sc if (Y is None and r0 == c0) else encode_many(rows[r0:r0 + block], cfg, n_jobs)
            k[r0:r0 + block, c0:c0 + block] = _overlap(sr, sc)
    return _symmetrize(k) if Y is None else k
