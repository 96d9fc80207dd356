"""Binary kernel SVM on precomputed Gram matrices.

Training solves the dual

    max_a  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij
    s.t.   0 <= a_i <= C,  sum_i a_i y_i = 0

with Platt's sequential minimal optimization: pairs of multipliers are
optimized analytically, the second one picked by the largest error gap and,
failing that, by a seeded scan. Decision values are
``f(x) = sum_j a_j y_j K(x, x_j) + b``.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import ContractError

log = logging.getLogger(__name__)

SUPPORT_TOL = 1e-8
SYMMETRY_TOL = 1e-12
C_GRID = (0.1, 1.0, 10.0)


@dataclass(frozen=True)
class SvmModel:
    alphas: np.ndarray
    b: float
    train_labels: np.ndarray
    C: float
    platt_A: float = -1.0
    platt_B: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def support_idx(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > SUPPORT_TOL)

    @property
    def n_train(self) -> int:
        return len(self.alphas)

    def to_dict(self) -> dict:
        return {
            "alphas": [float(a) for a in self.alphas],
            "b": float(self.b),
            "support_idx": [int(i) for i in self.support_idx],
            "train_labels": [int(v) for v in self.train_labels],
            "C": float(self.C),
            "platt_A": float(self.platt_A),
            "platt_B": float(self.platt_B),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SvmModel":
        return cls(
            alphas=np.asarray(d["alphas"], dtype=float),
            b=float(d["b"]),
            train_labels=np.asarray(d["train_labels"], dtype=int),
            C=float(d["C"]),
            platt_A=float(d.get("platt_A", -1.0)),
            platt_B=float(d.get("platt_B", 0.0)),
            metadata=dict(d.get("metadata", {})),
        )


def save_model(model: SvmModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh, indent=2)


def load_model(path) -> SvmModel:
    with open(path) as fh:
        return SvmModel.from_dict(json.load(fh))


def check_labels(y) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1 or not np.all(np.isin(y, (-1, 1))):
        raise ContractError("labels must be a 1-D sequence of -1/+1")
    return y.astype(int)


def check_gram(K, n: int | None = None) -> np.ndarray:
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ContractError(f"training Gram matrix must be square, got {K.shape}")
    if not np.all(np.isfinite(K)):
        raise ContractError("Gram matrix has non-finite entries")
    if np.max(np.abs(K - K.T), initial=0.0) > SYMMETRY_TOL:
        raise ContractError("training Gram matrix is not symmetric within 1e-12")
    if n is not None and K.shape[0] != n:
        raise ContractError(f"Gram matrix is {K.shape[0]}x{K.shape[0]} but there are {n} labels")
    return K


def dual_objective(alphas, K, y) -> float:
    ay = alphas * y
    return float(alphas.sum() - 0.5 * ay @ K @ ay)


def train_smo(K, y, C: float = 1.0, tol: float = 1e-3, max_passes: int = 50, seed: int = 0,
              max_steps: int = 1_000_000, trace: list | None = None) -> SvmModel:
    """Fit the SVM dual by SMO.

    ``max_passes`` bounds the number of full sweeps over the training set;
    sweeps restricted to the unbounded multipliers are not counted. When
    ``trace`` is a list, the dual objective is appended after every
    successful pair update.
    """
    y = check_labels(y)
    K = check_gram(K, len(y))
    n = len(y)
    if n < 2:
        raise ContractError("need at least two training samples")
    if not C > 0:
        raise ContractError(f"C must be positive, got {C}")
    meta = {"tol": tol, "max_passes": max_passes, "seed": seed}
    if np.all(y == y[0]):
        log.warning("single-class training labels; returning a constant %+d model", y[0])
        return SvmModel(np.zeros(n), float(y[0]), y, C, metadata={**meta, "constant": int(y[0])})

    rng = np.random.default_rng(seed)
    alpha = np.zeros(n)
    b = 0.0
    err = -y.astype(float)  # f_i - y_i with f = 0
    eps = 1e-12
    steps = 0

    def take_step(i1: int, i2: int) -> bool:
        nonlocal b, steps
        if i1 == i2:
            return False
        a1, a2 = alpha[i1], alpha[i2]
        y1, y2 = y[i1], y[i2]
        e1, e2 = err[i1], err[i2]
        s = y1 * y2
        if y1 != y2:
            lo, hi = max(0.0, a2 - a1), min(C, C + a2 - a1)
        else:
            lo, hi = max(0.0, a1 + a2 - C), min(C, a1 + a2)
        if hi - lo < eps:
            return False
        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2 * k12
        if eta > eps:
            a2_new = min(max(a2 + y2 * (e1 - e2) / eta, lo), hi)
        else:
            # no curvature: move to the segment end with the lower negated objective
            f1 = y1 * (e1 - b) - a1 * k11 - s * a2 * k12
            f2 = y2 * (e2 - b) - s * a1 * k12 - a2 * k22
            l1, h1 = a1 + s * (a2 - lo), a1 + s * (a2 - hi)
            obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12
            obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12
            if obj_lo < obj_hi - eps:
                a2_new = lo
            elif obj_lo > obj_hi + eps:
                a2_new = hi
            else:
                a2_new = a2
        if abs(a2_new - a2) < eps * (a2_new + a2 + eps):
            return False
        a1_new = min(max(a1 + s * (a2 - a2_new), 0.0), C)
        d1, d2 = y1 * (a1_new - a1), y2 * (a2_new - a2)
        b1 = b - e1 - d1 * k11 - d2 * k12
        b2 = b - e2 - d1 * k12 - d2 * k22
        if 0 < a1_new < C:
            b_new = b1
        elif 0 < a2_new < C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)
        err[:] += d1 * K[:, i1] + d2 * K[:, i2] + (b_new - b)
        alpha[i1], alpha[i2] = a1_new, a2_new
        b = b_new
        steps += 1
        if trace is not None:
            trace.append(dual_objective(alpha, K, y))
        return True

    def examine(i2: int) -> int:
        r2 = err[i2] * y[i2]
        if not ((r2 < -tol and alpha[i2] < C) or (r2 > tol and alpha[i2] > 0)):
            return 0
        free = np.flatnonzero((alpha > 0) & (alpha < C))
        if free.size > 1:
            i1 = int(free[np.argmax(np.abs(err[i2] - err[free]))])
            if take_step(i1, i2):
                return 1
        if free.size:
            for i1 in np.roll(free, -int(rng.integers(free.size))):
                if take_step(int(i1), i2):
                    return 1
        for i1 in np.roll(np.arange(n), -int(rng.integers(n))):
            if take_step(int(i1), i2):
                return 1
        return 0

    changed, examine_all, passes = 0, True, 0
    while (changed > 0 or examine_all) and steps < max_steps:
        if examine_all:
            if passes >= max_passes:
                break
            passes += 1
            changed = sum(examine(i) for i in range(n))
        else:
            changed = sum(examine(int(i)) for i in np.flatnonzero((alpha > 0) & (alpha < C)))
        if examine_all:
            examine_all = False
        elif changed == 0:
            examine_all = True

    if not np.any((alpha > SUPPORT_TOL) & (alpha < C - SUPPORT_TOL)):
        b = bounded_bias(alpha, K, y, C)
    model = SvmModel(alpha.copy(), float(b), y, C, metadata={**meta, "full_passes": passes, "steps": steps})
    bad = kkt_violations(model, K, tol)
    if bad.size:
        log.warning("SMO stopped with %d KKT violations above tol=%g", bad.size, tol)
    return model


def bounded_bias(alpha, K, y, C: float) -> float:
    """Midpoint of the bias interval allowed by the KKT conditions.

    Used when every multiplier sits at 0 or C, so no free multiplier pins
    the bias down (``g`` is the decision value without bias).
    """
    g = K @ (alpha * y)
    at_zero = alpha <= SUPPORT_TOL
    lower = ((y > 0) & at_zero) | ((y < 0) & ~at_zero)
    lo = np.max(y[lower] - g[lower], initial=-np.inf)
    hi = np.min(y[~lower] - g[~lower], initial=np.inf)
    if np.isinf(lo) or np.isinf(hi):
        return float(lo if np.isfinite(lo) else hi)
    return float(0.5 * (lo + hi))


def kkt_violations(model: SvmModel, K, tol: float) -> np.ndarray:
    """Indices whose margin ``y_i f(x_i)`` breaks the KKT conditions by more than ``tol``."""
    a, y, C = model.alphas, model.train_labels, model.C
    m = y * decision_function(model, K)
    bad = ((a <= SUPPORT_TOL) & (m < 1 - tol)) | \
          ((a > SUPPORT_TOL) & (a < C - SUPPORT_TOL) & (np.abs(m - 1) > tol)) | \
          ((a >= C - SUPPORT_TOL) & (m > 1 + tol))
    return np.flatnonzero(bad)


def decision_function(model: SvmModel, K_cross) -> np.ndarray:
    """Decision values for each row of a (test x train) kernel matrix."""
    K_cross = np.atleast_2d(np.asarray(K_cross, dtype=float))
    if K_cross.shape[1] != model.n_train:
        raise ContractError(
            f"kernel rows have {K_cross.shape[1]} columns, model was trained on {model.n_train} samples"
        )
    return K_cross @ (model.alphas * model.train_labels) + model.b


def decision(model: SvmModel, K_cross_row) -> float:
    return float(decision_function(model, np.asarray(K_cross_row, dtype=float)[None, :])[0])


def predict(model: SvmModel, K_cross) -> np.ndarray:
    """Class per row; a zero decision value maps to -1."""
    return np.where(decision_function(model, K_cross) > 0, 1, -1)


def _sigmoid_neg(z: np.ndarray) -> np.ndarray:
    """``1 / (1 + exp(z))`` without overflow."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    ez = np.exp(-z[pos])
    out[pos] = ez / (1 + ez)
    out[~pos] = 1 / (1 + np.exp(z[~pos]))
    return out


def fit_sigmoid(f, y, max_iter: int = 100) -> tuple[float, float, bool]:
    """Newton fit of ``P(+1|f) = 1 / (1 + exp(A f + B))`` with smoothed targets.

    Follows the backtracking Newton scheme of Lin, Lin and Weng's note on
    Platt scaling. Returns ``(A, B, converged)``.
    """
    f = np.asarray(f, dtype=float)
    y = check_labels(y)
    n_pos = int(np.sum(y > 0))
    n_neg = len(y) - n_pos
    t = np.where(y > 0, (n_pos + 1) / (n_pos + 2), 1 / (n_neg + 2))
    A, B = 0.0, math.log((n_neg + 1) / (n_pos + 1))
    sigma, min_step = 1e-12, 1e-10

    def loss(a, b_):
        # cross-entropy of targets t against 1 / (1 + exp(z)), written to avoid overflow
        z = f * a + b_
        return float(np.sum(t * z + np.logaddexp(0.0, -z)))

    fval = loss(A, B)
    for _ in range(max_iter):
        p = _sigmoid_neg(f * A + B)
        q = 1 - p
        d2 = p * q
        h11 = sigma + np.sum(f * f * d2)
        h22 = sigma + np.sum(d2)
        h21 = np.sum(f * d2)
        d1 = t - p
        g1, g2 = np.sum(f * d1), np.sum(d1)
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            return A, B, True
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= min_step:
            nA, nB = A + step * dA, B + step * dB
            nval = loss(nA, nB)
            if nval < fval + 1e-4 * step * gd:
                A, B, fval = nA, nB, nval
                break
            step /= 2
        else:
            return A, B, False
    return A, B, False


def platt_fit(model: SvmModel, K_train, y) -> tuple[float, float]:
    """Calibrate probabilities on the training decision values.

    Falls back to ``A = -1, B = 0`` when Newton does not converge or the fit
    would make probability decrease with the decision value.
    """
    f = decision_function(model, K_train)
    A, B, ok = fit_sigmoid(f, y)
    if not ok:
        log.warning("Platt scaling did not converge in 100 iterations; using A=-1, B=0")
        return -1.0, 0.0
    if A > 0:
        log.warning("Platt fit gave A=%g > 0 (anti-monotone); using A=-1, B=0", A)
        return -1.0, 0.0
    return float(A), float(B)


def with_platt(model: SvmModel, K_train, y) -> SvmModel:
    A, B = platt_fit(model, K_train, y)
    return replace(model, platt_A=A, platt_B=B)


def predict_proba(model: SvmModel, K_cross) -> np.ndarray:
    """Probability of the +1 class for each row."""
    f = decision_function(model, K_cross)
    return _sigmoid_neg(model.platt_A * f + model.platt_B)
