"""Experiment orchestration: dataset construction, model selection, metrics and reports.

Every experiment is a pure function of its configuration. All randomness is
drawn from streams keyed by the seeds in the configuration, and reports are
serialized with sorted keys, so re-running a configuration reproduces the
report byte for byte (wall-clock timing is only recorded on request).
"""
from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import GAMMA_GRID, MlpConfig, default_gamma, linear_kernel, mlp_predict, mlp_train, rbf_kernel
from .exceptions import ConfigError, ContractError
from .measures import concurrence
from .qkernel import ALPHA_GRID, FeatureMapConfig, gram_matrix
from .states import (
    BELL_KINDS,
    FamilySpec,
    Horodecki,
    StateRecord,
    Werner,
    bell_kind,
    features,
    make_record,
    record_rng,
    rotate_records,
    sample_family,
    sample_zero_discord_bd,
)
from .svm import C_GRID, decision_function, predict_proba, train_smo, with_platt

log = logging.getLogger(__name__)

TASKS = ("entanglement", "discord")
MODEL_TYPES = ("qsvm", "csvm", "mlp")
CV_FOLDS = 5
SPLIT_RETRIES = 10
ROTATION_CHECK_TOL = 1e-9

# Reported accuracies for the Werner cross-domain grid, keyed (train, test).
REFERENCE_WERNER_ACCURACY = {
    ("psi_minus", "psi_plus"): 0.92, ("psi_minus", "phi_plus"): 0.84, ("psi_minus", "phi_minus"): 0.82,
    ("psi_plus", "psi_minus"): 0.94, ("psi_plus", "phi_plus"): 0.84, ("psi_plus", "phi_minus"): 0.86,
    ("phi_minus", "psi_plus"): 0.86, ("phi_minus", "psi_minus"): 0.82, ("phi_minus", "phi_plus"): 0.94,
    ("phi_plus", "psi_plus"): 0.82, ("phi_plus", "psi_minus"): 0.84, ("phi_plus", "phi_minus"): 0.92,
}
WERNER_CELLS = tuple(REFERENCE_WERNER_ACCURACY)


# -- configuration --------------------------------------------------------------


@dataclass(frozen=True)
class DataSpec:
    """One dataset: a family with its parameter domain, size and seed.

    ``params`` keys by family:
      werner / horodecki: ``bell``, ``p_range``, ``zero_fraction`` (share of exact p = 0 members)
      bell-diagonal: ``t_range``, ``zero_fraction`` (share of constructive zero-discord members)
      combined: ``parts``, a list of ``{"family", "params", "n"}``
    """

    family: str
    n: int
    seed: int
    params: dict = field(default_factory=dict)
    rotate_seed: int | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "DataSpec":
        try:
            return cls(d["family"], int(d["n"]), int(d["seed"]), dict(d.get("params", {})), d.get("rotate_seed"))
        except KeyError as exc:
            raise ConfigError(f"data spec is missing {exc}") from exc

    def to_dict(self) -> dict:
        out = {"family": self.family, "n": self.n, "seed": self.seed, "params": self.params}
        if self.rotate_seed is not None:
            out["rotate_seed"] = self.rotate_seed
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    task: str
    model: dict
    train: DataSpec
    test: DataSpec | None = None
    split: dict | None = None
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.model.get("type") not in MODEL_TYPES:
            raise ConfigError(f"model type must be one of {MODEL_TYPES}, got {self.model.get('type')!r}")
        if (self.test is None) == (self.split is None):
            raise ConfigError("give exactly one of a test spec (cross-domain) or a split (in-domain)")
        if self.test is not None:
            check_disjoint(self.train, self.test)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        try:
            return cls(
                name=d["name"],
                task=d["task"],
                model={"type": d["model"]["type"], "params": dict(d["model"].get("params", {}))},
                train=DataSpec.from_dict(d["train"]),
                test=DataSpec.from_dict(d["test"]) if d.get("test") else None,
                split=d.get("split"),
                grid=dict(d.get("grid", {})),
            )
        except KeyError as exc:
            raise ConfigError(f"experiment config is missing {exc}") from exc

    def to_dict(self) -> dict:
        out = {"name": self.name, "task": self.task, "model": self.model, "train": self.train.to_dict(),
               "grid": self.grid}
        if self.test is not None:
            out["test"] = self.test.to_dict()
        if self.split is not None:
            out["split"] = self.split
        return out

    @property
    def scheme(self) -> str:
        return self.model.get("params", {}).get("scheme", "dm16")


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))


def _interval(spec: DataSpec, key: str, default=(0.0, 1.0)) -> tuple[float, float]:
    lo, hi = spec.params.get(key, default)
    return float(lo), float(hi)


def check_disjoint(train: DataSpec, test: DataSpec) -> None:
    """Raise ``ConfigError`` when the train and test domains can share states."""
    if "combined" in (train.family, test.family):
        raise ConfigError("combined datasets are only valid for in-domain splits")
    if train.family != test.family:
        return
    fam = train.family
    if fam in ("werner", "horodecki"):
        if bell_kind(train.params.get("bell", "psi_minus")) != bell_kind(test.params.get("bell", "psi_minus")):
            return
        a, b = _interval(train, "p_range"), _interval(test, "p_range")
    elif fam == "bell-diagonal":
        a, b = _interval(train, "t_range", (-1.0, 1.0)), _interval(test, "t_range", (-1.0, 1.0))
    else:
        raise ConfigError(f"train and test both draw from the {fam} family; domains overlap")
    if max(a[0], b[0]) < min(a[1], b[1]):
        raise ConfigError(f"train range {a} and test range {b} of the {fam} family overlap")


# -- datasets ---------------------------------------------------------------------


def _nonzero_bd(t_range, n: int, seed: int, start_id: int) -> list[StateRecord]:
    out, idx = [], start_id
    spec = FamilySpec("bell-diagonal", t_range=t_range)
    while len(out) < n:
        rec = sample_family(spec, 1, seed, start_id=idx)[0]
        idx += 1
        if rec.label_discord == 1:
            out.append(rec)
    # keep ids contiguous after any rejected zero-discord draw
    return [StateRecord(start_id + k, r.family, r.dm, r.label_ent, r.label_discord) for k, r in enumerate(out)]


def build_dataset(spec: DataSpec, start_id: int = 0) -> list[StateRecord]:
    """Generate the labelled records for a data spec, rotating them if requested."""
    fam, p, n = spec.family, spec.params, spec.n
    if n < 1:
        raise ConfigError(f"dataset size must be positive, got {n}")
    if fam == "combined":
        records, offset = [], start_id
        for part in p.get("parts", []):
            sub = DataSpec(part["family"], int(part["n"]), spec.seed, dict(part.get("params", {})))
            records += build_dataset(sub, offset)
            offset += sub.n
        if not records:
            raise ConfigError("combined dataset has no parts")
    elif fam in ("werner", "horodecki"):
        bell = p.get("bell", "psi_minus")
        n_zero = int(round(float(p.get("zero_fraction", 0.0)) * n))
        fs = FamilySpec(fam, bell=bell, p_range=tuple(p.get("p_range", (0.0, 1.0))))
        kind = Werner if fam == "werner" else Horodecki
        records = [make_record(start_id + i, kind(fs.bell, 0.0)) for i in range(n_zero)]
        if n - n_zero:
            records += sample_family(fs, n - n_zero, spec.seed, start_id=start_id + n_zero)
    elif fam == "mems":
        records = sample_family(FamilySpec("mems"), n, spec.seed, start_id=start_id)
    elif fam == "bell-diagonal":
        t_range = tuple(p.get("t_range", (-1.0, 1.0)))
        n_zero = int(round(float(p.get("zero_fraction", 0.5)) * n))
        records = sample_zero_discord_bd(t_range, n_zero, spec.seed, start_id) if n_zero else []
        if n - n_zero:
            records += _nonzero_bd(t_range, n - n_zero, spec.seed, start_id + n_zero)
    else:
        raise ConfigError(f"unknown family {fam!r}")
    if spec.rotate_seed is not None:
        records = rotate_with_check(records, int(spec.rotate_seed))
    return records


def rotate_with_check(records: list[StateRecord], seed: int) -> list[StateRecord]:
    """Rotate each record and confirm the concurrence did not move by more than 1e-9."""
    rotated = rotate_records(records, seed)
    for before, after in zip(records, rotated):
        shift = abs(concurrence(before.dm) - concurrence(after.dm))
        if shift > ROTATION_CHECK_TOL:
            raise ContractError(f"record {before.id}: concurrence changed by {shift:.3g} under rotation")
    return rotated


def labels_for(records, task: str) -> np.ndarray:
    key = "label_ent" if task == "entanglement" else "label_discord"
    return np.array([getattr(r, key) for r in records], dtype=int)


def feature_matrix(records, scheme: str) -> np.ndarray:
    return np.array([features(r.dm, scheme) for r in records])


# -- metrics --------------------------------------------------------------------------


@dataclass
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int
    precision_defined: bool = True
    per_state: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def metrics_dict(self) -> dict:
        return {"accuracy": self.accuracy, "precision": self.precision, "recall": self.recall, "f1": self.f1,
                "precision_defined": self.precision_defined}

    def confusion_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def compute_metrics(true_labels, predicted_labels) -> MetricsReport:
    """Accuracy, precision, recall and F1 with +1 as the positive class.

    Precision is reported as 0 and flagged when nothing is predicted positive.
    """
    t = np.asarray(true_labels)
    p = np.asarray(predicted_labels)
    if t.shape != p.shape or t.ndim != 1 or len(t) < 1:
        raise ContractError(f"label arrays must be equal-length and non-empty, got {t.shape} and {p.shape}")
    tp = int(np.sum((p == 1) & (t == 1)))
    fp = int(np.sum((p == 1) & (t != 1)))
    tn = int(np.sum((p != 1) & (t != 1)))
    fn = int(np.sum((p != 1) & (t == 1)))
    precision_defined = tp + fp > 0
    precision = tp / (tp + fp) if precision_defined else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsReport((tp + tn) / len(t), precision, recall, f1, tp, fp, tn, fn, precision_defined)


# -- model fitting ----------------------------------------------------------------------


def stratified_folds(y, k: int, seed: int) -> np.ndarray:
    """Fold index per sample, classes dealt round-robin after a seeded shuffle."""
    rng = np.random.default_rng(seed)
    fold = np.empty(len(y), dtype=int)
    offset = 0
    for cls in (-1, 1):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(len(idx))]
        fold[idx] = (np.arange(len(idx)) + offset) % k
        offset += len(idx)
    return fold


def cv_accuracy(K, y, C: float, seed: int, k: int = CV_FOLDS) -> float:
    folds = stratified_folds(y, k, seed)
    correct = 0
    for f in range(k):
        tr, va = folds != f, folds == f
        if not va.any() or not tr.any():
            continue
        m = train_smo(K[np.ix_(tr, tr)], y[tr], C=C, seed=seed)
        correct += int(np.sum(np.where(decision_function(m, K[np.ix_(va, tr)]) > 0, 1, -1) == y[va]))
    return correct / len(y)


def _select_C(K, y, grid_C, seed):
    scores = {float(c): cv_accuracy(K, y, float(c), seed) for c in grid_C}
    best = max(scores, key=lambda c: (scores[c], -list(scores).index(c)))
    return best, scores


@dataclass
class FitResult:
    predicted: np.ndarray
    probability: np.ndarray
    selected: dict
    train_accuracy: float


def _fit_kernel_svm(k_train, k_test, y, grid_C, seed) -> tuple[FitResult, float]:
    C, scores = _select_C(k_train, y, grid_C, seed)
    model = with_platt(train_smo(k_train, y, C=C, seed=seed), k_train, y)
    pred = np.where(decision_function(model, k_test) > 0, 1, -1)
    train_acc = float(np.mean(np.where(decision_function(model, k_train) > 0, 1, -1) == y))
    res = FitResult(pred, predict_proba(model, k_test),
                    {"C": C, "platt_A": model.platt_A, "platt_B": model.platt_B}, train_acc)
    return res, max(scores.values())


def fit_qsvm(Xtr, ytr, Xte, params: dict, grid: dict, seed: int) -> FitResult:
    alphas = grid.get("alpha", [params.get("alpha", float(np.pi))])
    reps_list = grid.get("reps", [params.get("reps", 2)])
    grid_C = grid.get("C", list(C_GRID))
    best = None
    for alpha in alphas:
        for reps in reps_list:
            cfg = FeatureMapConfig(d=Xtr.shape[1], alpha=float(alpha), reps=int(reps))
            k_train = gram_matrix(Xtr, cfg=cfg, n_jobs=params.get("n_jobs", 1))
            C, scores = _select_C(k_train, ytr, grid_C, seed)
            score = scores[C]
            if best is None or score > best[0]:
                best = (score, cfg, k_train)
    _, cfg, k_train = best
    k_test = gram_matrix(Xtr, Xte, cfg=cfg, n_jobs=params.get("n_jobs", 1))
    res, _ = _fit_kernel_svm(k_train, k_test, ytr, grid_C, seed)
    res.selected.update({"alpha": cfg.alpha, "reps": cfg.reps})
    return res


def _classical_gram(kind, gamma, Xtr, Xte=None):
    if kind == "linear":
        return linear_kernel(Xtr, Xte)
    return rbf_kernel(Xtr, Xte, gamma=gamma)


def fit_csvm(Xtr, ytr, Xte, params: dict, grid: dict, seed: int) -> FitResult:
    kernels = grid.get("kernel", [params.get("kernel", "rbf")])
    gammas = grid.get("gamma", ["scale", *GAMMA_GRID])
    grid_C = grid.get("C", list(C_GRID))
    best = None
    for kind in kernels:
        for g in (gammas if kind == "rbf" else [None]):
            gamma = default_gamma(Xtr) if g == "scale" else (None if g is None else float(g))
            k_train = _classical_gram(kind, gamma, Xtr)
            C, scores = _select_C(k_train, ytr, grid_C, seed)
            if best is None or scores[C] > best[0]:
                best = (scores[C], kind, gamma, k_train)
    _, kind, gamma, k_train = best
    res, _ = _fit_kernel_svm(k_train, _classical_gram(kind, gamma, Xtr, Xte), ytr, grid_C, seed)
    res.selected.update({"kernel": kind, "gamma": gamma})
    return res


def fit_mlp(Xtr, ytr, Xte, params: dict, grid: dict, seed: int) -> FitResult:
    cfg = MlpConfig(n_hidden=int(params.get("n_hidden", 50)), epochs=int(params.get("epochs", 200)),
                    learning_rate=float(params.get("learning_rate", 0.01)), seed=int(params.get("seed", seed)))
    model = mlp_train(Xtr, (ytr > 0).astype(float), cfg)
    proba, pred = mlp_predict(model, Xte)
    _, train_pred = mlp_predict(model, Xtr)
    return FitResult(pred, proba, {**asdict(cfg), "final_loss": model.loss_trace[-1]},
                     float(np.mean(train_pred == ytr)))


_FITTERS = {"qsvm": fit_qsvm, "csvm": fit_csvm, "mlp": fit_mlp}


# -- experiment runners -------------------------------------------------------------------


def _plot_param(family: dict):
    tag = family["tag"]
    if tag in ("werner", "horodecki"):
        return family["p"]
    if tag == "mems":
        return family["lambda"]
    return " ".join(repr(family[k]) for k in ("t11", "t22", "t33"))


def _evaluate(cfg: ExperimentConfig, train, test, extra: dict | None = None) -> dict:
    Xtr, Xte = feature_matrix(train, cfg.scheme), feature_matrix(test, cfg.scheme)
    ytr, yte = labels_for(train, cfg.task), labels_for(test, cfg.task)
    seed = int(cfg.model.get("params", {}).get("seed", 0))
    fit = _FITTERS[cfg.model["type"]](Xtr, ytr, Xte, cfg.model.get("params", {}), cfg.grid, seed)
    metrics = compute_metrics(yte, fit.predicted)
    per_state = []
    for rec, t, p, prob in zip(test, yte, fit.predicted, fit.probability):
        fam = rec.to_json_dict()["family"]
        per_state.append({"id": rec.id, "family": fam, "param": _plot_param(fam), "true": int(t),
                          "pred": int(p), "probability": float(prob)})
    metrics.per_state = per_state
    uniq = np.unique(fit.predicted)
    report = {
        "name": cfg.name,
        "task": cfg.task,
        "config": cfg.to_dict(),
        "selected": fit.selected,
        "train_accuracy": fit.train_accuracy,
        "metrics": metrics.metrics_dict(),
        "confusion": metrics.confusion_dict(),
        "n_train": len(train),
        "n_test": len(test),
        "degenerate_prediction": int(uniq[0]) if uniq.size == 1 else None,
        "per_state": per_state,
        "wall_time_s": None,
        "version": __version__,
    }
    if extra:
        report.update(extra)
    return report


def _stratified_split(y, test_fraction: float, seed: int):
    rng = np.random.default_rng(seed)
    n_test = int(round(test_fraction * len(y)))
    classes = [np.flatnonzero(y == c) for c in (-1, 1)]
    quota = [test_fraction * len(c) for c in classes]
    take = [int(np.floor(q)) for q in quota]
    # largest remainder so the test split has exactly n_test members
    for i in np.argsort([-(q - np.floor(q)) for q in quota], kind="stable")[: n_test - sum(take)]:
        take[i] += 1
    test_idx = []
    for idx, k in zip(classes, take):
        test_idx += list(idx[rng.permutation(len(idx))][:k])
    test_mask = np.zeros(len(y), dtype=bool)
    test_mask[test_idx] = True
    return np.flatnonzero(~test_mask), np.flatnonzero(test_mask)


def run_in_domain(cfg: ExperimentConfig) -> dict:
    """Stratified split of one combined dataset, train on the larger part, test on the rest."""
    if cfg.split is None:
        raise ConfigError("in-domain runs need a split")
    records = build_dataset(cfg.train)
    y = labels_for(records, cfg.task)
    frac = float(cfg.split.get("test_fraction", 0.25))
    seed = int(cfg.split.get("seed", 0))
    for attempt in range(SPLIT_RETRIES):
        tr, te = _stratified_split(y, frac, seed + attempt)
        if len(np.unique(y[tr])) == 2:
            break
    else:
        raise ConfigError(f"could not draw a two-class training split in {SPLIT_RETRIES} attempts")
    return _evaluate(cfg, [records[i] for i in tr], [records[i] for i in te], {"split_seed": seed + attempt})


def run_cross_domain(cfg: ExperimentConfig) -> dict:
    if cfg.test is None:
        raise ConfigError("cross-domain runs need a test spec")
    check_disjoint(cfg.train, cfg.test)
    return _evaluate(cfg, build_dataset(cfg.train), build_dataset(cfg.test))


def run_robustness(cfg: ExperimentConfig) -> dict:
    """Cross-domain run whose test states each get a fresh random local rotation.

    Labels are computed before rotation; :func:`rotate_with_check` confirms
    the concurrence is unchanged on every rotated state.
    """
    if cfg.test is None or cfg.test.rotate_seed is None:
        raise ConfigError("robustness runs need test.rotate_seed")
    return run_cross_domain(cfg)


def run_discord(cfg: ExperimentConfig) -> dict:
    if cfg.task != "discord":
        raise ConfigError("discord runs need task 'discord'")
    return run_cross_domain(cfg)


def run_experiment(cfg: ExperimentConfig, timing: bool = False) -> dict:
    start = time.perf_counter()
    if cfg.split is not None:
        report = run_in_domain(cfg)
    elif cfg.task == "discord":
        report = run_discord(cfg)
    elif cfg.test.rotate_seed is not None:
        report = run_robustness(cfg)
    else:
        report = run_cross_domain(cfg)
    if timing:
        report["wall_time_s"] = time.perf_counter() - start
    return report


# -- presets ------------------------------------------------------------------------------

QSVM = {"type": "qsvm", "params": {"alpha": float(np.pi), "reps": 2, "scheme": "dm16"}}
QSVM_BLOCH = {"type": "qsvm", "params": {"alpha": float(np.pi), "reps": 2, "scheme": "bloch15"}}
CSVM = {"type": "csvm", "params": {"scheme": "dm16"}}
C_ONLY = {"C": list(C_GRID)}
# in-domain folds share the test distribution, so the angle scale and depth are searched too
IN_DOMAIN_GRID = {"C": list(C_GRID), "alpha": list(ALPHA_GRID), "reps": [1, 2]}
CSVM_GRID = {"kernel": ["linear", "rbf"], "gamma": ["scale", *GAMMA_GRID], "C": list(C_GRID)}


def _werner(bell, n, seed, **extra):
    return DataSpec("werner", n, seed, {"bell": bell, "p_range": [0.0, 1.0], **extra})


def werner_cell_config(train_bell, test_bell, cell_seed: int, model=QSVM, grid=C_ONLY, rotate_seed=None,
                       n_train: int = 100, n_test: int = 50) -> ExperimentConfig:
    test = _werner(test_bell, n_test, 1000 + cell_seed)
    if rotate_seed is not None:
        test = DataSpec(test.family, test.n, test.seed, test.params, rotate_seed)
    return ExperimentConfig(f"werner_{train_bell}_to_{test_bell}", "entanglement", model,
                            _werner(train_bell, n_train, cell_seed), test, grid=grid)


def in_domain_config(model=QSVM, grid=IN_DOMAIN_GRID) -> ExperimentConfig:
    parts = [
        {"family": "werner", "n": 59, "params": {"bell": "psi_minus"}},
        {"family": "horodecki", "n": 59, "params": {"bell": "phi_plus"}},
        {"family": "mems", "n": 58},
    ]
    return ExperimentConfig("in_domain", "entanglement", model, DataSpec("combined", 176, 0, {"parts": parts}),
                            split={"test_fraction": 0.25, "seed": 0}, grid=grid)


def preset_in_domain() -> dict:
    return run_experiment(in_domain_config())


def preset_xdomain_werner() -> dict:
    cells = []
    for i, (tr, te) in enumerate(WERNER_CELLS):
        rep = run_experiment(werner_cell_config(tr, te, i))
        rep["reference_accuracy"] = REFERENCE_WERNER_ACCURACY[(tr, te)]
        rep["train_bell"], rep["test_bell"] = tr, te
        cells.append(rep)
    return {"name": "xdomain_werner", "cells": cells, "version": __version__}


def preset_xdomain_family(family: str) -> dict:
    test_params = {"bell": "phi_plus"} if family == "horodecki" else {}
    cfg = ExperimentConfig(f"xdomain_{family}", "entanglement", QSVM, _werner("psi_minus", 100, 0),
                           DataSpec(family, 50, 1000, test_params), grid=C_ONLY)
    return run_experiment(cfg)


def preset_robustness(rotate_seed: int = 7) -> dict:
    cells = []
    for i, (tr, te) in enumerate(WERNER_CELLS):
        plain = run_experiment(werner_cell_config(tr, te, i))
        rotated = run_experiment(werner_cell_config(tr, te, i, rotate_seed=rotate_seed + i))
        cells.append({
            "train_bell": tr, "test_bell": te,
            "unrotated_accuracy": plain["metrics"]["accuracy"],
            "rotated": rotated,
        })
    return {"name": "robustness", "cells": cells, "version": __version__}


def discord_bd_config(model=QSVM_BLOCH, grid=C_ONLY) -> ExperimentConfig:
    return ExperimentConfig(
        "discord_bd", "discord", model,
        DataSpec("bell-diagonal", 100, 0, {"t_range": [-1.0, 0.0], "zero_fraction": 0.5}),
        DataSpec("bell-diagonal", 50, 1000, {"t_range": [0.0, 1.0], "zero_fraction": 0.5}),
        grid=grid,
    )


def preset_discord_bd() -> dict:
    return run_experiment(discord_bd_config())


def preset_discord_werner() -> dict:
    cells = []
    for i, bell in enumerate(BELL_KINDS):
        cfg = ExperimentConfig(
            f"discord_werner_{bell}", "discord", QSVM_BLOCH,
            DataSpec("bell-diagonal", 100, 0, {"t_range": [-1.0, 0.0], "zero_fraction": 0.5}),
            _werner(bell, 50, 1000 + i, zero_fraction=0.1),
            grid=C_ONLY,
        )
        cells.append(run_experiment(cfg))
    return {"name": "discord_werner", "cells": cells, "version": __version__,
            "note": "zero-discord test members are the injected p = 0 states"}


def preset_baseline_csvm() -> dict:
    """CSVM and QSVM on identical cross-domain data, with the accuracy gap recorded."""
    cells = []
    for i, (tr, te) in enumerate(WERNER_CELLS[:3]):
        q = run_experiment(werner_cell_config(tr, te, i))
        c = run_experiment(werner_cell_config(tr, te, i, model=CSVM, grid=CSVM_GRID))
        cells.append(_comparison(q, c, seed=i))
    q = run_experiment(discord_bd_config())
    c = run_experiment(discord_bd_config(model={"type": "csvm", "params": {"scheme": "bloch15"}}, grid=CSVM_GRID))
    cells.append(_comparison(q, c, seed=0))
    return {"name": "baseline_csvm", "cells": cells, "version": __version__}


def _comparison(q: dict, c: dict, seed: int) -> dict:
    gap = q["metrics"]["accuracy"] - c["metrics"]["accuracy"]
    return {"qsvm": q, "csvm": c, "accuracy_gap": gap, "seed": seed,
            "gap_criterion": "MET" if gap >= 0.10 - 1e-12 else "UNMET"}


def preset_baseline_nn(sizes=(5_000, 50_000), hidden=(0, 50, 100), epochs: int = 200) -> dict:
    cells = []
    for n in sizes:
        for h in hidden:
            model = {"type": "mlp", "params": {"n_hidden": h, "epochs": epochs, "learning_rate": 0.01,
                                               "seed": 0, "scheme": "dm16"}}
            cfg = ExperimentConfig(f"nn_n{n}_h{h}", "entanglement", model, _werner("psi_minus", n, 0),
                                   _werner("psi_plus", 50, 1000))
            cells.append(run_experiment(cfg))
    return {"name": "baseline_nn", "cells": cells, "version": __version__}


PRESETS = {
    "in_domain": preset_in_domain,
    "xdomain_werner": preset_xdomain_werner,
    "xdomain_horodecki": lambda: preset_xdomain_family("horodecki"),
    "xdomain_mems": lambda: preset_xdomain_family("mems"),
    "robustness": preset_robustness,
    "discord_bd": preset_discord_bd,
    "discord_werner": preset_discord_werner,
    "baseline_csvm": preset_baseline_csvm,
    "baseline_nn": preset_baseline_nn,
}


def run_preset(name: str) -> dict:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# -- output -------------------------------------------------------------------------------


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def emit_report(report: dict, path) -> None:
    try:
        Path(path).write_text(dumps_report(report))
    except OSError as exc:
        raise OSError(f"could not write report to {path}: {exc}") from exc


PLOT_COLUMNS = ("id", "param_p_or_t", "true_label", "pred_label", "probability")


def emit_plot_data(report: dict, path) -> None:
    """Per-state CSV for a single-run report."""
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(PLOT_COLUMNS)
            for s in report["per_state"]:
                w.writerow([s["id"], s["param"], s["true"], s["pred"], repr(s["probability"])])
    except OSError as exc:
        raise OSError(f"could not write plot data to {path}: {exc}") from exc


def read_plot_data(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
