"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line (collected in the terminal summary) before
asserting, so a failing criterion still reports its measured values. Preset
reports are computed once per session and reused across criteria.
"""
import time
from dataclasses import replace

import numpy as np
import pytest

from acceptance_log import record
from oracles import brute_force_dual
from xdomain_qsvm.baselines import init_layers, loss_and_grad, rbf_kernel
from xdomain_qsvm.harness import (
    REFERENCE_WERNER_ACCURACY,
    DataSpec,
    _stratified_split,
    build_dataset,
    discord_bd_config,
    dumps_report,
    feature_matrix,
    in_domain_config,
    labels_for,
    run_preset,
    WERNER_CELLS,
    run_experiment,
    werner_cell_config,
)
from xdomain_qsvm.measures import concurrence, geometric_discord, hermitian_eigen
from xdomain_qsvm.qkernel import FeatureMapConfig, fidelity_kernel, gram_matrix
from xdomain_qsvm.states import FamilySpec, features, sample_family
from xdomain_qsvm.svm import C_GRID, decision_function, dual_objective, kkt_violations, train_smo

_CACHE: dict = {}


def preset(name):
    if name not in _CACHE:
        start = time.perf_counter()
        _CACHE[name] = (run_preset(name), time.perf_counter() - start)
    return _CACHE[name]


def test_c01_analytic_labels():
    start = time.perf_counter()
    worst = {}
    recs = sample_family(FamilySpec("werner", bell="phi_plus"), 1000, seed=1)
    worst["werner C"] = max(abs(concurrence(r.dm) - max(0.0, (3 * r.family.p - 1) / 2)) for r in recs)
    worst["werner D"] = max(abs(geometric_discord(r.dm) - r.family.p**2 / 2) for r in recs)
    recs = sample_family(FamilySpec("horodecki", bell="psi_minus"), 1000, seed=2)
    worst["horodecki C"] = max(abs(concurrence(r.dm) - r.family.p) for r in recs)
    recs = sample_family(FamilySpec("mems"), 1000, seed=3)
    worst["mems C"] = max(abs(concurrence(r.dm) - max(0.0, r.family.lam - 2 * np.sqrt(r.family.s * r.family.t)))
                          for r in recs)
    recs = sample_family(FamilySpec("bell-diagonal"), 1000, seed=4)
    bd = []
    for r in recs:
        sq = np.sort(np.array([r.family.t11, r.family.t22, r.family.t33]) ** 2)
        bd.append(abs(geometric_discord(r.dm) - 0.25 * (sq[0] + sq[1])))
    worst["bell-diagonal D"] = max(bd)
    elapsed = time.perf_counter() - start
    ok = (max(worst[k] for k in ("werner C", "werner D", "horodecki C", "mems C")) <= 1e-9
          and worst["bell-diagonal D"] <= 1e-12 and elapsed < 5)
    detail = ", ".join(f"{k} max err {v:.1e}" for k, v in worst.items()) + f"; {elapsed:.2f} s"
    assert record("C1 analytic labels", ok, detail)


def test_c02_kernel_suite():
    start = time.perf_counter()
    recs = sample_family(FamilySpec("mems"), 20, seed=5) + sample_family(FamilySpec("werner"), 20, seed=6)
    X = np.array([features(r.dm) for r in recs])
    K = gram_matrix(X)
    sym = float(np.max(np.abs(K - K.T)))
    diag = float(np.max(np.abs(np.diag(K) - 1)))
    min_eig = float(np.min(hermitian_eigen(K)[0]))
    one_qubit = fidelity_kernel([np.pi / 2], [0.0], FeatureMapConfig(d=1, alpha=1.0, reps=1))
    zero = fidelity_kernel(np.zeros(16), np.zeros(16), FeatureMapConfig())
    elapsed = time.perf_counter() - start
    ok = sym <= 1e-12 and diag <= 1e-10 and min_eig >= -1e-8 and abs(one_qubit - 0.5) <= 1e-12 and zero == 1.0 \
        and elapsed < 30
    detail = (f"symmetry {sym:.1e}, diagonal {diag:.1e}, min eig {min_eig:.1e}, d=1 value {one_qubit!r}, "
              f"zero-vector kernel {zero!r}; {elapsed:.2f} s")
    assert record("C2 kernel suite", ok, detail)


def _shipped_training_grams():
    grams = []
    for i in (0, 3, 6, 9):
        cfg = werner_cell_config(*WERNER_CELLS[i], i)
        recs = build_dataset(cfg.train)
        grams.append((cfg.name, gram_matrix(feature_matrix(recs, "dm16")), labels_for(recs, "entanglement")))
    cfg = discord_bd_config()
    recs = build_dataset(cfg.train)
    X = feature_matrix(recs, "bloch15")
    grams.append(("discord_bd", gram_matrix(X, cfg=FeatureMapConfig(d=15)), labels_for(recs, "discord")))
    cfg = in_domain_config()
    recs = build_dataset(cfg.train)
    y = labels_for(recs, "entanglement")
    tr, _ = _stratified_split(y, 0.25, 0)
    X = feature_matrix([recs[i] for i in tr], "dm16")
    grams.append(("in_domain", gram_matrix(X, cfg=FeatureMapConfig(reps=1)), y[tr]))
    return grams


def test_c03_solver_suite():
    grams = _shipped_training_grams()
    start = time.perf_counter()
    sign_mismatch, objective_gap, n_instances = 0, 0.0, 0
    rng = np.random.default_rng(7)
    for n in range(2, 9):
        for _ in range(3):
            X = rng.normal(size=(n, 3))
            y = np.where(rng.permutation(n) % 2 == 0, 1, -1)
            K = rbf_kernel(X, gamma=0.5)
            C = float(rng.choice([0.5, 1.0, 5.0]))
            m = train_smo(K, y, C=C, tol=1e-6)
            alpha, b, obj = brute_force_dual(K, y, C)
            f_ref = K @ (alpha * y) + b
            clear = np.abs(f_ref) > 1e-3
            sign_mismatch += int(np.sum(np.sign(decision_function(m, K)[clear]) != np.sign(f_ref[clear])))
            objective_gap = max(objective_gap, abs(dual_objective(m.alphas, K, y) - obj))
            n_instances += 1
    worst_eq, kkt_bad = 0.0, []
    for name, K, y in grams:
        for C in C_GRID:
            m = train_smo(K, y, C=float(C))
            worst_eq = max(worst_eq, abs(float(m.alphas @ y)))
            if kkt_violations(m, K, 1e-3).size:
                kkt_bad.append(f"{name}@C={C}")
    grad_err = 0.0
    for n_hidden in (0, 4):
        for _ in range(10):
            layers = [(w * 2, b * 2) for w, b in init_layers(6, n_hidden, rng)]
            X, y01 = rng.normal(size=(5, 6)), (rng.random(5) < 0.5).astype(float)
            _, grads = loss_and_grad(layers, X, y01)
            for (w, b), (gw, gb) in zip(layers, grads):
                for arr, g in ((w, gw), (b, gb)):
                    for idx in np.ndindex(arr.shape):
                        old = arr[idx]
                        arr[idx] = old + 1e-6
                        up, _ = loss_and_grad(layers, X, y01)
                        arr[idx] = old - 1e-6
                        down, _ = loss_and_grad(layers, X, y01)
                        arr[idx] = old
                        fd = (up - down) / 2e-6
                        grad_err = max(grad_err, abs(fd - g[idx]) / max(abs(fd), abs(g[idx]), 1e-3))
    elapsed = time.perf_counter() - start
    ok = sign_mismatch == 0 and objective_gap < 1e-3 and worst_eq <= 1e-8 and not kkt_bad and grad_err < 1e-5 \
        and elapsed < 10
    detail = (f"{n_instances} oracle instances n<=8, {sign_mismatch} sign mismatches, objective gap "
              f"{objective_gap:.1e}; max |sum a y| {worst_eq:.1e}; KKT failures {kkt_bad or 'none'} over "
              f"{len(grams)} datasets x {len(C_GRID)} C; MLP gradient rel err {grad_err:.1e}; {elapsed:.2f} s "
              "(Gram construction excluded)")
    assert record("C3 solver suite", ok, detail)


def test_c04_in_domain():
    report, elapsed = preset("in_domain")
    acc = report["metrics"]["accuracy"]
    detail = (f"accuracy {acc:.4f} (floor 0.90, reference 0.9772), selected {report['selected']}, "
              f"{report['n_test']} test states; {elapsed:.0f} s")
    assert record("C4 in-domain QSVM", acc >= 0.90, detail)


def test_c05_cross_domain_werner():
    report, elapsed = preset("xdomain_werner")
    cells = report["cells"]
    lines, failing = [], []
    for c in cells:
        acc, ref = c["metrics"]["accuracy"], REFERENCE_WERNER_ACCURACY[(c["train_bell"], c["test_bell"])]
        lines.append(f"{c['train_bell']}->{c['test_bell']} {acc:.2f} (ref {ref:.2f})")
        if acc < ref - 0.10 - 1e-12:
            failing.append(c["name"])
    headline = next(c for c in cells if (c["train_bell"], c["test_bell"]) == ("psi_minus", "psi_plus"))
    ok = len(cells) == 12 and headline["metrics"]["accuracy"] >= 0.80 and not failing and elapsed / 12 < 600
    detail = "; ".join(lines) + f"; below floor: {failing or 'none'}; {elapsed:.0f} s for 12 cells"
    assert record("C5 cross-domain Werner", ok, detail)


def test_c06_horodecki():
    report, _ = preset("xdomain_horodecki")
    m = report["metrics"]
    detail = (f"accuracy {m['accuracy']:.2f}, precision {m['precision']:.2f}, recall {m['recall']:.2f}, "
              f"f1 {m['f1']:.2f} (floor 0.95)")
    assert record("C6 Horodecki cross-domain", m["accuracy"] >= 0.95, detail)


def test_c07_discord():
    report, _ = preset("discord_bd")
    m = report["metrics"]
    ok = m["accuracy"] >= 0.63 and m["precision"] >= 0.70
    detail = (f"accuracy {m['accuracy']:.2f} (floor 0.63), precision {m['precision']:.2f} (floor 0.70), "
              f"selected {report['selected']}")
    assert record("C7 discord cross-domain", ok, detail)


def test_c08_robustness():
    report, _ = preset("robustness")
    gaps = []
    for c in report["cells"]:
        gaps.append((c["rotated"]["name"], c["rotated"]["metrics"]["accuracy"] - c["unrotated_accuracy"]))
    worst = max(abs(g) for _, g in gaps)
    # independent re-check of concurrence invariance on every rotated test state
    shift = 0.0
    for c in report["cells"]:
        rotated_spec = DataSpec.from_dict(c["rotated"]["config"]["test"])
        plain = build_dataset(replace(rotated_spec, rotate_seed=None))
        rotated = build_dataset(rotated_spec)
        shift = max(shift, max(abs(concurrence(a.dm) - concurrence(b.dm)) for a, b in zip(plain, rotated)))
    # a second rotation seed on the headline cell must also clear its floor
    alt = run_experiment(werner_cell_config("psi_minus", "psi_plus", 0, rotate_seed=12345))
    alt_acc = alt["metrics"]["accuracy"]
    ok = worst <= 0.10 + 1e-12 and shift <= 1e-9 and alt_acc >= 0.80
    detail = (f"max |rotated - unrotated| {worst:.2f} over {len(gaps)} cells, max concurrence shift {shift:.1e}, "
              f"psi_minus->psi_plus with second rotate seed {alt_acc:.2f}")
    assert record("C8 robustness", ok, detail)


def test_c09_comparative_claim():
    csvm, _ = preset("baseline_csvm")
    nn, _ = preset("baseline_nn")
    statuses = [f"{c['qsvm']['name']} gap {c['accuracy_gap']:+.2f} {c['gap_criterion']} (seed {c['seed']})"
                for c in csvm["cells"]]
    # the gating part: every degenerate prediction is flagged, and only those
    flags_ok = True
    reports = [c["csvm"] for c in csvm["cells"]] + nn["cells"]
    for r in reports:
        preds = {s["pred"] for s in r["per_state"]}
        expected = preds.pop() if len(preds) == 1 else None
        flags_ok &= r["degenerate_prediction"] == expected
    degenerate = [r["name"] for r in reports if r["degenerate_prediction"] is not None]
    nn_acc = [f"{c['name']} {c['metrics']['accuracy']:.2f}" for c in nn["cells"]]
    detail = ("; ".join(statuses) + f"; degenerate flagged: {degenerate or 'none'}; NN accuracies: "
              + ", ".join(nn_acc))
    assert record("C9 QSVM vs classical (soft)", flags_ok, detail)


@pytest.mark.parametrize("name", ["in_domain", "xdomain_werner", "xdomain_horodecki", "xdomain_mems",
                                  "robustness", "discord_bd", "discord_werner", "baseline_csvm", "baseline_nn"])
def test_c10_determinism(name):
    first, _ = preset(name)
    second = run_preset(name)
    same = dumps_report(first) == dumps_report(second)
    assert record(f"C10 determinism {name}", same, "byte-identical" if same else "reports differ")
