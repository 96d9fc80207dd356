"""Command-line entry point: dataset generation, labelling, kernels, training and experiments."""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .baselines import MlpConfig, linear_kernel, mlp_predict, mlp_train, rbf_kernel
from .harness import (
    PRESETS,
    compute_metrics,
    dumps_report,
    emit_plot_data,
    emit_report,
    feature_matrix,
    labels_for,
    load_config,
    run_experiment,
    run_preset,
)
from .measures import concurrence, geometric_discord
from .qkernel import FeatureMapConfig, gram_matrix
from .states import FamilySpec, read_jsonl, rotate_records, sample_family, write_jsonl
from .svm import load_model, predict, predict_proba, save_model, train_smo, with_platt

log = logging.getLogger(__name__)


def _cmd_gen(args) -> None:
    if args.family == "bell-diagonal":
        spec = FamilySpec("bell-diagonal", t_range=(args.t_min, args.t_max), zero_discord=args.zero_discord)
    else:
        spec = FamilySpec(args.family, bell=args.bell, p_range=(args.p_min, args.p_max))
    write_jsonl(sample_family(spec, args.n, args.seed), args.output)


def _cmd_rotate(args) -> None:
    write_jsonl(rotate_records(read_jsonl(args.input), args.seed), args.output)


def _cmd_label(args) -> None:
    measure = concurrence if args.task == "entanglement" else geometric_discord
    key = "label_ent" if args.task == "entanglement" else "label_discord"
    with open(args.output, "w") as fh:
        for rec in read_jsonl(args.input):
            value = measure(rec.dm)
            row = replace(rec, **{key: 1 if value > 1e-9 else -1}).to_json_dict()
            row["measure"] = value
            fh.write(json.dumps(row) + "\n")


def _features(path, scheme):
    return feature_matrix(read_jsonl(path), scheme)


def _cmd_kernel(args) -> None:
    X = _features(args.input, args.scheme)
    Y = _features(args.test, args.scheme) if args.test else None
    if args.type == "quantum":
        K = gram_matrix(X, Y, cfg=FeatureMapConfig(d=X.shape[1], alpha=args.alpha, reps=args.reps), n_jobs=args.jobs)
    elif args.type == "linear":
        K = linear_kernel(X, Y)
    else:
        K = rbf_kernel(X, Y, gamma=args.gamma)
    np.savetxt(args.output, np.atleast_2d(K), delimiter=",", fmt="%.17g")


def _read_gram(path) -> tuple[np.ndarray, str]:
    with open(path, "rb") as fh:
        raw = fh.read()
    return np.atleast_2d(np.loadtxt(path, delimiter=",", ndmin=2)), hashlib.sha256(raw).hexdigest()


def _cmd_train(args) -> None:
    K, digest = _read_gram(args.kernel)
    y = labels_for(read_jsonl(args.data), args.task)
    model = with_platt(train_smo(K, y, C=args.C, tol=args.tol, seed=args.seed), K, y)
    model = replace(model, metadata={**model.metadata, "kernel_sha256": digest, "task": args.task})
    save_model(model, args.output)


def _cmd_predict(args) -> None:
    model = load_model(args.model)
    K, _ = _read_gram(args.kernel)
    records = read_jsonl(args.data)
    labels, proba = predict(model, K), predict_proba(model, K)
    out = {"predictions": [{"id": r.id, "pred": int(p), "probability": float(q)}
                           for r, p, q in zip(records, labels, proba)]}
    task = model.metadata.get("task", "entanglement")
    truth = labels_for(records, task)
    if all(t in (-1, 1) for t in truth):
        m = compute_metrics(truth, labels)
        out["metrics"], out["confusion"] = m.metrics_dict(), m.confusion_dict()
    with open(args.output, "w") as fh:
        json.dump(out, fh, indent=2)


def _cmd_mlp(args) -> None:
    train, test = read_jsonl(args.train), read_jsonl(args.test)
    Xtr, Xte = feature_matrix(train, "dm16"), feature_matrix(test, "dm16")
    ytr, yte = labels_for(train, args.task), labels_for(test, args.task)
    cfg = MlpConfig(n_hidden=args.hidden, epochs=args.epochs, learning_rate=args.lr, seed=args.seed)
    model = mlp_train(Xtr, (ytr > 0).astype(float), cfg)
    proba, pred = mlp_predict(model, Xte)
    m = compute_metrics(yte, pred)
    uniq = np.unique(pred)
    report = {
        "config": {"n_hidden": cfg.n_hidden, "epochs": cfg.epochs, "learning_rate": cfg.learning_rate,
                   "seed": cfg.seed, "task": args.task},
        "metrics": m.metrics_dict(),
        "confusion": m.confusion_dict(),
        "final_loss": model.loss_trace[-1],
        "degenerate_prediction": int(uniq[0]) if uniq.size == 1 else None,
        "per_state": [{"id": r.id, "true": int(t), "pred": int(p), "probability": float(q)}
                      for r, t, p, q in zip(test, yte, pred, proba)],
        "version": __version__,
    }
    emit_report(report, args.output)


def _cmd_experiment(args) -> None:
    if args.preset:
        report = run_preset(args.preset)
    else:
        report = run_experiment(load_config(args.config), timing=args.timing)
    if args.output:
        emit_report(report, args.output)
    else:
        sys.stdout.write(dumps_report(report))
    if args.plot_data:
        if "per_state" in report:
            emit_plot_data(report, args.plot_data)
        else:
            stem = args.plot_data[:-4] if args.plot_data.endswith(".csv") else args.plot_data
            for cell in report["cells"]:
                single = cell.get("rotated") or cell.get("qsvm") or cell
                emit_plot_data(single, f"{stem}.{single['name']}.csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xdomain-qsvm", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample a labelled state dataset")
    g.add_argument("--family", required=True, choices=["werner", "horodecki", "mems", "bell-diagonal"])
    g.add_argument("--bell", default="psi-minus", choices=["psi-minus", "psi-plus", "phi-minus", "phi-plus"])
    g.add_argument("--p-min", type=float, default=0.0)
    g.add_argument("--p-max", type=float, default=1.0)
    g.add_argument("--t-min", type=float, default=-1.0)
    g.add_argument("--t-max", type=float, default=1.0)
    g.add_argument("--zero-discord", action="store_true")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=_cmd_gen)

    r = sub.add_parser("rotate", help="apply random local rotations to a dataset")
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("-i", "--input", required=True)
    r.add_argument("-o", "--output", required=True)
    r.set_defaults(func=_cmd_rotate)

    lb = sub.add_parser("label", help="recompute a label field and attach the measure value")
    lb.add_argument("--task", required=True, choices=["entanglement", "discord"])
    lb.add_argument("-i", "--input", required=True)
    lb.add_argument("-o", "--output", required=True)
    lb.set_defaults(func=_cmd_label)

    k = sub.add_parser("kernel", help="write a Gram matrix as CSV")
    k.add_argument("--type", default="quantum", choices=["quantum", "linear", "rbf"])
    k.add_argument("--alpha", type=float, default=float(np.pi))
    k.add_argument("--reps", type=int, default=2)
    k.add_argument("--gamma", type=float, default=1.0)
    k.add_argument("--scheme", default="dm16", choices=["dm16", "bloch15"])
    k.add_argument("--jobs", type=int, default=1)
    k.add_argument("-i", "--input", required=True, help="training records (columns)")
    k.add_argument("-j", "--test", help="test records (rows of a cross-kernel)")
    k.add_argument("-o", "--output", required=True)
    k.set_defaults(func=_cmd_kernel)

    t = sub.add_parser("train", help="fit an SVM on a precomputed Gram matrix")
    t.add_argument("--kernel", required=True)
    t.add_argument("--data", required=True)
    t.add_argument("--task", default="entanglement", choices=["entanglement", "discord"])
    t.add_argument("--C", type=float, default=1.0)
    t.add_argument("--tol", type=float, default=1e-3)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("-o", "--output", required=True)
    t.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="classify with a saved SVM and a cross-kernel")
    p.add_argument("--model", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_predict)

    m = sub.add_parser("mlp", help="train and evaluate the feedforward baseline")
    m.add_argument("--hidden", type=int, default=50)
    m.add_argument("--epochs", type=int, default=200)
    m.add_argument("--lr", type=float, default=0.01)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--train", required=True)
    m.add_argument("--test", required=True)
    m.add_argument("--task", default="entanglement", choices=["entanglement", "discord"])
    m.add_argument("-o", "--output", required=True)
    m.set_defaults(func=_cmd_mlp)

    e = sub.add_parser("experiment", help="run a configured or preset experiment")
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--config")
    src.add_argument("--preset", choices=sorted(PRESETS))
    e.add_argument("-o", "--output")
    e.add_argument("--plot-data")
    e.add_argument("--timing", action="store_true", help="record wall-clock time (breaks byte-identity)")
    e.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
