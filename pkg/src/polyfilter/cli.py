"""Command-line entry point: every experiment is a CSV-emitting subcommand.

Exit codes: 0 success, 1 data error, 2 numerical failure, 3 selftest failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import selftest
from .data import DataError, DatasetBundle, load_dataset
from .layers import save_checkpoint
from .train import NumericalError, RunResult, TrainConfig, run_ten_fold, train_single_split

FAMILIES = ("chebyshev", "laguerre", "meixner", "krawtchouk")


def _write_atomic(path: str, text: str):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _epochs_csv(result: RunResult) -> str:
    lines = ["epoch,train_loss,val_acc,test_acc"]
    for epoch, loss, val, test in result.log:
        lines.append(f"{epoch},{loss:.6f},{val:.6f},{test:.6f}")
    return "\n".join(lines) + "\n"


def _default_epochs(data: DatasetBundle, given: int | None) -> int:
    if given is not None:
        return given
    return 400 if data.is_folds else 200


def _make_config(args, data: DatasetBundle, k=None, h=None, family=None) -> TrainConfig:
    return TrainConfig(
        lr=args.lr,
        weight_decay=args.wd,
        epochs=_default_epochs(data, args.epochs),
        K=k if k is not None else args.k,
        H=h if h is not None else getattr(args, "h", 16),
        dropout_p=args.dropout,
        seed=args.seed,
        family=family if family is not None else args.family[0],
        krawtchouk_N=args.krawtchouk_n,
    )


def _run(data: DatasetBundle, cfg: TrainConfig):
    """(acc_mean, acc_std, results) for either split kind."""
    if data.is_folds:
        return run_ten_fold(data, cfg)
    r = train_single_split(data, cfg)
    return r.final_test_acc, 0.0, [r]


def _mean_shape_params(results: list[RunResult]) -> dict[str, float]:
    """Columns like alpha_layer1 averaged over folds (single run: the values)."""
    out: dict[str, float] = {}
    for layer_key in sorted(results[0].shape_params):
        idx = layer_key.removeprefix("layer")
        for pname in sorted(results[0].shape_params[layer_key]):
            vals = [r.shape_params[layer_key][pname] for r in results]
            out[f"{pname}_layer{idx}"] = float(np.mean(vals))
    return out


def cmd_train(args) -> int:
    data = load_dataset(args.dataset)
    cfg = _make_config(args, data)
    mean, std, results = _run(data, cfg)
    shape_cols = _mean_shape_params(results)
    header = "dataset,family,K,H,seed,acc_mean,acc_std" + "".join(
        f",{k}" for k in shape_cols)
    row = (f"{data.name},{cfg.family},{cfg.K},{cfg.H},{cfg.seed},"
           f"{mean:.6f},{std:.6f}" + "".join(f",{v:.6f}" for v in shape_cols.values()))
    _write_atomic(os.path.join(args.out, "summary.csv"), header + "\n" + row + "\n")
    if data.is_folds:
        for i, r in enumerate(results):
            _write_atomic(os.path.join(args.out, f"epochs_fold{i}.csv"),
                          _epochs_csv(r))
            save_checkpoint(r.model, os.path.join(args.out, f"checkpoint_fold{i}.json"))
    else:
        _write_atomic(os.path.join(args.out, "epochs.csv"), _epochs_csv(results[0]))
        save_checkpoint(results[0].model, os.path.join(args.out, "checkpoint.json"))
    print(f"{data.name} {cfg.family} K={cfg.K} H={cfg.H}: "
          f"acc {mean:.4f} +/- {std:.4f}")
    return 0


def cmd_ablate_k(args) -> int:
    data = load_dataset(args.dataset)
    rows = ["k,family,acc"]
    for family in args.family:
        for k in args.ks:
            cfg = _make_config(args, data, k=k, family=family)
            mean, _, results = _run(data, cfg)
            rows.append(f"{k},{family},{mean:.6f}")
            _write_atomic(os.path.join(args.out, f"epochs_{family}_k{k}.csv"),
                          _epochs_csv(results[0]))
            print(f"{data.name} {family} K={k}: acc {mean:.4f}")
    _write_atomic(os.path.join(args.out, "k_ablation.csv"), "\n".join(rows) + "\n")
    return 0


def cmd_ablate_h(args) -> int:
    data = load_dataset(args.dataset)
    rows = ["h,family,acc"]
    for family in args.family:
        for h in args.hs:
            cfg = _make_config(args, data, h=h, family=family)
            mean, _, results = _run(data, cfg)
            rows.append(f"{h},{family},{mean:.6f}")
            _write_atomic(os.path.join(args.out, f"epochs_{family}_h{h}.csv"),
                          _epochs_csv(results[0]))
            print(f"{data.name} {family} H={h}: acc {mean:.4f}")
    _write_atomic(os.path.join(args.out, "h_ablation.csv"), "\n".join(rows) + "\n")
    return 0


def cmd_report_alpha(args) -> int:
    rows = ["dataset,alpha"]
    for ds in args.dataset:
        data = load_dataset(ds)
        cfg = _make_config(args, data, family="laguerre")
        _, _, results = _run(data, cfg)
        alpha = float(np.mean([r.shape_params["layer1"]["alpha"] for r in results]))
        rows.append(f"{data.name},{alpha:.6f}")
        print(f"{data.name}: learned alpha {alpha:.4f}")
    _write_atomic(os.path.join(args.out, "learned_alpha.csv"), "\n".join(rows) + "\n")
    return 0


def cmd_selftest(_args) -> int:
    reports = selftest.run_all()
    failed = False
    for rep in reports:
        status = "PASS" if rep.ok else "FAIL"
        print(f"[{status}] {rep.name}: {rep.n_pass} checks passed, "
              f"{len(rep.failures)} failed")
        for msg in rep.failures[:10]:
            print(f"    {msg}")
        failed = failed or not rep.ok
    return 3 if failed else 0


def _add_train_flags(p: argparse.ArgumentParser, multi_family: bool):
    p.add_argument("--family", choices=FAMILIES,
                   action="append" if multi_family else None,
                   default=None)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--h", type=int, default=16)
    p.add_argument("--epochs", type=int, default=None,
                   help="default: 200 (single split) or 400 (10 folds)")
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--wd", type=float, default=5e-4)
    p.add_argument("--dropout", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--krawtchouk-n", type=int, default=10)
    p.add_argument("--out", default="out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyfilter",
        description="Adaptive orthogonal-polynomial spectral GNN experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one model, emit summary + epoch CSVs")
    p.add_argument("--dataset", required=True)
    _add_train_flags(p, multi_family=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("ablate-k", help="vary polynomial degree K")
    p.add_argument("--dataset", required=True)
    p.add_argument("--ks", type=lambda s: [int(t) for t in s.split(",")],
                   default=[2, 3, 5, 7, 10])
    _add_train_flags(p, multi_family=True)
    p.set_defaults(func=cmd_ablate_k)

    p = sub.add_parser("ablate-h", help="vary hidden dimension H")
    p.add_argument("--dataset", required=True)
    p.add_argument("--hs", type=lambda s: [int(t) for t in s.split(",")],
                   default=[16, 32, 64])
    _add_train_flags(p, multi_family=True)
    p.set_defaults(func=cmd_ablate_h)

    p = sub.add_parser("report-alpha",
                       help="train a Laguerre model per dataset, report learned alpha")
    p.add_argument("--dataset", action="append", required=True)
    _add_train_flags(p, multi_family=False)
    p.set_defaults(func=cmd_report_alpha)

    p = sub.add_parser("selftest", help="run the built-in oracle suites")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "family"):
        if args.family is None:
            args.family = ["laguerre"]
        elif isinstance(args.family, str):
            args.family = [args.family]
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
