"""Command-line entry point.

Subcommands: gen (synthesize a dataset tree), train (fit and save a
model), predict (labels and residuals as CSV on stdout), curve
(accuracy-vs-training-size experiment), ood (out-of-distribution
experiment).

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
failure.
"""

import argparse
import sys
import time
from pathlib import Path

from . import config as config_mod
from . import dataio, harness, subspace
from .errors import ConfigError, DataError, LotsetError, NumericError


def _add_common(p, *, seed=True, out=True, cfg=True):
    if cfg:
        p.add_argument("--config", required=True, help="flat key = value config file")
    if out:
        p.add_argument("--out", required=True, help="output directory")
    if seed:
        p.add_argument("--seed", type=int, default=None, help="override the config seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lotset", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset directory with manifests")
    _add_common(p)

    p = sub.add_parser("train", help="train a model from a manifest")
    p.add_argument("--manifest", required=True, help="training manifest path")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--flags", default="T,D,S", help="invariance flags, subset of T,D,S or 'none'")
    p.add_argument("--variance", type=float, default=0.99, help="explained variance fraction")
    p.add_argument("--ref-jitter", type=float, default=0.1, help="reference perturbation scale")
    p.add_argument("--target-n", type=int, default=None, help="resample every set to N points")

    p = sub.add_parser("predict", help="predict labels for a point set or manifest")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--input", required=True, help="point-set CSV or dataset manifest")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target-n", type=int, default=None,
                   help="resample inputs to N points (defaults to the model's N for manifests)")

    p = sub.add_parser("curve", help="accuracy vs training-set size experiment")
    _add_common(p)

    p = sub.add_parser("ood", help="out-of-distribution robustness experiment")
    _add_common(p)
    return parser


def cmd_gen(args) -> int:
    values = config_mod.read_config(args.config)
    cfg = config_mod.experiment_config(values, {"seed": args.seed})
    spec = harness.synth_spec_for(cfg)
    train, test = harness.load_experiment_data(cfg)
    out = Path(args.out)
    t0 = time.perf_counter()
    for split, ds in (("train", train), ("test", test)):
        (out / split).mkdir(parents=True, exist_ok=True)
        entries = []
        counters = {}
        for sample, label in zip(ds.samples, ds.labels):
            j = counters.get(label, 0)
            counters[label] = j + 1
            rel = f"{split}/class{label:02d}_sample{j:03d}.csv"
            dataio.write_pointset_csv(sample, out / rel)
            entries.append((label, rel))
        dataio.write_manifest(entries, out / f"{split}_manifest.csv")
    n_files = len(train) + len(test)
    print(f"wrote {n_files} point sets and 2 manifests to {out} "
          f"({time.perf_counter() - t0:.2f}s)")
    return 0


def cmd_train(args) -> int:
    flags = config_mod.parse_flags(args.flags)
    train_ds = dataio.load_dataset(args.manifest, args.target_n, args.seed)
    counts = {s.n for s in train_ds.samples}
    if len(counts) > 1 and args.target_n is None:
        raise ConfigError(
            f"training sets have mixed point counts {sorted(counts)}; pass --target-n"
        )
    t0 = time.perf_counter()
    model = subspace.train(
        train_ds,
        flags=flags,
        variance_fraction=args.variance,
        ref_jitter=args.ref_jitter,
        seed=args.seed,
    )
    train_s = time.perf_counter() - t0
    dataio.save_model(model, args.out)
    print(f"trained on {len(train_ds)} samples, {model.k} classes, "
          f"N={model.n}, L={model.dim} ({train_s:.2f}s)")
    for sub in model.subspaces:
        print(f"  class {sub.class_label}: basis size {sub.basis.shape[1]}, "
              f"explained {sub.explained_variance_fraction:.6f}")
    return 0


def cmd_predict(args) -> int:
    model = dataio.load_model(args.model)
    input_path = Path(args.input)
    if dataio.sniff_input(input_path) == "manifest":
        target = args.target_n if args.target_n is not None else model.n
        ds = dataio.load_dataset(input_path, target, args.seed)
        samples = ds.samples
    else:
        p = dataio.read_pointset_csv(input_path)
        if args.target_n is not None:
            from .seeding import substream

            p = dataio._resample(p, args.target_n, substream(args.seed, "resample", 0))
        samples = [p]
    print("index,label," + ",".join(f"residual_{k}" for k in range(model.k)))
    for i, sample in enumerate(samples):
        label, scores = subspace.predict(sample, model)
        print(f"{i},{label}," + ",".join(format(s, ".17g") for s in scores))
    return 0


def cmd_curve(args) -> int:
    values = config_mod.read_config(args.config)
    cfg = config_mod.experiment_config(values, {"seed": args.seed})
    rows = harness.run_curve(cfg)
    harness.write_curve_outputs(rows, cfg, args.out)
    for method, size, mean, std in harness.summarize(rows):
        print(f"{method:12s} split {size:4d}: {mean:.4f} +/- {std:.4f}")
    print(f"results written to {args.out}")
    return 0


def cmd_ood(args) -> int:
    values = config_mod.read_config(args.config)
    cfg = config_mod.experiment_config(values, {"seed": args.seed})
    rows = harness.run_ood(cfg)
    harness.write_ood_outputs(rows, cfg, args.out)
    keys = sorted({(r.method, r.split_size) for r in rows})
    for method, size in keys:
        sel = [r for r in rows if r.method == method and r.split_size == size]
        m_in = sum(r.accuracy_matched for r in sel) / len(sel)
        m_out = sum(r.accuracy_ood for r in sel) / len(sel)
        print(f"{method:12s} split {size:4d}: matched {m_in:.4f} ood {m_out:.4f} "
              f"drop {m_in - m_out:+.4f}")
    print(f"results written to {args.out}")
    return 0


_COMMANDS = {
    "gen": cmd_gen,
    "train": cmd_train,
    "predict": cmd_predict,
    "curve": cmd_curve,
    "ood": cmd_ood,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4
    except LotsetError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
