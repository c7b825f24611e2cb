"""Experiment protocols: accuracy-vs-training-size curves and the
out-of-distribution comparison.

Protocol per repeat: draw one per-class subsample of the training pool
(without replacement) and hand the SAME subsample to every method, then
score on the full test set. Result rows are written in canonical order
(method, split size, repeat) so reruns with the same config and seed
produce byte-identical CSVs. Wall-clock timings go to a separate
timings.csv, which is excluded from that reproducibility contract.

The out-of-distribution run trains on in-distribution data and evaluates
each trained model twice: on a matched test set and on one generated with
scaled-up deformation magnitudes from the same random substreams (same
draws, larger bounds), so the reported drop isolates the magnitude shift.
"""

import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import baselines, dataio, subspace
from .deform import DeformationConfig, SynthSpec, default_templates, synth_dataset
from .errors import ConfigError, InfeasibleSplit
from .pointset import LabeledDataset
from .seeding import substream
from .svgplot import line_chart

DEFAULT_METHODS = (
    "lotns",
    "gem1+lr", "gem2+lr", "gem4+lr", "covpool+lr", "fsort+lr",
    "gem1+ns", "gem2+ns", "gem4+ns", "covpool+ns", "fsort+ns",
)


@dataclass
class ExperimentConfig:
    classes: int = 10
    points: int = 64
    dim: int = 2
    train_per_class: int = 8
    test_per_class: int = 25
    deform: DeformationConfig = field(default_factory=DeformationConfig)
    ood_deform: DeformationConfig | None = None  # default: deform.scaled(ood_factor)
    ood_factor: float = 2.0
    methods: tuple = DEFAULT_METHODS
    split_sizes: tuple = (1, 2, 4, 8)
    repeats: int = 10
    seed: int = 0
    flags: tuple = subspace.ALL_FLAGS
    variance: float = 0.99
    ref_jitter: float = 0.1
    fsort_bins: int = 16
    train_manifest: str | None = None
    test_manifest: str | None = None
    target_n: int | None = None

    def __post_init__(self):
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if not self.split_sizes or any(s < 1 for s in self.split_sizes):
            raise ConfigError("split sizes must be positive")
        unknown = set(self.methods) - set(DEFAULT_METHODS)
        if unknown:
            raise ConfigError(f"unknown methods: {sorted(unknown)}")


@dataclass(frozen=True)
class ResultRow:
    method: str
    split_size: int
    repeat_index: int
    accuracy: float
    train_seconds: float
    test_seconds: float


def synth_spec_for(cfg: ExperimentConfig, test_deform: DeformationConfig | None = None) -> SynthSpec:
    templates = default_templates(cfg.classes, cfg.points, cfg.dim, cfg.seed)
    return SynthSpec(
        templates=templates,
        n_train=cfg.train_per_class,
        n_test=cfg.test_per_class,
        config_train=cfg.deform,
        config_test=test_deform if test_deform is not None else cfg.deform,
        seed=cfg.seed,
    )


def load_experiment_data(cfg: ExperimentConfig) -> tuple[LabeledDataset, LabeledDataset]:
    if cfg.train_manifest is not None:
        if cfg.test_manifest is None:
            raise ConfigError("train_manifest given without test_manifest")
        train = dataio.load_dataset(cfg.train_manifest, cfg.target_n, cfg.seed)
        test = dataio.load_dataset(cfg.test_manifest, cfg.target_n, cfg.seed)
        return train, test
    return synth_dataset(synth_spec_for(cfg))


def subsample_indices(train: LabeledDataset, per_class: int, rng) -> list[int]:
    """Per-class sample without replacement; same subsample for all methods."""
    chosen = []
    for label in range(train.k):
        idx = train.class_indices(label)
        if per_class > len(idx):
            raise InfeasibleSplit(
                f"class {label} has {len(idx)} training samples, need {per_class}"
            )
        pick = rng.choice(len(idx), size=per_class, replace=False)
        chosen.extend(idx[i] for i in np.sort(pick))
    return chosen


def _embed_sets(samples, kind: str, fsort_bins: int) -> np.ndarray:
    if kind.startswith("gem"):
        return np.array([baselines.gem_embed(p, float(kind[3:])).vector for p in samples])
    if kind == "covpool":
        return np.array([baselines.cov_embed(p).vector for p in samples])
    if kind == "fsort":
        return np.array([baselines.fsort_embed(p, fsort_bins).vector for p in samples])
    raise ConfigError(f"unknown embedding kind {kind!r}")


def fit_method(method: str, train: LabeledDataset, cfg: ExperimentConfig, seed: int):
    """Train one method; returns an opaque predictor state."""
    if method == "lotns":
        model = subspace.train(
            train,
            flags=cfg.flags,
            variance_fraction=cfg.variance,
            ref_jitter=cfg.ref_jitter,
            seed=seed,
        )
        return ("lotns", model)
    kind, _, clf = method.partition("+")
    x = _embed_sets(train.samples, kind, cfg.fsort_bins)
    y = np.array(train.labels)
    if clf == "lr":
        return ("lr", kind, baselines.fit_linear(x, y))
    if clf == "ns":
        return ("ns", kind, baselines.ns_on_embeddings(x, y, cfg.variance))
    raise ConfigError(f"unknown method {method!r}")


def predict_method(state, samples, cfg: ExperimentConfig) -> np.ndarray:
    if state[0] == "lotns":
        return subspace.predict_many(samples, state[1])
    _, kind, fitted = state
    x = _embed_sets(samples, kind, cfg.fsort_bins)
    if state[0] == "lr":
        return baselines.predict_linear(fitted, x)
    return baselines.predict_ns(fitted, x)


def _accuracy(pred: np.ndarray, labels) -> float:
    labels = np.asarray(labels)
    return float(np.sum(pred == labels)) / len(labels)


def evaluate_split(
    train: LabeledDataset,
    test: LabeledDataset,
    cfg: ExperimentConfig,
    per_class: int,
    repeat: int,
) -> list[ResultRow]:
    rng = substream(cfg.seed, "split", repeat, per_class)
    sub = train.subset(subsample_indices(train, per_class, rng))
    rows = []
    for method in cfg.methods:
        t0 = time.perf_counter()
        state = fit_method(method, sub, cfg, cfg.seed)
        t1 = time.perf_counter()
        pred = predict_method(state, test.samples, cfg)
        t2 = time.perf_counter()
        rows.append(
            ResultRow(method, per_class, repeat, _accuracy(pred, test.labels), t1 - t0, t2 - t1)
        )
    return rows


def _canonical(rows: list[ResultRow]) -> list[ResultRow]:
    return sorted(rows, key=lambda r: (r.method, r.split_size, r.repeat_index))


def run_curve(cfg: ExperimentConfig) -> list[ResultRow]:
    train, test = load_experiment_data(cfg)
    rows = []
    for repeat in range(cfg.repeats):
        for per_class in cfg.split_sizes:
            rows.extend(evaluate_split(train, test, cfg, per_class, repeat))
    return _canonical(rows)


def summarize(rows: list[ResultRow]) -> list[tuple]:
    """(method, split_size, mean accuracy, sample std) in canonical order."""
    keys = sorted({(r.method, r.split_size) for r in rows})
    out = []
    for method, size in keys:
        accs = [r.accuracy for r in rows if r.method == method and r.split_size == size]
        mean = float(np.mean(accs))
        std = float(np.std(accs, ddof=1)) if len(accs) > 1 else 0.0
        out.append((method, size, mean, std))
    return out


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_curve_outputs(rows: list[ResultRow], cfg: ExperimentConfig, out_dir) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    res = ["method,split_size,repeat,accuracy"]
    res += [f"{r.method},{r.split_size},{r.repeat_index},{_fmt(r.accuracy)}" for r in rows]
    dataio._atomic_write_text(out_dir / "results.csv", "\n".join(res) + "\n")
    tim = ["method,split_size,repeat,train_seconds,test_seconds"]
    tim += [
        f"{r.method},{r.split_size},{r.repeat_index},{r.train_seconds:.6f},{r.test_seconds:.6f}"
        for r in rows
    ]
    dataio._atomic_write_text(out_dir / "timings.csv", "\n".join(tim) + "\n")
    summary = summarize(rows)
    summ = ["method,split_size,mean_accuracy,std_accuracy"]
    summ += [f"{m},{s},{_fmt(mean)},{_fmt(std)}" for m, s, mean, std in summary]
    dataio._atomic_write_text(out_dir / "summary.csv", "\n".join(summ) + "\n")
    xs = sorted(cfg.split_sizes)
    series = {}
    for method in sorted(cfg.methods):
        series[method] = [
            next(mean for m, s, mean, _ in summary if m == method and s == size) for size in xs
        ]
    chart = line_chart(
        title="Accuracy vs training samples per class",
        x_label="training samples per class",
        y_label="accuracy",
        xs=xs,
        series=series,
    )
    dataio._atomic_write_text(out_dir / "curve.svg", chart)


@dataclass(frozen=True)
class OodRow:
    method: str
    split_size: int
    repeat_index: int
    accuracy_matched: float
    accuracy_ood: float

    @property
    def drop(self) -> float:
        return self.accuracy_matched - self.accuracy_ood


def run_ood(cfg: ExperimentConfig) -> list[OodRow]:
    """Train in-distribution; test on matched and magnitude-scaled test sets."""
    if cfg.train_manifest is not None:
        raise ConfigError("the out-of-distribution protocol needs a synthetic source")
    out_deform = cfg.ood_deform if cfg.ood_deform is not None else cfg.deform.scaled(cfg.ood_factor)
    train, test_in = synth_dataset(synth_spec_for(cfg))
    _, test_out = synth_dataset(synth_spec_for(cfg, test_deform=out_deform))
    rows = []
    for repeat in range(cfg.repeats):
        for per_class in cfg.split_sizes:
            rng = substream(cfg.seed, "split", repeat, per_class)
            sub = train.subset(subsample_indices(train, per_class, rng))
            for method in cfg.methods:
                state = fit_method(method, sub, cfg, cfg.seed)
                acc_in = _accuracy(predict_method(state, test_in.samples, cfg), test_in.labels)
                acc_out = _accuracy(predict_method(state, test_out.samples, cfg), test_out.labels)
                rows.append(OodRow(method, per_class, repeat, acc_in, acc_out))
    return sorted(rows, key=lambda r: (r.method, r.split_size, r.repeat_index))


def write_ood_outputs(rows: list[OodRow], cfg: ExperimentConfig, out_dir) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    res = ["method,split_size,repeat,accuracy_matched,accuracy_ood,drop"]
    res += [
        f"{r.method},{r.split_size},{r.repeat_index},"
        f"{_fmt(r.accuracy_matched)},{_fmt(r.accuracy_ood)},{_fmt(r.drop)}"
        for r in rows
    ]
    dataio._atomic_write_text(out_dir / "ood_results.csv", "\n".join(res) + "\n")
    keys = sorted({(r.method, r.split_size) for r in rows})
    summ = ["method,split_size,mean_matched,mean_ood,mean_drop"]
    xs = sorted(cfg.split_sizes)
    series = {}
    means = {}
    for method, size in keys:
        sel = [r for r in rows if r.method == method and r.split_size == size]
        m_in = float(np.mean([r.accuracy_matched for r in sel]))
        m_out = float(np.mean([r.accuracy_ood for r in sel]))
        means[(method, size)] = (m_in, m_out)
        summ.append(f"{method},{size},{_fmt(m_in)},{_fmt(m_out)},{_fmt(m_in - m_out)}")
    dataio._atomic_write_text(out_dir / "ood_summary.csv", "\n".join(summ) + "\n")
    for method in sorted(cfg.methods):
        series[method] = [means[(method, size)][1] for size in xs]
    chart = line_chart(
        title="Out-of-distribution accuracy vs training samples per class",
        x_label="training samples per class",
        y_label="accuracy",
        xs=xs,
        series=series,
    )
    dataio._atomic_write_text(out_dir / "ood_curve.svg", chart)
