import numpy as np
import pytest

from lotset.deform import DeformationConfig
from lotset.errors import ConfigError, InfeasibleSplit
from lotset.harness import (
    ExperimentConfig,
    run_curve,
    run_ood,
    summarize,
    write_curve_outputs,
    write_ood_outputs,
)

FAST = dict(
    classes=3,
    points=16,
    dim=2,
    train_per_class=4,
    test_per_class=5,
    deform=DeformationConfig(0.5, 1.5, 0.1, 0.0),
    methods=("lotns", "gem1+lr", "covpool+ns"),
    split_sizes=(1, 2),
    repeats=2,
    seed=17,
)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(**{**FAST, "methods": ("flux-capacitor",)})
    with pytest.raises(ConfigError):
        ExperimentConfig(**{**FAST, "repeats": 0})


def test_infeasible_split_raised_at_run_time():
    with pytest.raises(InfeasibleSplit):
        run_curve(ExperimentConfig(**{**FAST, "split_sizes": (8,)}))


def test_curve_row_count_and_canonical_order():
    cfg = ExperimentConfig(**FAST)
    rows = run_curve(cfg)
    assert len(rows) == len(cfg.methods) * len(cfg.split_sizes) * cfg.repeats
    keys = [(r.method, r.split_size, r.repeat_index) for r in rows]
    assert keys == sorted(keys)
    assert {r.method for r in rows} == set(cfg.methods)


def test_curve_single_cell():
    cfg = ExperimentConfig(**{**FAST, "split_sizes": (2,), "repeats": 1})
    rows = run_curve(cfg)
    assert len(rows) == len(cfg.methods)


def test_curve_accuracy_is_exact_fraction():
    cfg = ExperimentConfig(**FAST)
    total = cfg.classes * cfg.test_per_class
    for r in run_curve(cfg):
        assert r.accuracy == round(r.accuracy * total) / total


def test_curve_deterministic_outputs(tmp_path):
    cfg = ExperimentConfig(**FAST)
    a, b = tmp_path / "a", tmp_path / "b"
    write_curve_outputs(run_curve(cfg), cfg, a)
    write_curve_outputs(run_curve(cfg), cfg, b)
    for name in ("results.csv", "summary.csv", "curve.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_curve_outputs_exist(tmp_path):
    cfg = ExperimentConfig(**FAST)
    write_curve_outputs(run_curve(cfg), cfg, tmp_path)
    results = (tmp_path / "results.csv").read_text().splitlines()
    assert results[0] == "method,split_size,repeat,accuracy"
    assert len(results) == 1 + len(cfg.methods) * 2 * 2
    assert (tmp_path / "timings.csv").is_file()
    svg = (tmp_path / "curve.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == len(cfg.methods)


def test_ood_degenerate_matches_curve():
    cfg = ExperimentConfig(**{**FAST, "ood_deform": FAST["deform"]})
    curve_rows = {(r.method, r.split_size, r.repeat_index): r.accuracy for r in run_curve(cfg)}
    for r in run_ood(cfg):
        assert r.accuracy_ood == r.accuracy_matched  # identical test sets
        assert r.accuracy_matched == curve_rows[(r.method, r.split_size, r.repeat_index)]


def test_ood_doubled_magnitudes_reports_drop_for_every_method(tmp_path):
    cfg = ExperimentConfig(**FAST)  # default ood_factor=2
    rows = run_ood(cfg)
    assert {r.method for r in rows} == set(cfg.methods)
    for r in rows:
        assert np.isfinite(r.drop)
    write_ood_outputs(rows, cfg, tmp_path)
    text = (tmp_path / "ood_results.csv").read_text().splitlines()
    assert text[0] == "method,split_size,repeat,accuracy_matched,accuracy_ood,drop"
    assert (tmp_path / "ood_summary.csv").is_file()
    assert (tmp_path / "ood_curve.svg").is_file()


def test_ood_deterministic():
    cfg = ExperimentConfig(**FAST)
    a = [(r.method, r.split_size, r.repeat_index, r.accuracy_matched, r.accuracy_ood)
         for r in run_ood(cfg)]
    b = [(r.method, r.split_size, r.repeat_index, r.accuracy_matched, r.accuracy_ood)
         for r in run_ood(cfg)]
    assert a == b


def test_summarize_mean_and_std():
    cfg = ExperimentConfig(**FAST)
    rows = run_curve(cfg)
    for method, size, mean, std in summarize(rows):
        accs = [r.accuracy for r in rows if r.method == method and r.split_size == size]
        assert abs(mean - np.mean(accs)) < 1e-15
        assert abs(std - np.std(accs, ddof=1)) < 1e-15
