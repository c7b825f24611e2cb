import numpy as np
import pytest

from lotset.cli import main

GEN_CFG = """
# small synthetic dataset
classes = 3
points = 16
dim = 2
train_per_class = 2
test_per_class = 4
translate_max = 0.5
scale_max = 1.5
shear_max = 0.1
jitter_std = 0
seed = 21
"""

EXP_CFG = GEN_CFG + """
methods = lotns,covpool+lr
split_sizes = 1,2
repeats = 2
flags = T,D,S
variance = 0.99
"""


def _write(tmp_path, name, text):
    f = tmp_path / name
    f.write_text(text)
    return str(f)


def test_gen_writes_tree_and_manifests(tmp_path, capsys):
    cfg = _write(tmp_path, "gen.cfg", GEN_CFG)
    out = tmp_path / "data"
    assert main(["gen", "--config", cfg, "--out", str(out)]) == 0
    train_files = sorted((out / "train").glob("*.csv"))
    test_files = sorted((out / "test").glob("*.csv"))
    assert len(train_files) == 6 and len(test_files) == 12
    assert (out / "train_manifest.csv").is_file()
    assert (out / "test_manifest.csv").is_file()


def test_gen_deterministic(tmp_path):
    cfg = _write(tmp_path, "gen.cfg", GEN_CFG)
    main(["gen", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["gen", "--config", cfg, "--out", str(tmp_path / "b")])
    for f in sorted((tmp_path / "a").rglob("*.csv")):
        twin = tmp_path / "b" / f.relative_to(tmp_path / "a")
        assert f.read_bytes() == twin.read_bytes()


def test_train_and_predict_roundtrip(tmp_path, capsys):
    cfg = _write(tmp_path, "gen.cfg", GEN_CFG)
    out = tmp_path / "data"
    main(["gen", "--config", cfg, "--out", str(out)])
    model = tmp_path / "model.txt"
    rc = main(["train", "--manifest", str(out / "train_manifest.csv"),
               "--out", str(model), "--seed", "3"])
    assert rc == 0 and model.is_file()
    capsys.readouterr()

    rc = main(["predict", "--model", str(model),
               "--input", str(out / "train_manifest.csv")])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("index,label,residual_0")
    assert len(lines) == 1 + 6
    labels = [int(line.split(",")[1]) for line in lines[1:]]
    assert labels == [0, 0, 1, 1, 2, 2]  # training samples go to their own class


def test_predict_single_pointset(tmp_path, capsys):
    cfg = _write(tmp_path, "gen.cfg", GEN_CFG)
    out = tmp_path / "data"
    main(["gen", "--config", cfg, "--out", str(out)])
    model = tmp_path / "model.txt"
    main(["train", "--manifest", str(out / "train_manifest.csv"), "--out", str(model)])
    capsys.readouterr()
    rc = main(["predict", "--model", str(model),
               "--input", str(out / "train" / "class01_sample000.csv")])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2
    row = lines[1].split(",")
    assert row[1] == "1"
    assert len(row) == 2 + 3


def test_predict_missing_model_exit_code(tmp_path, capsys):
    p = _write(tmp_path, "p.csv", "0,0\n1,1\n")
    assert main(["predict", "--model", str(tmp_path / "absent.txt"), "--input", p]) == 3


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.cfg", "nonsense_key = 3\n")
    assert main(["gen", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_infeasible_split_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, "exp.cfg", EXP_CFG + "split_sizes = 50\n")
    assert main(["curve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_curve_command_outputs(tmp_path, capsys):
    cfg = _write(tmp_path, "exp.cfg", EXP_CFG)
    out = tmp_path / "res"
    assert main(["curve", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "results.csv").is_file()
    assert (out / "summary.csv").is_file()
    assert (out / "curve.svg").is_file()
    body = (out / "results.csv").read_text().splitlines()
    assert len(body) == 1 + 2 * 2 * 2  # methods * splits * repeats


def test_curve_rerun_identical_results(tmp_path, capsys):
    cfg = _write(tmp_path, "exp.cfg", EXP_CFG)
    main(["curve", "--config", cfg, "--out", str(tmp_path / "r1")])
    main(["curve", "--config", cfg, "--out", str(tmp_path / "r2")])
    assert (tmp_path / "r1" / "results.csv").read_bytes() == \
        (tmp_path / "r2" / "results.csv").read_bytes()


def test_curve_seed_override_changes_results(tmp_path, capsys):
    cfg = _write(tmp_path, "exp.cfg", EXP_CFG)
    main(["curve", "--config", cfg, "--out", str(tmp_path / "r1")])
    main(["curve", "--config", cfg, "--out", str(tmp_path / "r2"), "--seed", "99"])
    assert (tmp_path / "r1" / "results.csv").read_bytes() != \
        (tmp_path / "r2" / "results.csv").read_bytes()


def test_ood_command_outputs(tmp_path, capsys):
    cfg = _write(tmp_path, "exp.cfg", EXP_CFG)
    out = tmp_path / "ood"
    assert main(["ood", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "ood_results.csv").read_text().splitlines()
    assert lines[0] == "method,split_size,repeat,accuracy_matched,accuracy_ood,drop"
    assert len(lines) == 1 + 2 * 2 * 2
    # drop column populated and finite for every row
    for line in lines[1:]:
        assert np.isfinite(float(line.split(",")[5]))


def test_train_flag_growth_reported(tmp_path, capsys):
    cfg = _write(tmp_path, "gen.cfg", GEN_CFG)
    out = tmp_path / "data"
    main(["gen", "--config", cfg, "--out", str(out)])
    capsys.readouterr()
    main(["train", "--manifest", str(out / "train_manifest.csv"),
          "--out", str(tmp_path / "m_none.txt"), "--flags", "none"])
    none_out = capsys.readouterr().out
    main(["train", "--manifest", str(out / "train_manifest.csv"),
          "--out", str(tmp_path / "m_all.txt"), "--flags", "T,D,S"])
    all_out = capsys.readouterr().out

    def sizes(text):
        return [int(line.split("basis size")[1].split(",")[0]) for line in text.splitlines()
                if "basis size" in line]

    assert all(a >= n for a, n in zip(sizes(all_out), sizes(none_out)))
