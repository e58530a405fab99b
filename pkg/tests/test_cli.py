import json

import pytest

from syzlab.cli import main

CUSTOM = {
    "family": "custom",
    "field": "F5",
    "params": {
        "name": "qci-2-2-q2",
        "alphabet": ["x", "y"],
        "rules": [["yx", "3*xy"], ["x^2", "0"], ["y^2", "0"]],
        "dimension": 4,
        "x": "x",
        "y": "y",
        "sigma": ["x", "0"],
        "psi": ["-2*y", "x"],
        "theta": ["0", "y"],
    },
    "max_degree": 4,
    "checks": {"assoc_samples": 10},
}


def run(args, tmp_path, name="out"):
    out = tmp_path / name
    code = main(list(args) + ["--out", str(out)])
    return code, out


def test_verify_qci(tmp_path, capsys):
    code, out = run(["verify", "--family", "qci", "-n", "2", "-m", "3", "-q", "2", "--field", "F5"], tmp_path)
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] and report["n_failed"] == 0
    assert report["data"]["relation conditions"]["dim_Omega2"] == 7
    assert "PASS" in capsys.readouterr().out


def test_resolve_writes_differentials(tmp_path):
    code, out = run(["resolve", "--family", "a5", "-p", "3", "--beta", "2", "--max-degree", "3"], tmp_path)
    assert code == 0
    assert sorted(p.name for p in out.glob("d_*.tsv")) == ["d_1.tsv", "d_2.tsv", "d_3.tsv"]
    assert (out / "d_2.tsv").read_text().startswith("row\tcol\tentry")


def test_ext_outputs(tmp_path):
    code, out = run(["ext", "--family", "qci", "-n", "2", "-m", "2", "-q", "-1", "--field", "Q",
                     "--max-degree", "4", "--assoc-samples", "10"], tmp_path)
    assert code == 0
    fingen = json.loads((out / "fingen.json").read_text())
    assert fingen["passed"]
    assert (out / "products_2_2.json").exists() and (out / "products_0_4.tsv").exists()
    assert not (out / "products_3_2.tsv").exists()


def test_reports_are_reproducible(tmp_path):
    args = ["ext", "--family", "qci", "-n", "2", "-m", "3", "-q", "2", "--field", "F3", "--max-degree", "4",
            "--assoc-samples", "15", "--seed", "7"]
    _, a = run(args, tmp_path, "a")
    _, b = run(args, tmp_path, "b")
    for f in sorted(a.iterdir()):
        if f.name != "timing.json":
            assert f.read_bytes() == (b / f.name).read_bytes(), f.name


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "qci", "field": "F3", "params": {"n": 2, "m": 2, "q": 1},
                               "max_degree": 3}))
    code, out = run(["resolve", "--config", str(cfg), "-n", "3"], tmp_path)
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["family"]["params"]["n"] == 3
    assert report["config"]["max_degree"] == 3


def test_custom_family_solves_rho(tmp_path):
    cfg = tmp_path / "custom.json"
    cfg.write_text(json.dumps(CUSTOM))
    code, out = run(["ext", "--config", str(cfg)], tmp_path)
    assert code == 0
    code, out = run(["verify", "--config", str(cfg)], tmp_path, "v")
    report = json.loads((out / "report.json").read_text())
    assert code == 0 and report["data"]["seed"]["c"] is not None


def test_failing_seed_exits_one(tmp_path):
    bad = dict(CUSTOM, params=dict(CUSTOM["params"], theta=["-2*y", "x"], rho=["0", "0", "0", "0"]))
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(bad))
    code, out = run(["verify", "--config", str(cfg)], tmp_path)
    assert code == 1
    report = json.loads((out / "report.json").read_text())
    assert report["n_failed"] > 0


@pytest.mark.parametrize("args", [
    ["verify", "--family", "a5", "-p", "3", "--beta", "0"],
    ["verify", "--family", "a5", "-p", "3", "--beta", "1", "--field", "F5"],
    ["verify", "--family", "qci", "-n", "1", "-m", "2", "-q", "1", "--field", "F2"],
    ["verify", "--family", "qci", "-n", "2", "-m", "2", "-q", "3", "--field", "F3"],
    ["verify", "--family", "qci", "-n", "2", "-m", "2", "-q", "1", "--field", "F4"],
    ["verify", "--family", "qci", "-n", "2", "-m", "2", "-q", "1"],
    ["resolve", "--family", "qci", "-n", "2", "-m", "2", "-q", "1", "--field", "F2", "--max-degree", "0"],
    ["binomial-check", "-p", "4"],
])
def test_invalid_configs_exit_two(tmp_path, args, capsys):
    code, _ = run(args, tmp_path)
    assert code == 2
    assert "CONFIG_INVALID" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    code, _ = run(["verify", "--config", str(tmp_path / "nope.json")], tmp_path)
    assert code == 2


def test_binomial_check(tmp_path):
    code, out = run(["binomial-check", "-p", "3", "5", "7"], tmp_path)
    assert code == 0
    assert json.loads((out / "report.json").read_text())["passed"]
