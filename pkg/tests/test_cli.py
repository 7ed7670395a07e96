import json
import subprocess
import sys

from gibbscv import PointPattern, RngStream, UNIT_SQUARE, save_pattern
from gibbscv.cli import main

TINY_STUDY = {
    "scenario": "poisson-tiny",
    "model": {"family": "poisson", "alpha": 2.0, "beta": 4.0},
    "grid": {"alpha": [1.0, 2.0, 3.0], "beta": [2.0, 4.0, 6.0]},
    "n_replications": 2,
    "k": 3,
    "p_values": [0.5],
    "weight_schemes": ["p"],
    "losses": ["l1"],
    "dummy_resolution": 8,
    "seed": 0,
}


def _write_pattern(tmp_path, n=40, seed=5):
    coords = RngStream(seed).generator().random((n, 2))
    pattern = PointPattern.from_coords(coords, UNIT_SQUARE)
    path = tmp_path / "pattern.csv"
    save_pattern(pattern, path)
    return path


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert "gibbscv 0.1.0" in capsys.readouterr().out


def test_unknown_flag_is_usage_error(capsys):
    assert main(["study", "--nonsense", "1"]) == 2


def test_missing_seed_is_usage_error(tmp_path, capsys):
    code = main(
        ["study", "--scenario", "poisson", "--out", str(tmp_path / "r.csv")]
    )
    assert code == 2
    assert "--seed" in capsys.readouterr().err


def test_fit_validates_p(tmp_path, capsys):
    path = _write_pattern(tmp_path)
    code = main(
        [
            "fit", "--pattern", str(path), "--family", "strauss",
            "--method", "ppl", "--p", "1.5",
            "--grid", '{"beta": [100], "R": [0.05], "gamma": [0.5]}',
            "--seed", "1",
        ]
    )
    assert code == 2
    assert "--p" in capsys.readouterr().err


def test_fit_json_errors_flag(tmp_path, capsys):
    path = _write_pattern(tmp_path)
    code = main(
        [
            "fit", "--pattern", str(path), "--family", "strauss",
            "--method", "ppl", "--p", "1.5",
            "--grid", '{"beta": [100], "R": [0.05], "gamma": [0.5]}',
            "--seed", "1", "--json-errors",
        ]
    )
    assert code == 2
    payload = json.loads(capsys.readouterr().err.strip())
    assert "--p" in payload["error"]


def test_fit_tf_happy_path(tmp_path, capsys):
    path = _write_pattern(tmp_path)
    code = main(
        [
            "fit", "--pattern", str(path), "--family", "poisson",
            "--method", "tf",
            "--grid", '{"alpha": [3.0, 3.7, 4.4], "beta": [-1.0, 0.0, 1.0]}',
            "--seed", "1",
        ]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["method"] == "tf"
    assert set(payload["theta_hat"]) == {"alpha", "beta"}


def test_fit_ppl_happy_path(tmp_path, capsys):
    path = _write_pattern(tmp_path)
    code = main(
        [
            "fit", "--pattern", str(path), "--family", "poisson",
            "--method", "ppl", "--p", "0.5", "--k", "4",
            "--weight", "p", "--loss", "l1",
            "--grid", '{"alpha": [3.0, 3.7, 4.4], "beta": [-1.0, 0.0, 1.0]}',
            "--seed", "1",
        ]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["method"] == "ppl"
    assert payload["objective"] >= 0.0


def test_study_happy_path_and_determinism(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(TINY_STUDY))
    out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    for out in (out1, out2):
        code = main(
            ["study", "--scenario", str(cfg_path), "--seed", "3",
             "--out", str(out)]
        )
        assert code == 0
    text1, text2 = out1.read_bytes(), out2.read_bytes()
    assert text1 == text2
    header = text1.decode().splitlines()[0]
    assert header == (
        "scenario,parameter,method,p,weight,loss,mse,bias_sq,variance,"
        "n_effective"
    )


def test_study_rejects_bad_scenario(tmp_path, capsys):
    code = main(
        ["study", "--scenario", "nope", "--seed", "1",
         "--out", str(tmp_path / "r.csv")]
    )
    assert code == 2
    assert not (tmp_path / "r.csv").exists()


def test_simulate_deterministic_and_manifest(tmp_path):
    args = [
        "simulate",
        "--model", '{"family": "hardcore", "beta": 100, "R": 0.05}',
        "--n", "2", "--seed", "7",
        "--mcmc-steps", "3000", "--burn-in", "500",
    ]
    d1, d2 = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(d1)]) == 0
    assert main(args + ["--out", str(d2)]) == 0
    for name in ("pattern_000.csv", "pattern_001.csv"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
    manifest = json.loads((d1 / "manifest.json").read_text())
    assert manifest["n"] == 2 and len(manifest["files"]) == 2


def test_simulate_validates_model(tmp_path, capsys):
    code = main(
        ["simulate", "--model", '{"family": "nope"}', "--n", "1",
         "--seed", "1", "--out", str(tmp_path / "x")]
    )
    assert code == 2
    assert "--model" in capsys.readouterr().err


def test_gnz_check_validates_reps(capsys):
    assert main(["gnz-check", "--scenario", "poisson", "--reps", "10",
                 "--seed", "1"]) == 2


def test_tf_limit_happy_path(tmp_path):
    out = tmp_path / "lim.csv"
    code = main(
        ["tf-limit", "--scenario", "poisson", "--k-list", "4,9",
         "--mode", "mc", "--reps", "2", "--seed", "2", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "k,median_abs_deviation"
    assert len(lines) == 3


def test_console_script_installed():
    result = subprocess.run(
        [sys.executable, "-m", "gibbscv.cli", "--version"],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "gibbscv" in result.stdout
