"""CLI surface: subcommands, exit codes, artifacts."""

import json

import numpy as np

from algphase.cli import main
from algphase.serialize import dump_instance, load_instance
from algphase.model import (
    Mode,
    ProjectorSpec,
    forward_measure,
    make_ensemble,
    sample_signal,
)


def test_simulate_then_invert(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    assert main(["simulate", "--n", "3", "--k", "4", "--seed", "7",
                 "--out", str(inst)]) == 0
    report_path = tmp_path / "report.json"
    assert main(["invert", "--in", str(inst), "--out", str(report_path)]) == 0
    report = json.loads(report_path.read_text())
    assert report["solver"] == "ideal-regression"
    assert report["success"] is True
    assert report["rel_error"] <= 1e-8


def test_invert_lifted(tmp_path):
    inst = tmp_path / "inst.json"
    main(["simulate", "--n", "3", "--k", "6", "--seed", "1", "--out", str(inst)])
    out = tmp_path / "rep.json"
    assert main(["invert", "--in", str(inst), "--solver", "lifted-ls",
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["success"] is True


def test_invert_not_identifiable_exit_code(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    main(["simulate", "--n", "3", "--k", "3", "--seed", "2", "--out", str(inst)])
    assert main(["invert", "--in", str(inst)]) == 2


def test_invert_non_generic_exit_code(tmp_path):
    # an observation with an exact zero cannot be normalized
    rng = np.random.default_rng(3)
    z = sample_signal(3, Mode.REAL, rng)
    E = make_ensemble(ProjectorSpec(n=3, rank=1), 4, rng)
    obs = forward_measure(z, E)
    from algphase.model import Observation
    bad = Observation(b=np.where(np.arange(4) == 0, 0.0, obs.b))
    inst = tmp_path / "bad.json"
    dump_instance(inst, E, bad, z)
    assert main(["invert", "--in", str(inst)]) == 3


def test_certify(tmp_path):
    inst = tmp_path / "inst.json"
    main(["simulate", "--n", "3", "--k", "4", "--seed", "4", "--out", str(inst)])
    out = tmp_path / "cert.json"
    assert main(["certify", "--in", str(inst), "--out", str(out)]) == 0
    cert = json.loads(out.read_text())
    assert cert["census_size"] == 1
    assert cert["unique"] is True
    assert cert["jacobian"]["rank"] == 3


def test_threshold_outputs(tmp_path):
    out = tmp_path / "thr"
    assert main(["threshold", "--n", "2", "--k-min", "2", "--k-max", "4",
                 "--trials", "10", "--seed", "5", "--out", str(out)]) == 0
    data = json.loads((out / "threshold.json").read_text())
    assert data["lambda_hat"] == 3
    csv_lines = (out / "threshold.csv").read_text().strip().split("\n")
    assert csv_lines[0] == "k,frequency"
    assert len(csv_lines) == 4


def test_experiment_and_plot(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "n": 3, "k_range": [4, 6], "trials": 3, "sigmas": [0.0, 1e-4],
        "solvers": ["ideal-regression"], "seed": 11,
    }))
    out = tmp_path / "run"
    assert main(["experiment", "--config", str(cfg), "--out", str(out)]) == 0
    csv_path = out / "results.csv"
    assert csv_path.exists()
    summary = json.loads((out / "summary.json").read_text())
    assert len(summary["cells"]) == 4
    plot_dir = tmp_path / "plots"
    assert main(["plot", "--csv", str(csv_path), "--out", str(plot_dir)]) == 0
    assert (plot_dir / "recovery_rate.svg").exists()
    assert (plot_dir / "error_sigma_0.svg").exists()
    assert (plot_dir / "error_sigma_1e-04.svg").exists()


def test_experiment_override_and_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "k_range": [4], "trials": 2, "seed": 1}))
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["experiment", "--config", str(cfg), "--out", str(out1), "--seed", "42"])
    main(["experiment", "--config", str(cfg), "--out", str(out2), "--seed", "42"])
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()


def test_simulate_complex_instance_roundtrip(tmp_path):
    inst = tmp_path / "c.json"
    assert main(["simulate", "--n", "2", "--k", "4", "--mode", "complex_split",
                 "--seed", "6", "--out", str(inst)]) == 0
    ensemble, obs, signal = load_instance(inst)
    assert ensemble.mode is Mode.COMPLEX_SPLIT
    assert obs.k == 4 and signal is not None
    out = tmp_path / "cert.json"
    assert main(["certify", "--in", str(inst), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["census_size"] == 1
