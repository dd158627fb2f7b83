import json
import math
from pathlib import Path

import numpy as np
import pytest

from loewnerlab.cli import main
from loewnerlab.diffusion import DiffusionSpec, export_diffusion_csv, simulate_T
from loewnerlab.errors import ValidationError
from loewnerlab.experiments import resolve_config, run_experiment
from loewnerlab.flow import simulate_flow
from loewnerlab.timechange import export_timechange_csv, u_tilde


def _cfg(experiment, tmp_path, **kw):
    kw.setdefault("seed", 5)
    return resolve_config(experiment, out_dir=str(tmp_path / experiment), **kw)


def _report(cfg):
    return json.loads((Path(cfg.out_dir) / "report.json").read_text())


def test_flow_experiment_files_and_schema(tmp_path):
    cfg = _cfg("flow", tmp_path, paths=8, horizon=0.5, dt=1e-3)
    metrics, _ = run_experiment(cfg)
    out = Path(cfg.out_dir)
    assert (out / "path0.csv").read_text().splitlines()[0] == "t,x,y"
    sidecar = json.loads((out / "path0.json").read_text())
    assert sidecar == {"kappa": 4.0, "dt": 1e-3, "seed": 5, "horizon": 0.5}
    assert (out / "terminal.csv").read_text().splitlines()[0] == "path_id,t,x,y,u"
    assert (out / "clock0.csv").read_text().splitlines()[0] == "t,u"
    assert metrics["y_monotone_violations"] == 0
    rep = _report(cfg)
    assert rep["version"] == "1"
    assert {f["name"] for f in rep["files"]} >= {"path0.csv", "terminal.csv"}


def test_diffusion_experiment_schema_and_histogram(tmp_path):
    cfg = _cfg("diffusion", tmp_path, paths=300, u_max=2.0, du=1e-2)
    metrics, _ = run_experiment(cfg)
    out = Path(cfg.out_dir)
    assert (out / "terminal.csv").read_text().splitlines()[0] == "path_id,T_final"
    assert (out / "histogram.csv").read_text().splitlines()[0] == "center,density"
    assert (out / "path0.csv").read_text().splitlines()[0] == "u,T"
    assert 0.0 <= metrics["ks_vs_stationary"] <= 1.0


def test_stationary_curves_schema(tmp_path):
    cfg = _cfg("stationary-curves", tmp_path, kappa=3.0)
    run_experiment(cfg)
    out = Path(cfg.out_dir)
    curve = np.loadtxt(out / "curve.csv", delimiter=",", skiprows=1)
    assert (out / "curve.csv").read_text().splitlines()[0] == "T,pdf,cdf"
    # unimodal even density, increasing cdf
    pdfs = curve[:, 1]
    assert pdfs[len(pdfs) // 2] == pytest.approx(np.max(pdfs))
    assert np.all(np.diff(curve[:, 2]) >= 0.0)
    assert (out / "argument.csv").read_text().splitlines()[0] == "theta,argument_pdf"


def test_argument_curve_shape_across_kappa(tmp_path):
    lo = _cfg("stationary-curves", tmp_path / "a", kappa=2.3)
    run_experiment(lo)
    arg = np.loadtxt(Path(lo.out_dir) / "argument.csv", delimiter=",", skiprows=1)
    mid = len(arg) // 2
    assert arg[mid, 1] == pytest.approx(np.max(arg[:, 1]))  # concave: mode at pi/2
    hi = _cfg("stationary-curves", tmp_path / "b", kappa=4.5)
    run_experiment(hi)
    arg = np.loadtxt(Path(hi.out_dir) / "argument.csv", delimiter=",", skiprows=1)
    assert arg[mid, 1] == pytest.approx(np.min(arg[:, 1]))  # convex: antimode


def test_embed_and_equivalence_smoke(tmp_path):
    cfg = _cfg("embed", tmp_path, paths=200, n_index=3, dt=5e-3)
    metrics, _ = run_experiment(cfg)
    assert metrics["a_n"] == pytest.approx(math.log(4.0))
    assert 0.0 <= metrics["ks_vs_uniform"] <= 1.0

    cfg = _cfg("equivalence", tmp_path, paths=150, u_max=1.0, dt=1e-3, du=1e-3)
    metrics, _ = run_experiment(cfg)
    assert 0.0 <= metrics["ks_two_sample"] <= 1.0
    out = Path(cfg.out_dir)
    header = (out / "samples.csv").read_text().splitlines()[0]
    assert header == "path_id,T_extracted,T_direct"


def test_phase_scan_flags(tmp_path):
    cfg = _cfg("phase-scan", tmp_path)
    metrics, _ = run_experiment(cfg)
    assert metrics["non_normalizable_kappas"] == [8.0, 9.0, 10.0]
    rows = np.loadtxt(Path(cfg.out_dir) / "phase.csv", delimiter=",", skiprows=1)
    flags = rows[:, 2].astype(bool)
    assert np.array_equal(flags, rows[:, 0] < 8.0)


def test_conjecture_reports_only(tmp_path):
    cfg = _cfg("conjecture", tmp_path, paths=100, horizon=10.0, dt=5e-3, kappa=2.0)
    metrics, _ = run_experiment(cfg)
    assert metrics["S_values"] == [10.0]
    assert len(metrics["ks_values"]) == 1


def test_json_format_output(tmp_path):
    cfg = _cfg("diffusion", tmp_path, paths=50, u_max=0.5, du=1e-2, fmt="json")
    run_experiment(cfg)
    rows = json.loads((Path(cfg.out_dir) / "terminal.json").read_text())
    assert isinstance(rows, list) and set(rows[0]) == {"path_id", "T_final"}


def test_rerun_is_byte_identical(tmp_path):
    cfg1 = _cfg("embed", tmp_path / "r1", paths=64, n_index=2, dt=5e-3, seed=9)
    cfg2 = _cfg("embed", tmp_path / "r2", paths=64, n_index=2, dt=5e-3, seed=9)
    run_experiment(cfg1)
    run_experiment(cfg2)
    for name in ("theta.csv", "theta.svg"):
        b1 = (Path(cfg1.out_dir) / name).read_bytes()
        b2 = (Path(cfg2.out_dir) / name).read_bytes()
        assert b1 == b2, name
    r1 = json.loads((Path(cfg1.out_dir) / "report.json").read_text())
    r2 = json.loads((Path(cfg2.out_dir) / "report.json").read_text())
    assert [f["sha256"] for f in r1["files"]] == [f["sha256"] for f in r2["files"]]


def test_partial_outputs_removed_on_failure(tmp_path, monkeypatch):
    cfg = _cfg("phase-scan", tmp_path)
    import loewnerlab.experiments as exp

    def boom(*a, **kw):
        raise RuntimeError("disk full")

    monkeypatch.setattr(exp, "write_report", boom)
    with pytest.raises(RuntimeError):
        run_experiment(cfg)
    leftovers = list(Path(cfg.out_dir).glob("*"))
    assert leftovers == []


def test_no_figures_flag(tmp_path):
    cfg = _cfg("stationary-curves", tmp_path, figures=False)
    run_experiment(cfg)
    assert not list(Path(cfg.out_dir).glob("*.svg"))


def test_validation_errors(tmp_path):
    with pytest.raises(ValidationError):
        resolve_config("nonsense")
    with pytest.raises(ValidationError):
        _cfg("flow", tmp_path, paths=-3)
    with pytest.raises(ValidationError):
        _cfg("flow", tmp_path, dt=0.0)
    with pytest.raises(ValidationError):
        _cfg("flow", tmp_path, fmt="xml")


def test_cli_exit_codes_and_report(tmp_path, capsys):
    out = tmp_path / "cli"
    rc = main(["phase-scan", "--out", str(out), "--no-figures"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["experiment"] == "phase-scan"
    assert Path(payload["report"]).exists()

    assert main(["stationary-curves", "--kappa", "9", "--out", str(tmp_path / "x")]) == 3
    assert main(["flow", "--dt", "-1", "--out", str(tmp_path / "y")]) == 2
    assert main(["hypergeom-eval", "--out", str(tmp_path / "z")]) == 2


def test_cli_config_file_and_flag_precedence(tmp_path, capsys):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("kappa = 2.0\npaths = 40\nseed = 11  # comment\n")
    out = tmp_path / "emb"
    rc = main(["embed", "--config", str(cfgfile), "--paths", "30",
               "--n-index", "2", "--dt", "5e-3", "--out", str(out),
               "--no-figures"])
    assert rc == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["config"]["kappa"] == 2.0   # from file
    assert rep["config"]["paths"] == 30    # flag wins
    assert rep["config"]["seed"] == 11
    capsys.readouterr()


def test_cli_env_default_outdir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LOEWNERLAB_OUT", str(tmp_path / "envout"))
    rc = main(["hypergeom-eval", "--a", "0.5", "--b", "-1", "--c", "1.5",
               "--x", "-4"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["metrics"]["value"] == pytest.approx(7.0 / 3.0)
    assert payload["metrics"]["branch"] == "terminating"
    assert (tmp_path / "envout" / "hypergeom-eval" / "eval.json").exists()


def test_export_helpers_headers(tmp_path):
    path = simulate_flow(4.0, 0.2, 1e-2, seed=2)
    tmap = u_tilde(path)
    export_timechange_csv(tmap, tmp_path / "tc.csv")
    assert (tmp_path / "tc.csv").read_text().splitlines()[0] == "t,u"
    dpath = simulate_T(DiffusionSpec(kappa=4.0, du=1e-2, u_max=0.2, seed=2))
    export_diffusion_csv(dpath, tmp_path / "d.csv")
    assert (tmp_path / "d.csv").read_text().splitlines()[0] == "u,T"
