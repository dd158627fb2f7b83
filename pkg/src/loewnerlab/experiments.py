"""Named, seed-deterministic experiment runs behind the CLI.

Every experiment writes delimited data files (CSV by default, JSON on
request), optional SVG figures, and a ``report.json`` with the config echo,
summary metrics and a sha256 manifest; reruns with identical config and seed
produce byte-identical data files.  On failure all files created by the run
are removed.
"""

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import plots
from .diffusion import DiffusionSpec, ergodic_average, export_diffusion_csv, simulate_T
from .ensembles import diffusion_terminal, flow_hits, flow_invariant_scan, flow_terminal
from .errors import ValidationError
from .flow import as_kappa, export_flow_csv, simulate_flow
from .report import write_report
from .special import hyp2f1
from .stats import histogram, ks_one_sample, ks_two_sample
from .stationary import (StationaryLaw, argument_cdf, argument_pdf, phase_scan,
                         tail_exponent)
from .timechange import export_timechange_csv, schedule_a, u_tilde

__all__ = ["EXPERIMENTS", "ExperimentConfig", "resolve_config", "run_experiment"]

EXPERIMENTS = ("flow", "diffusion", "stationary-curves", "ergodic", "embed",
               "equivalence", "phase-scan", "scaling", "conjecture",
               "hypergeom-eval")

_PHASE_GRID = tuple(float(k) for k in range(1, 11))
_CONJECTURE_S = (10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved run configuration; every field is validated up front."""

    experiment: str
    kappa: float = 4.0
    paths: int = 1000
    dt: float = 1e-3
    du: float = 1e-3
    horizon: float = 10.0
    u_max: float = 10.0
    n_index: int = 50
    seed: int = 0
    out_dir: str = "loewnerlab-out"
    fmt: str = "csv"
    figures: bool = True
    # hypergeom-eval point (unused elsewhere)
    a: float | None = None
    b: float | None = None
    c: float | None = None
    x: float | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(f"unknown experiment {self.experiment!r}")
        if self.fmt not in ("csv", "json"):
            raise ValidationError(f"format must be csv or json, got {self.fmt!r}")
        if int(self.paths) != self.paths or self.paths < 1:
            raise ValidationError("paths must be a positive integer")
        if int(self.n_index) != self.n_index or self.n_index < 1:
            raise ValidationError("n-index must be a positive integer")
        for name in ("kappa", "dt", "du", "horizon", "u_max"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0.0):
                raise ValidationError(f"{name} must be positive and finite, got {v!r}")


# per-experiment defaults layered over the dataclass defaults
_DEFAULTS = {
    "diffusion": {"paths": 2000, "u_max": 20.0},
    "ergodic": {"paths": 1, "u_max": 10_000.0},
    "embed": {"paths": 10_000},
    "equivalence": {"paths": 2000, "dt": 1e-4, "du": 1e-4, "u_max": 10.0},
    "scaling": {"paths": 5000, "horizon": 4.0},
    "conjecture": {"paths": 2000, "horizon": 1000.0, "dt": 2e-3},
}


def resolve_config(experiment, **overrides):
    """Apply per-experiment defaults, then explicit overrides."""
    merged = dict(_DEFAULTS.get(experiment, {}))
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(experiment=experiment, **merged)


def _write_table(path, header, columns, fmt):
    """Write named columns as CSV or as a JSON list of row objects."""
    columns = [np.asarray(c) for c in columns]
    if fmt == "csv":
        with open(path, "w", encoding="utf8") as fh:
            fh.write(",".join(header) + "\n")
            np.savetxt(fh, np.column_stack(columns), fmt="%.17g", delimiter=",")
    else:
        rows = [
            {h: (v.item() if hasattr(v, "item") else v)
             for h, v in zip(header, row)}
            for row in zip(*columns)
        ]
        with open(path, "w", encoding="utf8") as fh:
            json.dump(rows, fh, indent=1)
            fh.write("\n")
    return path


def _data_name(stem, fmt):
    return f"{stem}.{'csv' if fmt == 'csv' else 'json'}"


def _run_flow(cfg, out):
    scan = flow_invariant_scan(cfg.kappa, cfg.horizon, cfg.dt, cfg.paths, cfg.seed)
    term = flow_terminal(cfg.kappa, cfg.horizon, cfg.dt, cfg.paths, cfg.seed)
    files = []
    first = simulate_flow(cfg.kappa, cfg.horizon, cfg.dt, cfg.seed, path_index=0)
    csv_path = out / "path0.csv"
    sidecar = export_flow_csv(first, csv_path)
    files += [csv_path, Path(sidecar)]
    clock_path = out / "clock0.csv"
    export_timechange_csv(u_tilde(first), clock_path)
    files.append(clock_path)
    files.append(_write_table(
        out / _data_name("terminal", cfg.fmt),
        ["path_id", "t", "x", "y", "u"],
        [np.arange(cfg.paths), term.t, term.x, term.y, term.u], cfg.fmt))
    if cfg.figures:
        files.append(plots.flow_trajectory(first, out / "path0.svg"))
    metrics = {
        "y_monotone_violations": scan.y_monotone_violations,
        "max_y2_excess_discrete": scan.max_y2_excess_discrete,
        "max_y2_excess_continuum": scan.max_y2_excess_continuum,
        "max_u_over_t": scan.max_u_over_t,
        "max_u_lower_deficit": scan.max_u_lower_deficit,
        "min_y": scan.min_y,
    }
    return metrics, files


def _run_diffusion(cfg, out):
    T = diffusion_terminal(cfg.kappa, cfg.u_max, cfg.du, cfg.paths, cfg.seed)
    files = [_write_table(out / _data_name("terminal", cfg.fmt),
                          ["path_id", "T_final"],
                          [np.arange(cfg.paths), T], cfg.fmt)]
    first = simulate_T(DiffusionSpec(kappa=cfg.kappa, du=cfg.du,
                                     u_max=min(cfg.u_max, 50.0), seed=cfg.seed))
    path_csv = out / "path0.csv"
    export_diffusion_csv(first, path_csv)
    files.append(path_csv)
    metrics = {"mean": float(np.mean(T)), "std": float(np.std(T)),
               "paths": cfg.paths, "u_max": cfg.u_max}
    kappa = as_kappa(cfg.kappa)
    if kappa.subcritical:
        law = StationaryLaw(kappa)
        metrics["ks_vs_stationary"] = ks_one_sample(T, law.cdf)
        lo, hi = (float(q) for q in np.quantile(T, [0.005, 0.995]))
        centers, dens = histogram(T, lo, hi, 60)
        files.append(_write_table(out / _data_name("histogram", cfg.fmt),
                                  ["center", "density"], [centers, dens],
                                  cfg.fmt))
        if cfg.figures:
            grid = np.linspace(lo, hi, 400)
            files.append(plots.density_overlay(
                centers, dens, grid, law.pdf(grid), out / "terminal.svg",
                title=f"T at u={cfg.u_max:g}, kappa={kappa.value:g}"))
    return metrics, files


def _run_stationary_curves(cfg, out):
    law = StationaryLaw(cfg.kappa)
    hi = max(law.ppf(0.995) * 1.5, 1.0)
    grid = np.linspace(-hi, hi, 513)
    pdf_vals = law.pdf(grid)
    cdf_vals = law.cdf(grid)
    theta = np.linspace(0.0, math.pi, 513)[1:-1]
    arg_vals = argument_pdf(theta, cfg.kappa)
    files = [
        _write_table(out / _data_name("curve", cfg.fmt), ["T", "pdf", "cdf"],
                     [grid, pdf_vals, cdf_vals], cfg.fmt),
        _write_table(out / _data_name("argument", cfg.fmt),
                     ["theta", "argument_pdf"], [theta, arg_vals], cfg.fmt),
    ]
    if cfg.figures:
        files.append(plots.stationary_curves(grid, pdf_vals, cdf_vals,
                                             law.kappa.value, out / "curve.svg"))
        files.append(plots.argument_curve(theta, arg_vals, law.kappa.value,
                                          out / "argument.svg"))
    metrics = {"C": law.C, "m": law.m, "tail_exponent": tail_exponent(cfg.kappa)}
    return metrics, files


def _run_ergodic(cfg, out):
    law = StationaryLaw(cfg.kappa)
    spec = DiffusionSpec(kappa=cfg.kappa, du=cfg.du, u_max=cfg.u_max, seed=cfg.seed)
    path = simulate_T(spec)
    inside = (np.abs(path.T) <= 1.0).astype(float)
    target = float(law.cdf(1.0) - law.cdf(-1.0))
    z_final = ergodic_average(path, lambda T: np.abs(T) <= 1.0)

    # running average at log-spaced checkpoints
    n = len(path)
    idx = np.unique(np.geomspace(8, n - 1, 400).astype(int))
    cums = np.concatenate([[0.0], np.cumsum(0.5 * (inside[1:] + inside[:-1]) * cfg.du)])
    u_ck = idx * cfg.du
    z_ck = cums[idx] / u_ck
    files = [_write_table(out / _data_name("running", cfg.fmt), ["u", "Z"],
                          [u_ck, z_ck], cfg.fmt)]
    if cfg.figures:
        files.append(plots.running_average(
            u_ck, z_ck, target, out / "running.svg",
            title=f"ergodic average of 1{{|T|<=1}}, kappa={cfg.kappa:g}"))
    metrics = {"Z_final": z_final, "stationary_value": target,
               "abs_error": abs(z_final - target), "u_max": cfg.u_max}
    return metrics, files


def _run_embed(cfg, out):
    a_n = schedule_a(cfg.kappa, cfg.n_index)
    hits = flow_hits(cfg.kappa, cfg.paths, cfg.seed, dt=cfg.dt,
                     target_u=a_n, adaptive=True)
    theta = hits.theta
    ks_arg = ks_one_sample(theta, lambda th: argument_cdf(th, cfg.kappa))
    ks_uniform = ks_one_sample(theta, lambda th: np.asarray(th) / math.pi)
    files = [_write_table(out / _data_name("theta", cfg.fmt),
                          ["path_id", "theta", "t_hit"],
                          [np.arange(cfg.paths), theta, hits.t], cfg.fmt)]
    if cfg.figures:
        centers, dens = histogram(theta, 0.0, math.pi, 40)
        grid = np.linspace(0.0, math.pi, 402)[1:-1]
        files.append(plots.density_overlay(
            centers, dens, grid, argument_pdf(grid, cfg.kappa),
            out / "theta.svg",
            title=f"argument at hitting time of a_{cfg.n_index}, kappa={cfg.kappa:g}",
            sample_label="theta sample"))
    metrics = {"a_n": a_n, "n_index": cfg.n_index,
               "ks_vs_argument_law": ks_arg, "ks_vs_uniform": ks_uniform,
               "median_hit_time": float(np.median(hits.t)),
               "max_hit_time": float(np.max(hits.t))}
    return metrics, files


def _run_equivalence(cfg, out):
    kappa = as_kappa(cfg.kappa)
    hits = flow_hits(kappa, cfg.paths, cfg.seed, dt=cfg.dt,
                     target_u=cfg.u_max, adaptive=True)
    extracted = hits.cot_arg / kappa.sqrt
    direct = diffusion_terminal(kappa, cfg.u_max, cfg.du, cfg.paths,
                                cfg.seed + 1)
    ks = ks_two_sample(extracted, direct)
    files = [_write_table(out / _data_name("samples", cfg.fmt),
                          ["path_id", "T_extracted", "T_direct"],
                          [np.arange(cfg.paths), extracted, direct], cfg.fmt)]
    if cfg.figures:
        files.append(plots.ecdf_overlay(
            [extracted, direct], ["extracted from flow", "direct SDE"],
            out / "equivalence.svg",
            title=f"T at u={cfg.u_max:g}, kappa={kappa.value:g}: two routes"))
    metrics = {"ks_two_sample": ks, "u": cfg.u_max, "paths": cfg.paths,
               "median_hit_time": float(np.median(hits.t))}
    return metrics, files


def _run_phase_scan(cfg, out):
    rows = phase_scan(_PHASE_GRID)
    files = [_write_table(
        out / _data_name("phase", cfg.fmt),
        ["kappa", "exponent", "normalizable", "C_inverse"],
        [[r.kappa for r in rows], [r.exponent for r in rows],
         [int(r.normalizable) for r in rows],
         [r.C_inverse if r.C_inverse is not None else math.nan for r in rows]],
        cfg.fmt)]
    if cfg.figures:
        files.append(plots.phase_diagram(
            [r.kappa for r in rows], [r.C_inverse for r in rows],
            out / "phase.svg"))
    metrics = {
        "non_normalizable_kappas": [r.kappa for r in rows if not r.normalizable],
        "first_non_normalizable": min((r.kappa for r in rows if not r.normalizable),
                                      default=None),
    }
    return metrics, files


def _run_scaling(cfg, out):
    """Scaling identity: (h_t(i) - sqrt(k) B_t)/sqrt(t) ~ h_1(i/sqrt(t)) - sqrt(k) B_1.

    x/y is scale-free, so the cotangent of the argument at time t from i is
    compared against the one at time 1 started from i/sqrt(t).
    """
    t_long = cfg.horizon
    long_run = flow_terminal(cfg.kappa, t_long, cfg.dt, cfg.paths, cfg.seed)
    short_run = flow_terminal(cfg.kappa, 1.0, cfg.dt, cfg.paths, cfg.seed + 1,
                              y0=1.0 / math.sqrt(t_long))
    ks = ks_two_sample(long_run.cot_arg, short_run.cot_arg)
    files = [_write_table(out / _data_name("samples", cfg.fmt),
                          ["path_id", "cot_long", "cot_short"],
                          [np.arange(cfg.paths), long_run.cot_arg,
                           short_run.cot_arg], cfg.fmt)]
    if cfg.figures:
        files.append(plots.ecdf_overlay(
            [long_run.cot_arg, short_run.cot_arg],
            [f"x/y at t={t_long:g} from i",
             f"x/y at t=1 from i/{math.sqrt(t_long):g}"],
            out / "scaling.svg", title="scaling identity of the shifted maps"))
    metrics = {"ks_two_sample": ks, "t_long": t_long, "paths": cfg.paths}
    return metrics, files


def _run_conjecture(cfg, out):
    kappa = as_kappa(cfg.kappa)
    law = StationaryLaw(kappa)
    S_values = [s for s in _CONJECTURE_S if s <= cfg.horizon] or [cfg.horizon]
    ks_values = []
    for i, S in enumerate(S_values):
        hits = flow_hits(kappa, cfg.paths, cfg.seed + i, dt=cfg.dt,
                         target_t=S, adaptive=True)
        ks_values.append(ks_one_sample(hits.cot_arg / kappa.sqrt, law.cdf))
    files = [_write_table(out / _data_name("conjecture", cfg.fmt),
                          ["S", "ks_distance", "paths"],
                          [S_values, ks_values,
                           [cfg.paths] * len(S_values)], cfg.fmt)]
    if cfg.figures:
        files.append(plots.ks_vs_horizon(
            S_values, ks_values, out / "conjecture.svg",
            title=f"cot(arg z_S)/sqrt(kappa) vs stationary law, kappa={kappa.value:g}"))
    metrics = {"S_values": S_values, "ks_values": ks_values,
               "nonincreasing": bool(all(b <= a * (1 + 1e-9) for a, b in
                                         zip(ks_values, ks_values[1:])))}
    return metrics, files


def _run_hypergeom_eval(cfg, out):
    if None in (cfg.a, cfg.b, cfg.c, cfg.x):
        raise ValidationError("hypergeom-eval needs --a --b --c --x")
    res = hyp2f1(cfg.a, cfg.b, cfg.c, cfg.x)
    body = {"a": res.a, "b": res.b, "c": res.c, "x": res.x,
            "branch": res.branch, "value": res.value}
    path = out / "eval.json"
    with open(path, "w", encoding="utf8") as fh:
        json.dump(body, fh, indent=2)
        fh.write("\n")
    return dict(body), [path]


_RUNNERS = {
    "flow": _run_flow,
    "diffusion": _run_diffusion,
    "stationary-curves": _run_stationary_curves,
    "ergodic": _run_ergodic,
    "embed": _run_embed,
    "equivalence": _run_equivalence,
    "phase-scan": _run_phase_scan,
    "scaling": _run_scaling,
    "conjecture": _run_conjecture,
    "hypergeom-eval": _run_hypergeom_eval,
}


def run_experiment(cfg):
    """Execute one experiment; returns (metrics, report_path).

    Creates ``cfg.out_dir`` if needed.  If the run fails, every file it
    created is removed before the exception propagates.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    try:
        metrics, files = _RUNNERS[cfg.experiment](cfg, out)
        report_path = write_report(out, cfg.experiment, cfg, metrics, files)
    except BaseException:
        for f in files:
            try:
                os.unlink(f)
            except OSError:
                pass
        raise
    return metrics, report_path
