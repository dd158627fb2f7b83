"""Command-line driver: one subcommand per experiment.

Every run is reproducible from (config, seed): the report echoes both, data
files are byte-identical across reruns, and figures are rendered without
timestamps.  Exit status: 0 success, 2 invalid configuration, 3 requested a
non-normalizable stationary law (kappa >= 8), 4 clock horizon exceeded,
1 any other error.

A key=value config file can seed the flags (``--config run.cfg``); explicit
flags override the file.  The default output directory is
``$LOEWNERLAB_OUT`` (or ./loewnerlab-out), with one subdirectory per
experiment.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import (HorizonExceededError, NonNormalizableError,
                     ValidationError)
from .experiments import EXPERIMENTS, resolve_config, run_experiment

_EXIT_VALIDATION = 2
_EXIT_NON_NORMALIZABLE = 3
_EXIT_HORIZON = 4

_FLOAT_KEYS = ("kappa", "dt", "du", "horizon", "u_max", "a", "b", "c", "x")
_INT_KEYS = ("paths", "n_index", "seed")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="loewnerlab",
        description="Backward-Loewner / time-change diffusion experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--kappa", type=float, default=None)
        p.add_argument("--paths", type=int, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--du", type=float, default=None)
        p.add_argument("--horizon", type=float, default=None)
        p.add_argument("--u-max", dest="u_max", type=float, default=None)
        p.add_argument("--n-index", dest="n_index", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"),
                       default=None, help="data file format")
        p.add_argument("--config", default=None,
                       help="key=value file supplying defaults for the flags")
        p.add_argument("--no-figures", dest="figures", action="store_false",
                       default=None, help="skip SVG figure rendering")
        if name == "hypergeom-eval":
            for key in ("a", "b", "c", "x"):
                p.add_argument(f"--{key}", type=float, default=None)
    return parser


def _read_config_file(path):
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key in _FLOAT_KEYS:
            values[key] = float(value)
        elif key in _INT_KEYS:
            values[key] = int(value)
        elif key == "out":
            values["out"] = value
        elif key == "format":
            values["fmt"] = value
        elif key == "figures":
            values["figures"] = value.lower() in ("1", "true", "yes")
        else:
            raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def _default_out(experiment):
    base = os.environ.get("LOEWNERLAB_OUT", "loewnerlab-out")
    return str(Path(base) / experiment)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        overrides = {}
        if args.config:
            overrides.update(_read_config_file(args.config))
        for key in (*_FLOAT_KEYS, *_INT_KEYS, "fmt", "figures"):
            value = getattr(args, key, None)
            if value is not None:
                overrides[key] = value
        if args.out is not None:
            overrides["out"] = args.out
        out_dir = overrides.pop("out", None) or _default_out(args.experiment)
        cfg = resolve_config(args.experiment, out_dir=out_dir, **overrides)
        metrics, report_path = run_experiment(cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_VALIDATION
    except NonNormalizableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_NON_NORMALIZABLE
    except HorizonExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_HORIZON

    print(json.dumps({"experiment": cfg.experiment, "metrics": metrics,
                      "report": str(report_path)}, indent=2, sort_keys=True,
                     default=float))
    return 0


if __name__ == "__main__":
    sys.exit(main())
