"""Run reports: JSON summary with config echo, metrics and a file manifest.

Rerunning an experiment with identical config and seed must produce
byte-identical data files; the manifest therefore records a sha256 per file
so determinism can be asserted from the report alone.
"""

import dataclasses
import hashlib
import json
from pathlib import Path

SCHEMA_VERSION = "1"


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _jsonable(value):
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(value).items()}
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        try:
            return value.item()
        except (TypeError, ValueError):
            pass
    if isinstance(value, Path):
        return str(value)
    return value


def write_report(out_dir, experiment, config, metrics, files):
    """Write ``report.json`` into ``out_dir`` and return its path.

    ``files`` are paths relative to (or inside) ``out_dir``; each manifest
    entry carries the file's sha256.
    """
    out_dir = Path(out_dir)
    manifest = []
    for f in files:
        p = Path(f)
        manifest.append({
            "name": p.name,
            "sha256": _sha256(p),
            "bytes": p.stat().st_size,
        })
    body = {
        "experiment": experiment,
        "config": _jsonable(config),
        "metrics": _jsonable(metrics),
        "files": manifest,
        "version": SCHEMA_VERSION,
    }
    path = out_dir / "report.json"
    with open(path, "w", encoding="utf8") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
