"""Run configuration, schema-validated JSON reports and CSV curve files."""

import csv
import json
import os
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Optional

import jsonschema
import numpy as np

SCHEMA_VERSION = "1.0"


@dataclass
class RunConfig:
    command: str
    spec: Optional[str] = None
    f_spec: Optional[str] = None
    preset: Optional[str] = None
    out: Optional[str] = None
    seed: int = 0
    paths: int = 100_000
    decades: int = 12
    tmin: float = 1e-12
    tmax: float = 1.0
    band: float = 10.0
    threads: int = 1


def load_schema():
    text = resources.files("orlicz_lab").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def jsonable(x):
    """Plain JSON types; non-finite floats become the strings "inf", "-inf", "nan"."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if np.isfinite(v) else str(v)
    return x


def build_report(config, results, status="ok", checks=None, diagnostics=None, files=None):
    from . import __version__
    doc = {
        "schema_version": SCHEMA_VERSION,
        "library_version": __version__,
        "command": config.command,
        "config": asdict(config),
        "status": status,
        "results": results,
        "diagnostics": list(diagnostics or []),
    }
    if checks is not None:
        doc["checks"] = checks
    if files is not None:
        doc["files"] = sorted(files)
    doc = jsonable(doc)
    jsonschema.validate(doc, load_schema())
    return doc


def write_report(doc, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "report.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _cell(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, columns):
    """Write equal-length columns with a header row, in the given order."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    cols = [list(np.asarray(c).tolist()) for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_cell(v) for v in row])
    return path
