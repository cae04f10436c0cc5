"""CSV / JSON writers for step series and momentum distributions."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .observables import running_average

SERIES_COLUMNS = ("step", "O", "O_timeavg")
DISTRIBUTION_COLUMNS = ("n", "P")


def fmt(x) -> str:
    """Shortest round-tripping decimal form (at most 17 significant digits)."""
    x = float(x)
    if x == 0.0:
        return "0"
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def series_rows(O, O_avg=None) -> list:
    O = np.asarray(O, dtype=float)
    if O_avg is None:
        O_avg = running_average(O)
    return [(t, float(o), float(a)) for t, (o, a) in enumerate(zip(O, O_avg))]


def distribution_rows(momenta, probabilities) -> list:
    return [(int(n), float(p)) for n, p in zip(momenta, probabilities)]


def to_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def to_json(columns, rows, manifest=None) -> str:
    doc = {"columns": list(columns), "rows": [[int(r[0])] + [float(v) for v in r[1:]] for r in rows]}
    if manifest is not None:
        doc["manifest"] = manifest
    return json.dumps(doc, indent=1) + "\n"


def emit(path, columns, rows, fmt_name="csv", manifest=None) -> Path:
    """Write one table; returns the path actually written (suffix set from the format)."""
    path = Path(path).with_suffix("." + fmt_name)
    text = to_csv(columns, rows) if fmt_name == "csv" else to_json(columns, rows, manifest)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
