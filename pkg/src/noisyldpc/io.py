"""Table output: CSV/JSON with a run-spec header, written atomically."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import tempfile

__all__ = ["fmt_num", "render_table", "write_text", "emit_table"]


def fmt_num(x):
    """10 significant digits; blanks for missing values, lowercase booleans."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".10g")
    return str(x)


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if hasattr(x, "item"):
        return x.item()
    return x


def render_table(columns, rows, fmt="csv", run_spec=None):
    if fmt == "csv":
        buf = io.StringIO()
        if run_spec is not None:
            buf.write("# " + json.dumps(run_spec, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt_num(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {"run_spec": run_spec, "columns": list(columns),
               "rows": [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_text(path, text):
    """Write to ``path`` via a temporary file and rename; ``None`` means stdout."""
    if path is None:
        sys.stdout.write(text)
        return
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_table(path, columns, rows, fmt="csv", run_spec=None):
    write_text(path, render_table(columns, rows, fmt, run_spec))
