"""CSV / JSON result files."""

import csv
import io
import json
import os

from ..errors import ContractError
from .sweep import EvalCell

COLUMNS = ("method", "snr_db", "snapshots", "k", "rho", "trials", "failures", "mse")
_TYPES = {"method": str, "snr_db": float, "snapshots": int, "k": int, "rho": float,
          "trials": int, "failures": int, "mse": float}


def _row(cell):
    return {c: getattr(cell, c) for c in COLUMNS}


def emit_report(cells, path, fmt=None):
    """Write cells sorted by (method, snr, T, k, rho).

    ``fmt`` is ``"csv"`` or ``"json"``; inferred from the extension if None.
    Floats are written with ``repr`` so values round-trip exactly.
    """
    if not cells:
        raise ContractError("no cells to report")
    fmt = fmt or ("json" if str(path).endswith(".json") else "csv")
    rows = [_row(c) for c in sorted(cells, key=EvalCell.sort_key)]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in rows:
            writer.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in COLUMNS])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        raise ContractError(f"unknown report format {fmt!r}")
    with open(path, "w", newline="") as fh:
        fh.write(text)


def read_report(path):
    """Parse a CSV or JSON report back into ``EvalCell`` objects."""
    with open(path, newline="") as fh:
        text = fh.read()
    if os.path.splitext(str(path))[1] == ".json":
        rows = json.loads(text)
    else:
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ContractError(f"{path}: unexpected columns {reader.fieldnames}")
        rows = list(reader)
    return [EvalCell(**{c: _TYPES[c](r[c]) for c in COLUMNS}) for r in rows]


def format_table(cells):
    """Fixed-width text table for terminal output."""
    lines = ["%-17s %7s %9s %3s %5s %7s %8s %12s" % ("method", "snr_db", "snapshots", "k", "rho", "trials", "failures", "mse")]
    for c in sorted(cells, key=EvalCell.sort_key):
        flag = "  !" if c.flagged else ""
        lines.append("%-17s %7.1f %9d %3d %5.2f %7d %8d %12.4e%s" % (
            c.method, c.snr_db, c.snapshots, c.k, c.rho, c.trials, c.failures, c.mse, flag))
    return "\n".join(lines)
