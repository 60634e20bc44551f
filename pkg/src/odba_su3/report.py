"""Structured result emission: schema-tagged JSON and the scan CSV.

All numeric output is printed with 17 significant digits, which round-trips
IEEE doubles exactly and keeps output bytes reproducible run to run; complex
numbers serialise as [re, im] pairs.  The writer below is a tiny recursive
emitter rather than json.dumps because the standard encoder offers no hook
for fixed-precision float text.
"""

from __future__ import annotations

import json as _json

import numpy as np

SCHEMA = "odba-su3/1"


def fmt_float(x):
    return format(float(x), ".17g")


def _emit(value, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = [f'{pad_in}{_json.dumps(str(k))}: {_emit(v, indent, level + 1)}'
                for k, v in value.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        seq = list(value)
        if not seq:
            return "[]"
        flat = all(isinstance(v, (int, float, complex, np.integer, np.floating,
                                  np.complexfloating)) for v in seq)
        parts = [_emit(v, indent, level + 1) for v in seq]
        if flat and sum(len(p) for p in parts) < 70:
            return "[" + ", ".join(parts) + "]"
        return ("[\n" + ",\n".join(pad_in + p for p in parts) + "\n" + pad + "]")
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (complex, np.complexfloating)):
        return f"[{fmt_float(value.real)}, {fmt_float(value.imag)}]"
    if isinstance(value, (float, np.floating)):
        return fmt_float(value)
    if value is None:
        return "null"
    if isinstance(value, str):
        return _json.dumps(value)
    raise TypeError(f"cannot serialise {type(value)!r}")


def dumps(payload, indent=2):
    """Deterministic JSON text with the schema tag injected first."""
    document = {"schema": SCHEMA}
    document.update(payload)
    return _emit(document, indent, 0) + "\n"


def scan_csv_rows(rows):
    """CSV for an eigenvalue scan.

    Columns: u, Re Lambda, Im Lambda, Re lambda_exact, Im lambda_exact,
    |Lambda - lambda_exact|, flag (1 when the point was nudged off a pole).
    LF line endings, header row included.
    """
    lines = ["u,re_lambda,im_lambda,re_exact,im_exact,abs_error,flag"]
    for row in rows:
        lines.append(",".join([
            fmt_float(row["u"]),
            fmt_float(row["lambda"].real), fmt_float(row["lambda"].imag),
            fmt_float(row["exact"].real), fmt_float(row["exact"].imag),
            fmt_float(row["abs_error"]),
            str(int(row["flag"])),
        ]))
    return "\n".join(lines) + "\n"


def check_table(checks, indent=2):
    """Fixed-width text table for a list of {name, residual, passed} rows."""
    pad = " " * indent
    width = max((len(c["name"]) for c in checks), default=10)
    out = []
    for c in checks:
        res = c.get("residual")
        res_text = f"{res:.3e}" if res is not None else "   skipped"
        status = "pass" if c.get("passed") else ("SKIP" if c.get("skipped") else "FAIL")
        out.append(f"{pad}{c['name']:<{width}}  {res_text}  {status}")
    return "\n".join(out)
