"""Deterministic report emission.

Reports must be byte-identical across runs with the same configuration,
so this module owns all formatting decisions: rationals as "num/den",
floats at 12 significant digits, insertion-ordered JSON objects, and
csv rows with a fixed line terminator.
"""

import csv
import io
import json
import math
from fractions import Fraction

SCHEMA_VERSION = "1"


def format_float(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(float(x), ".12g")


def format_scalar(v):
    """Canonical text for a CSV cell."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return format_float(v)
    if v is None:
        return ""
    return str(v)


def _write_json(v, out, indent):
    pad = "  " * indent
    if isinstance(v, dict):
        if not v:
            out.append("{}")
            return
        out.append("{\n")
        items = list(v.items())
        for i, (key, val) in enumerate(items):
            out.append("  " * (indent + 1) + json.dumps(str(key)) + ": ")
            _write_json(val, out, indent + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(v, (list, tuple)):
        seq = list(v)
        if not seq:
            out.append("[]")
            return
        out.append("[\n")
        for i, val in enumerate(seq):
            out.append("  " * (indent + 1))
            _write_json(val, out, indent + 1)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(v, bool):
        out.append("true" if v else "false")
    elif isinstance(v, Fraction):
        out.append(json.dumps(format_scalar(v)))
    elif isinstance(v, float):
        text = format_float(v)
        # infinities have no JSON literal; quote them
        out.append(json.dumps(text) if text in ("inf", "-inf", "nan") else text)
    elif isinstance(v, int):
        out.append(str(v))
    elif v is None:
        out.append("null")
    else:
        out.append(json.dumps(str(v)))


def dump_json(value):
    out = []
    _write_json(value, out, 0)
    out.append("\n")
    return "".join(out)


def dump_csv(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_scalar(x) for x in row])
    return buf.getvalue()


def report_to_dict(report):
    """Stable JSON layout for one SuiteReport."""
    checks = []
    for c in report.checks:
        entry = {"name": c.name, "passed": c.passed, "details": c.details}
        entry["witness"] = c.witness
        checks.append(entry)
    return {
        "suite": report.suite,
        "group": report.group,
        "settings": report.settings,
        "passed": report.passed,
        "counts": report.counts,
        "checks": checks,
    }


def emit_reports(reports, fmt):
    """Serialize a list of SuiteReports to a byte string."""
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "passed": all(r.passed for r in reports),
            "reports": [report_to_dict(r) for r in reports],
        }
        return dump_json(doc).encode()
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    # csv: a single report with a documented table keeps that exact layout;
    # anything else flattens to one row per check
    if len(reports) == 1 and reports[0].table is not None:
        columns, rows = reports[0].table
        return dump_csv(columns, rows).encode()
    columns = ["suite", "check", "passed", "details", "witness"]
    rows = []
    for r in reports:
        for c in r.checks:
            details = ";".join(f"{k}={format_scalar(v)}"
                               for k, v in c.details.items())
            witness = ""
            if c.witness:
                witness = ";".join(f"{k}={format_scalar(v)}"
                                   for k, v in c.witness.items())
            rows.append([r.suite, c.name, c.passed, details, witness])
    return dump_csv(columns, rows).encode()
