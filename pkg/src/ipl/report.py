"""Verification reports and deterministic report rendering.

JSON output is byte-stable: keys sorted, floats printed with 17 significant
digits, one trailing newline. CSV flattens a report's array-valued trace
into one row per entry under a header.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class VerificationReport:
    """Outcome of a theorem or identity check.

    ``values`` holds every quantity entering the check (left/right-hand
    sides, correction factors, margins) keyed by name; ``passed`` is the
    verdict at the check's stated tolerance.
    """

    check: str
    passed: bool
    values: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"check": self.check, "passed": self.passed, "values": to_plain(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(check=d["check"], passed=bool(d["passed"]), values=dict(d["values"]))


def to_plain(obj):
    """Recursively convert numpy scalars/arrays into plain Python types."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _render(obj, out: list) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _render(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _render(v, out)
        out.append("]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if not np.isfinite(obj):
            raise ValueError(f"non-finite value {obj!r} cannot be serialized")
        out.append(f"{obj:.17g}")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def stable_json(obj) -> str:
    """Serialize to JSON with sorted keys and 17-significant-digit floats."""
    out: list = []
    _render(to_plain(obj), out)
    out.append("\n")
    return "".join(out)


def _fmt_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def csv_table(header: list, rows: list) -> str:
    lines = [",".join(str(h) for h in header)]
    for row in rows:
        lines.append(",".join(_fmt_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def emit_report(report, fmt: str = "json") -> str:
    """Render a report object (dataclass with to_dict, or plain dict).

    ``fmt="csv"`` requires the object to expose ``to_rows()`` returning
    (header, rows); reports without a tabular trace reject it.
    """
    if fmt == "json":
        d = report.to_dict() if hasattr(report, "to_dict") else report
        return stable_json(d)
    if fmt == "csv":
        if not hasattr(report, "to_rows"):
            raise ValueError(f"{type(report).__name__} has no CSV form")
        header, rows = report.to_rows()
        return csv_table(header, rows)
    raise ValueError(f"unknown format {fmt!r}")
