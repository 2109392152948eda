"""
Check Reports

Every verification in qdist returns a CheckReport: the inputs, both sides of the
identity or inequality, the residual or margin and a tri-state verdict. Reports
serialize to JSON lines or CSV rows with a fixed key order and floats printed at
17 significant digits, so identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NO_CLAIM = "no-claim"

    @classmethod
    def of(cls, ok):
        return cls.PASS if ok else cls.FAIL


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one formula or inequality check."""

    check: str
    params: dict
    inputs: dict = field(default_factory=dict)
    lhs: object = None
    rhs: object = None
    residual: float | None = None
    margin: object = None
    tolerance: float | None = None
    verdict: Verdict = Verdict.NO_CLAIM
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict is Verdict.PASS

    @property
    def failed(self):
        return self.verdict is Verdict.FAIL


def field_params(ctx, d=None, **more):
    """The standard params block: q, p, ell and optionally d."""
    params = {"q": ctx.q, "p": ctx.p, "ell": ctx.ell}
    if d is not None:
        params["d"] = d
    params.update(more)
    return params


def closeness_report(check, params, lhs, rhs, tolerance, inputs=None, extra=None):
    """Pass iff |lhs - rhs| <= tolerance."""
    residual = abs(complex(lhs) - complex(rhs))
    return CheckReport(
        check=check,
        params=params,
        inputs=inputs or {},
        lhs=lhs,
        rhs=rhs,
        residual=residual,
        tolerance=tolerance,
        verdict=Verdict.of(residual <= tolerance),
        extra=extra or {},
    )


def residual_report(check, params, residual, tolerance, inputs=None, extra=None):
    """Pass iff residual <= tolerance, for checks with no natural two sides."""
    return CheckReport(
        check=check,
        params=params,
        inputs=inputs or {},
        residual=residual,
        tolerance=tolerance,
        verdict=Verdict.of(residual <= tolerance),
        extra=extra or {},
    )


def upper_bound_report(check, params, lhs, rhs, slack=0, inputs=None, extra=None, claim=True):
    """
    Pass iff lhs <= rhs + slack.

    With exact (int or Fraction) sides and slack 0 the comparison is exact.
    When claim is False the margin is reported without a verdict.
    """
    margin = rhs - lhs
    verdict = Verdict.of(margin >= -slack) if claim else Verdict.NO_CLAIM
    return CheckReport(
        check=check,
        params=params,
        inputs=inputs or {},
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        tolerance=slack if slack else None,
        verdict=verdict,
        extra=extra or {},
    )


def lower_bound_report(check, params, lhs, rhs, slack=0, inputs=None, extra=None, claim=True):
    """Pass iff lhs >= rhs - slack; the margin is lhs - rhs."""
    report = upper_bound_report(check, params, rhs, lhs, slack, inputs, extra, claim)
    return replace(report, lhs=lhs, rhs=rhs)


# -- serialization -------------------------------------------------------


def format_float(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    if x == 0:
        return "0.0"
    return f"{x:.17g}"


def _encode(value):
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, Verdict):
        return json.dumps(value.value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return json.dumps(f"{value.numerator}/{value.denominator}")
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return f"[{format_float(value.real)},{format_float(value.imag)}]"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = (f"{json.dumps(str(k))}:{_encode(v)}" for k, v in value.items())
        return "{" + ",".join(items) + "}"
    if isinstance(value, (list, tuple, set, frozenset, np.ndarray)):
        seq = sorted(value) if isinstance(value, (set, frozenset)) else list(value)
        return "[" + ",".join(_encode(v) for v in seq) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _pass_value(verdict):
    if verdict is Verdict.NO_CLAIM:
        return "no-claim"
    return verdict is Verdict.PASS


def report_record(report):
    """The report as an ordered dict in the stable output key order."""
    return {
        "check": report.check,
        "params": report.params,
        "inputs": report.inputs,
        "lhs": report.lhs,
        "rhs": report.rhs,
        "residual": report.residual,
        "margin": report.margin,
        "tolerance": report.tolerance,
        "pass": _pass_value(report.verdict),
        "extra": report.extra,
    }


CSV_HEADER = ("check", "q", "p", "ell", "d", "inputs", "lhs", "rhs", "residual", "margin", "tolerance", "pass")


def _csv_cell(value):
    if value is None:
        return ""
    text = _encode(value)
    return text.strip('"') if isinstance(value, (str, Fraction)) else text


def report_csv_header():
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="").writerow(CSV_HEADER)
    return buffer.getvalue()


def emit_report(report, fmt="jsonl"):
    """
    Serialize a report as one JSON line or one CSV row (no trailing newline).

    Args:
        report: The CheckReport to serialize
        fmt: "jsonl" or "csv"
    """
    if fmt == "jsonl":
        return _encode(report_record(report))
    if fmt == "csv":
        params = report.params
        row = [
            report.check,
            params.get("q", ""),
            params.get("p", ""),
            params.get("ell", ""),
            params.get("d", ""),
            _encode(report.inputs),
            _csv_cell(report.lhs),
            _csv_cell(report.rhs),
            _csv_cell(report.residual),
            _csv_cell(report.margin),
            _csv_cell(report.tolerance),
            report.verdict.value,
        ]
        buffer = io.StringIO()
        csv.writer(buffer, lineterminator="").writerow(row)
        return buffer.getvalue()
    raise ValueError(f"unknown report format {fmt!r}")


def tally(reports):
    """Counts of each verdict."""
    counts = dict.fromkeys(Verdict, 0)
    for report in reports:
        counts[report.verdict] += 1
    return counts
