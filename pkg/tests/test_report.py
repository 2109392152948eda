import json
from fractions import Fraction

import numpy as np
import pytest

from qdist.report import (
    CSV_HEADER,
    CheckReport,
    Verdict,
    closeness_report,
    emit_report,
    field_params,
    format_float,
    lower_bound_report,
    report_csv_header,
    tally,
    upper_bound_report,
)

PARAMS = {"q": 3, "p": 3, "ell": 1, "d": 2}


def test_verdict_of():
    assert Verdict.of(True) is Verdict.PASS
    assert Verdict.of(False) is Verdict.FAIL


def test_field_params(f9):
    assert field_params(f9) == {"q": 9, "p": 3, "ell": 2}
    assert field_params(f9, 2, n=6) == {"q": 9, "p": 3, "ell": 2, "d": 2, "n": 6}


def test_exact_upper_bound():
    assert upper_bound_report("x", PARAMS, 3, Fraction(3)).passed
    report = upper_bound_report("x", PARAMS, Fraction(10, 3), 3)
    assert report.failed
    assert report.margin == Fraction(-1, 3)
    assert report.tolerance is None


def test_upper_bound_slack_and_claim():
    assert upper_bound_report("x", PARAMS, 1.0 + 1e-12, 1.0, slack=1e-10).passed
    assert upper_bound_report("x", PARAMS, 1.1, 1.0, slack=1e-10).failed
    assert upper_bound_report("x", PARAMS, 5, 1, claim=False).verdict is Verdict.NO_CLAIM


def test_lower_bound_keeps_sides():
    report = lower_bound_report("x", PARAMS, 3, Fraction(8, 3))
    assert report.passed
    assert (report.lhs, report.rhs) == (3, Fraction(8, 3))
    assert report.margin == Fraction(1, 3)
    assert lower_bound_report("x", PARAMS, 2, Fraction(8, 3)).failed


def test_closeness():
    report = closeness_report("x", PARAMS, 1 + 1e-12j, 1, 1e-10)
    assert report.passed
    assert report.residual == pytest.approx(1e-12)
    assert closeness_report("x", PARAMS, 1.5, 1, 1e-10).failed


def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(0.0) == "0.0"
    assert format_float(-0.0) == "0.0"
    assert format_float(float("nan")) == "null"
    assert format_float(2.5) == "2.5"


def test_jsonl_record_is_stable_and_parseable():
    report = CheckReport(
        "cs-bound",
        PARAMS,
        {"size_e": 2, "size_f": 2},
        lhs=3,
        rhs=Fraction(8, 3),
        margin=Fraction(1, 3),
        verdict=Verdict.PASS,
        extra={"energy": np.int64(96), "flags": {"a": np.bool_(True)}, "z": 1j, "s": {3, 1}},
    )
    line = emit_report(report)
    record = json.loads(line)
    assert list(record) == ["check", "params", "inputs", "lhs", "rhs", "residual", "margin", "tolerance", "pass", "extra"]
    assert record["rhs"] == "8/3"
    assert record["pass"] is True
    assert record["residual"] is None
    assert record["extra"] == {"energy": 96, "flags": {"a": True}, "z": [0.0, 1.0], "s": [1, 3]}
    assert line == emit_report(report)


def test_no_claim_serializes_as_a_string():
    record = json.loads(emit_report(CheckReport("x", PARAMS)))
    assert record["pass"] == "no-claim"


def test_csv_row():
    report = upper_bound_report("triples", PARAMS, 45, 45, inputs={"size_e": 3})
    row = emit_report(report, "csv")
    assert row.startswith('triples,3,3,1,2,"{""size_e"":3}",45,45,,0,,pass')
    assert report_csv_header() == ",".join(CSV_HEADER)


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report(CheckReport("x", PARAMS), "xml")


def test_unserializable_value():
    with pytest.raises(TypeError):
        emit_report(CheckReport("x", PARAMS, extra={"bad": object()}))


def test_tally():
    reports = [
        upper_bound_report("x", PARAMS, 1, 2),
        upper_bound_report("x", PARAMS, 3, 2),
        CheckReport("x", PARAMS),
        CheckReport("x", PARAMS),
    ]
    assert tally(reports) == {Verdict.PASS: 1, Verdict.FAIL: 1, Verdict.NO_CLAIM: 2}
