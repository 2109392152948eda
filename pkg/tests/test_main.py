import json

import pytest

from qdist.main import EXIT_CAP, EXIT_CONFIG, EXIT_FAILED, EXIT_OK, RunSummary, exit_status, main
from qdist.report import CSV_HEADER, CheckReport, Verdict, upper_bound_report

PARAMS = {"q": 3, "p": 3, "ell": 1}


def records(text):
    return [json.loads(line) for line in text.splitlines()]


def test_gauss_grid(capsys):
    assert main(["check", "gauss", "--p", "3..13", "--ell", "1..3"]) == EXIT_OK
    lines = records(capsys.readouterr().out)
    assert len(lines) == 15
    assert all(line["pass"] is True for line in lines)
    assert [line["params"]["q"] for line in lines[:3]] == [3, 9, 27]


def test_sphere_ft(capsys):
    assert main(["check", "sphere-ft", "--d", "3", "--p", "3"]) == EXIT_OK
    (line,) = records(capsys.readouterr().out)
    assert line["check"] == "sphere-ft"
    assert line["params"]["d"] == 3


def test_randomized_check_without_seed():
    assert main(["check", "proof-chain", "--p", "3", "--d", "3"]) == EXIT_CONFIG


def test_bad_prime():
    assert main(["check", "gauss", "--p", "4"]) == EXIT_CONFIG


def test_unknown_setting():
    assert main(["check", "gauss", "colour=red"]) == EXIT_CONFIG


@pytest.mark.parametrize(
    "alias, name, args",
    [
        ("lemma33", "energy-bound", ["--p", "3", "--d", "1", "--trials", "2", "--seed", "1"]),
        ("prop41", "product-energy", ["--p", "5", "--d", "1", "--trials", "2", "--seed", "1"]),
        ("lemma2.3", "sphere-ft", ["--p", "3", "--d", "3"]),
    ],
)
def test_older_check_names(alias, name, args, capsys):
    assert main(["check", alias, *args]) == EXIT_OK
    lines = records(capsys.readouterr().out)
    assert lines
    assert {line["check"] for line in lines} == {name}


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "frobenius"],
        ["check"],
        ["transmogrify"],
        ["check", "gauss", "--format", "xml"],
        ["construct", "sphere"],
    ],
)
def test_usage_errors_are_config_errors(argv):
    assert main(argv) == EXIT_CONFIG


def test_cap_exceeded(capsys):
    assert main(["check", "sphere-ft", "--p", "3", "--d", "15"]) == EXIT_CAP
    assert capsys.readouterr().out == ""


def test_randomized_runs_are_reproducible(tmp_path):
    first, second = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["check", "cs-bound", "--p", "3,5", "--d", "2", "--trials", "4", "--seed", "1"]
    assert main([*args, "-o", str(first)]) == EXIT_OK
    assert main([*args, "-o", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert len(first.read_text().splitlines()) == 8


def test_csv_format(capsys):
    assert main(["check", "kloosterman", "--p", "5", "-f", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + 5
    assert all(line.endswith(",pass") for line in lines[1:])


def test_construct_isotropic(capsys):
    assert main(["construct", "isotropic", "--p", "5", "--d", "2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "5 5 1 2 5"
    assert lines[1:] == ["0 0", "1 2", "2 4", "3 1", "4 3"]


def test_construct_unsupported():
    assert main(["construct", "isotropic", "--p", "3", "--d", "2"]) == EXIT_CONFIG


def test_dft(capsys):
    assert main(["dft", "--p", "3", "--d", "2", "--size", "4", "--seed", "7"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "m_index,re,im"
    assert len(lines) == 10


def test_dft_of_a_point_file(tmp_path, capsys):
    assert main(["construct", "isotropic", "--p", "5", "--d", "2", "-o", str(tmp_path / "v.txt")]) == EXIT_OK
    assert main(["dft", "--points", str(tmp_path / "v.txt")]) == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 26


def test_dft_needs_a_seed():
    assert main(["dft", "--p", "3"]) == EXIT_CONFIG


def test_sweep_with_summary(tmp_path):
    cfg = tmp_path / "phase.cfg"
    cfg.write_text("p=3 d=2\nsizes_e=2,9\ntrials=2 seed=5\nchecks=cs-bound\n", encoding="utf-8")
    out, summary = tmp_path / "reports.jsonl", tmp_path / "summary.csv"
    status = main(["sweep", "--config", str(cfg), "-o", str(out), "--csv", str(summary)])
    assert status == EXIT_OK
    lines = records(out.read_text())
    checks = [line["check"] for line in lines]
    assert checks.count("sweep") == 4
    assert checks.count("cs-bound") == 8
    assert len(summary.read_text().splitlines()) == 5


def test_run_summary_precedence():
    failed = upper_bound_report("x", PARAMS, 2, 1)
    capped = CheckReport("sweep", PARAMS, extra={"skipped": "too big", "cap_exceeded": True})
    summary = RunSummary()
    summary.invalid.append("bad")
    assert summary.status == EXIT_CONFIG
    summary.add(capped)
    assert summary.status == EXIT_CAP
    summary.add(failed)
    assert summary.status == EXIT_FAILED
    assert summary.counts[Verdict.NO_CLAIM] == 1


def test_exit_status_of_passing_reports():
    assert exit_status([upper_bound_report("x", PARAMS, 1, 2), CheckReport("x", PARAMS)]) == EXIT_OK


def test_help_lists_commands(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    for command in ("check", "sweep", "construct", "dft"):
        assert command in out
