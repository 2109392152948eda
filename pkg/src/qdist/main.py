"""
qdist command line

    qdist check gauss --p 3..13 --ell 1..3
    qdist check sphere-ft --d 3 --p 3
    qdist check proof-chain --p 3,5 --d 3 --trials 100 --seed 1
    qdist sweep --config phase.cfg --csv summary.csv
    qdist construct isotropic --p 5 --d 4
    qdist dft --p 3 --d 2 --size 4 --seed 7

Reports go to standard output (or --out) as JSON lines or CSV rows; the
summary goes to standard error through logging. Exit status: 0 when every
asserting report passes, 1 on any failed assertion, 2 when a resource cap
stopped a computation, 3 for configuration errors.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass, field

from qdist.config import (
    CHECK_ALIASES,
    CHECK_NAMES,
    canonical_check,
    parse_config,
    validate,
    with_checks,
)
from qdist.errors import CapExceeded, ConfigError, QdistError
from qdist.field import make_field
from qdist.geometry import (
    embedded_isotropic_subspace,
    isotropic_subspace,
    random_point_set,
    read_point_set,
    write_point_set,
)
from qdist.report import Verdict, emit_report, report_csv_header
from qdist.spectral import dft, inversion_report, plancherel_report, write_spectral_csv
from qdist.suites import run_check
from qdist.sweep import PAIR_CHECKS, write_sweep_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CAP = 2
EXIT_CONFIG = 3


def configure_logging(level="info"):
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _label(report):
    params = " ".join(f"{k}={v}" for k, v in report.params.items())
    inputs = " ".join(f"{k}={v}" for k, v in report.inputs.items())
    return f"{report.check} [{params}] {inputs}".rstrip()


@dataclass
class RunSummary:
    """Verdict counts and the offending cells of one run."""

    counts: dict = field(default_factory=lambda: dict.fromkeys(Verdict, 0))
    failures: list = field(default_factory=list)
    capped: list = field(default_factory=list)
    invalid: list = field(default_factory=list)

    def add(self, report):
        self.counts[report.verdict] += 1
        if report.failed:
            self.failures.append(_label(report))
        if report.extra.get("cap_exceeded"):
            self.capped.append(f"{_label(report)}: {report.extra['skipped']}")

    @property
    def status(self):
        # a failed assertion outranks a cap violation
        if self.failures:
            return EXIT_FAILED
        if self.capped:
            return EXIT_CAP
        if self.invalid:
            return EXIT_CONFIG
        return EXIT_OK

    def log(self):
        logger.info(
            "%d pass, %d fail, %d no-claim",
            self.counts[Verdict.PASS],
            self.counts[Verdict.FAIL],
            self.counts[Verdict.NO_CLAIM],
        )
        for label in self.failures:
            logger.error("FAIL %s", label)
        for label in self.capped:
            logger.error("cap exceeded: %s", label)
        for label in self.invalid:
            logger.error("invalid: %s", label)


def exit_status(reports):
    """Log the summary of a finished report list and return the exit status."""
    summary = RunSummary()
    for report in reports:
        summary.add(report)
    summary.log()
    return summary.status


def run_suite(config, stream=None, collect=None):
    """
    Run every check named in config, writing one record per report.

    Args:
        config: A validated Config
        stream: Output stream (default: standard output)
        collect: Optional list that receives every report

    Returns:
        The exit status
    """
    stream = stream if stream is not None else sys.stdout
    summary = RunSummary()
    if config.format == "csv":
        print(report_csv_header(), file=stream)
    sweeping = "sweep" in config.checks
    for name in config.checks:
        if sweeping and name in PAIR_CHECKS:
            # run per trial inside the sweep cells
            continue
        logger.info("running %s", name)
        try:
            for report in run_check(name, config):
                summary.add(report)
                if collect is not None:
                    collect.append(report)
                print(emit_report(report, config.format), file=stream)
        except CapExceeded as err:
            summary.capped.append(f"{name}: {err}")
        except (QdistError, ValueError) as err:
            summary.invalid.append(f"{name}: {err}")
    summary.log()
    return summary.status


def _add_grid_flags(parser):
    parser.add_argument("--p", help="Primes, e.g. 3,5,7 or 3..13")
    parser.add_argument("--ell", help="Extension degrees, e.g. 1..3")
    parser.add_argument("--d", help="Dimensions, e.g. 2,3")
    parser.add_argument("--j", help="Sphere radius")
    parser.add_argument("--size", help="Set size")
    parser.add_argument("--trials", help="Trials per configuration")
    parser.add_argument("--seed", help="Seed for randomized suites")
    parser.add_argument("--workers", help="Worker processes (0 = sequential)")
    parser.add_argument(
        "-f",
        "--format",
        choices=["jsonl", "csv"],
        help="Report format (default: jsonl)",
    )
    parser.add_argument(
        "-o",
        "--out",
        help="Output file (default: stdout)",
    )
    parser.add_argument(
        "--config",
        help="key=value config file; flags override it",
    )
    parser.add_argument(
        "settings",
        nargs="*",
        help="Extra key=value settings, e.g. sizes_e=5,10 family_f=full",
    )


def _overrides(args):
    keys = ("p", "ell", "d", "j", "size", "trials", "seed", "workers", "format", "out")
    return {key: getattr(args, key, None) for key in keys}


def _open_output(path):
    if path:
        return open(path, "w", encoding="utf-8")
    return sys.stdout


def _run_configured(args, name, keep_listed=False):
    """Parse the config and run check name, plus the listed checks when keep_listed."""
    try:
        config = parse_config(args.config, args.settings, _overrides(args))
        listed = [other for other in config.checks if other != name] if keep_listed else []
        config = with_checks(config, name, *listed)
        validate(config)
    except ConfigError as err:
        logger.error("%s", err)
        return EXIT_CONFIG
    output = _open_output(config.out)
    reports = [] if getattr(args, "csv", None) else None
    try:
        status = run_suite(config, output, reports)
    finally:
        if config.out:
            output.close()

    if reports is not None:
        with open(args.csv, "w", encoding="utf-8") as summary:
            write_sweep_csv(reports, summary)
    return status


def cmd_check(args):
    return _run_configured(args, canonical_check(args.name))


def cmd_sweep(args):
    return _run_configured(args, "sweep", keep_listed=True)


def cmd_construct(args):
    try:
        ctx = make_field(int(args.p), int(args.ell))
        d = int(args.d)
        V = isotropic_subspace(ctx, d) if d % 2 == 0 else embedded_isotropic_subspace(ctx, d)
    except (QdistError, ValueError) as err:
        logger.error("%s", err)
        return EXIT_CONFIG
    output = _open_output(args.out)
    try:
        write_point_set(V, output)
    finally:
        if args.out:
            output.close()
    logger.info("isotropic set of %d points in %s^%d", len(V), ctx, d)
    return EXIT_OK


def cmd_dft(args):
    try:
        if args.points:
            with open(args.points, encoding="utf-8") as stream:
                omega = read_point_set(stream)
            ctx, d = omega.ctx, omega.dim
        else:
            if args.seed is None:
                raise ConfigError("seed: a random set needs --seed")
            ctx = make_field(int(args.p), int(args.ell))
            d = int(args.d)
            omega = random_point_set(ctx, d, int(args.size), int(args.seed))
        table = dft(ctx, d, omega)
    except CapExceeded as err:
        logger.error("%s", err)
        return EXIT_CAP
    except (QdistError, ValueError, OSError) as err:
        logger.error("%s", err)
        return EXIT_CONFIG

    output = _open_output(args.out)
    try:
        write_spectral_csv(table, output)
    finally:
        if args.out:
            output.close()
    return exit_status([plancherel_report(table, omega), inversion_report(table, omega)])


def build_parser():
    import argparse

    parser = argparse.ArgumentParser(
        prog="qdist",
        description="Verification lab for finite-field distance sets and character sums",
    )
    parser.add_argument(
        "--log-level",
        choices=["debug", "info", "warning", "error"],
        default="info",
        help="Logging level for standard error (default: info)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="Run one named verification suite")
    check.add_argument("name", choices=[*CHECK_NAMES, "sweep", *CHECK_ALIASES])
    _add_grid_flags(check)
    check.set_defaults(handler=cmd_check)

    sweep = commands.add_parser("sweep", help="Run a threshold sweep")
    _add_grid_flags(sweep)
    sweep.add_argument("--csv", help="Also write a per-cell CSV summary to this file")
    sweep.set_defaults(handler=cmd_sweep)

    construct = commands.add_parser("construct", help="Write a constructed point set")
    construct.add_argument("kind", choices=["isotropic"])
    construct.add_argument("--p", default="5")
    construct.add_argument("--ell", default="1")
    construct.add_argument("--d", default="2")
    construct.add_argument("-o", "--out", help="Output file (default: stdout)")
    construct.set_defaults(handler=cmd_construct)

    transform = commands.add_parser("dft", help="Fourier transform of a point set, as CSV")
    transform.add_argument("--p", default="3")
    transform.add_argument("--ell", default="1")
    transform.add_argument("--d", default="2")
    transform.add_argument("--size", default="1")
    transform.add_argument("--seed")
    transform.add_argument("--points", help="Point-set file to transform instead of a random set")
    transform.add_argument("-o", "--out", help="Output file (default: stdout)")
    transform.set_defaults(handler=cmd_dft)
    return parser


def main(argv=None):
    """Main entry point for the qdist CLI."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        # usage errors are configuration errors, not cap violations
        if err.code:
            return EXIT_CONFIG
        raise
    configure_logging(args.log_level)
    return args.handler(args)


if __name__ == "__main__":
    raise SystemExit(main())
