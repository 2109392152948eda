"""
Threshold Sweeps

Phase-diagram measurements of |Delta(E) + Delta(F)| / q over a grid of set
sizes. Each cell runs seeded trials and reports the mean and minimum ratio
along with flags saying which size hypotheses hold at C = 1 and C = 4:

    product   |E||F| >= C q^(d + 1/3)
    mixed     max(|E|^2|F|, |E||F|^2) >= C q^((3d+1)/2)
    quartic   max(|E|^4|F|^6, |E|^6|F|^4) >= C q^11      (d = 2 only)

Two flags carry explicit constants and are asserted: the product form of the
Iosevich-Rudnev threshold, |E||F| >= 4 q^((2d+1)/2), which forces the sumset to
be all of F_q, and the proof-chain corollary, which forces it past q/2.
Everything else is measured, never asserted.

Usage:
    qdist-sweep phase.cfg -o reports.jsonl --csv summary.csv
"""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from itertools import islice
from multiprocessing import Pool

import numpy as np

from qdist.config import MAX_TRIPLES, parse_config, validate, with_checks
from qdist.distances import (
    corollary_triggered,
    cs_lower_bound_report,
    distance_sumset,
    energy,
    pair_count_table,
    product_energy_report,
    proof_chain_report,
    shparlinski_report,
    sumset_identity_report,
    triple_count,
    variety_energy_report,
)
from qdist.errors import CapExceeded, ConfigError, QdistError
from qdist.field import make_field
from qdist.geometry import (
    PointSet,
    embedded_isotropic_subspace,
    full_space,
    isotropic_subspace,
    random_point_set,
    size_exponents,
)
from qdist.report import CheckReport, Verdict, emit_report, field_params, format_float
from qdist.spectral import restriction_eligible

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 10

# Per-trial checks a sweep can run on each (E, F) pair.
PAIR_CHECKS = {
    "cs-bound": lambda ctx, d, E, F: cs_lower_bound_report(ctx, E, F),
    "sumset": lambda ctx, d, E, F: sumset_identity_report(ctx, E, F),
    "energy-bound": variety_energy_report,
    "proof-chain": proof_chain_report,
    "product-energy": product_energy_report,
    "shparlinski": lambda ctx, d, E, F: shparlinski_report(ctx, E, F),
}


def ordered_map(fn, tasks, workers=0):
    """map(fn, tasks), through a process pool when workers > 0; results keep task order."""
    if workers <= 0:
        yield from map(fn, tasks)
        return
    with Pool(workers) as pool:
        yield from pool.imap(fn, tasks)


def build_family(ctx, d, family, size, seed):
    """
    One member of a set family.

    random: size seeded uniform points; full: all of F_q^d; isotropic: the
    isotropic subspace (embedded for odd d); point: the origin. Only random
    uses size and seed.
    """
    if family == "random":
        return random_point_set(ctx, d, size, seed)
    if family == "full":
        return full_space(ctx, d)
    if family == "isotropic":
        return isotropic_subspace(ctx, d) if d % 2 == 0 else embedded_isotropic_subspace(ctx, d)
    if family == "point":
        return PointSet.from_points(ctx, d, [(0,) * d])
    raise ConfigError(f"unknown set family {family!r}")


def hypothesis_flags(q, d, e, f):
    """Which size hypotheses hold for |E| = e, |F| = f, all tested in integers."""
    flags = {}
    for c in (1, 4):
        flags[f"product_c{c}"] = (e * f) ** 3 >= c**3 * q ** (3 * d + 1)
        flags[f"mixed_c{c}"] = max(e * e * f, e * f * f) ** 2 >= c * c * q ** (3 * d + 1)
        if d == 2:
            flags[f"quartic_c{c}"] = max(e**4 * f**6, e**6 * f**4) >= c * q**11
    flags["trivial_product"] = (e * f) ** 2 >= 16 * q ** (2 * d + 1)
    flags["corollary"] = corollary_triggered(q, d, e, f)
    return flags


@dataclass(frozen=True)
class Cell:
    p: int
    ell: int
    d: int
    size_e: int
    size_f: int
    family_e: str
    family_f: str

    @property
    def label(self):
        return (
            f"q={self.p**self.ell} d={self.d} "
            f"E={self.family_e}:{self.size_e} F={self.family_f}:{self.size_f}"
        )


def sweep_cells(config):
    """Cells in config order: fields, then dimensions, then |E|, then |F|."""
    sizes_e = config.sizes_e or ((config.size,) if config.size is not None else (1,))
    sizes_f = config.sizes_f or sizes_e
    return [
        Cell(p, ell, d, e, f, config.family_e, config.family_f)
        for p in config.p
        for ell in config.ell
        for d in config.d
        for e in sizes_e
        for f in sizes_f
    ]


def _triple_stats(ctx, E):
    """T(E), sum mu^2 and the empirical constant of T(E) against its planar bound."""
    n, q = len(E), ctx.q
    T = triple_count(ctx, E)
    scale = n**3 / q + q ** (2 / 3) * n ** (5 / 3) + q ** (1 / 4) * n**2
    return {
        "T": T,
        "mu_energy": energy(pair_count_table(ctx, E, "E")),
        "five_thirds_term": q ** (2 / 3) * n ** (5 / 3),
        "empirical_constant": T / scale if scale else 0.0,
    }


@dataclass(frozen=True)
class TrialError:
    """A trial that could not run; the cell it belongs to is skipped."""

    message: str
    cap_exceeded: bool


def run_trial(task):
    """
    One seeded (E, F) draw of a cell.

    Returns (|E|, |F|, sumset size, per-trial reports, triple stats or None),
    or a TrialError when the sets cannot be built or exceed a cap.
    Module-level so worker processes can unpickle it.
    """
    cell, seed, index, trial, checks = task
    try:
        ctx = make_field(cell.p, cell.ell)
        E = build_family(ctx, cell.d, cell.family_e, cell.size_e, [seed, index, trial, 0])
        F = build_family(ctx, cell.d, cell.family_f, cell.size_f, [seed, index, trial, 1])
        sumset = distance_sumset(ctx, E, F)
        reports = [PAIR_CHECKS[name](ctx, cell.d, E, F) for name in checks]
        stats = None
        if trial == 0 and cell.d == 2 and len(E) ** 3 <= MAX_TRIPLES:
            stats = _triple_stats(ctx, E)
    except (QdistError, ValueError) as err:
        return TrialError(str(err), isinstance(err, CapExceeded))
    return len(E), len(F), len(sumset), reports, stats


def _skipped_report(cell, error):
    ctx = make_field(cell.p, cell.ell)
    inputs = {"cell": cell.label}
    extra = {"skipped": error.message, "cap_exceeded": error.cap_exceeded}
    return CheckReport("sweep", field_params(ctx, cell.d), inputs, extra=extra)


def _cell_report(cell, trials, seed, results):
    ctx = make_field(cell.p, cell.ell)
    q, d = ctx.q, cell.d
    e, f = results[0][0], results[0][1]
    ratios = [size / q for _, _, size, _, _ in results]
    sizes = [size for _, _, size, _, _ in results]
    flags = hypothesis_flags(q, d, e, f)

    verdict = Verdict.NO_CLAIM
    asserted = []
    if flags["trivial_product"]:
        asserted.append(min(sizes) == q)
    if flags["corollary"] and restriction_eligible(ctx, d):
        asserted.append(2 * min(sizes) > q)
    if asserted:
        verdict = Verdict.of(all(asserted))

    extra = {
        "mean_ratio": float(np.mean(ratios)),
        "min_ratio": min(ratios),
        "flags": flags,
        "construction_exponents": size_exponents(q, d, e, f),
    }
    stats = results[0][4]
    if stats is not None:
        extra["triples"] = stats
    return CheckReport(
        "sweep",
        field_params(ctx, d),
        inputs={
            "size_e": e,
            "size_f": f,
            "family_e": cell.family_e,
            "family_f": cell.family_f,
            "trials": trials,
            "seed": seed,
        },
        lhs=min(sizes),
        rhs=q,
        verdict=verdict,
        extra=extra,
    )


def threshold_sweep(config):
    """
    Run every cell of config and yield reports in config order.

    All (cell, trial) pairs go through one ordered_map, so workers stay busy
    across cell boundaries. Per-trial reports for the pair checks named in
    config.checks come first within each cell, then the cell summary. Cells
    whose sets exceed a cap or cannot be built yield a no-claim report naming
    the cell.
    """
    trials = max(1, config.trials if config.trials is not None else DEFAULT_TRIALS)
    checks = tuple(name for name in config.checks if name in PAIR_CHECKS)
    cells = sweep_cells(config)
    tasks = [
        (cell, config.seed, index, trial, checks)
        for index, cell in enumerate(cells)
        for trial in range(trials)
    ]
    results = ordered_map(run_trial, tasks, config.workers)
    for cell in cells:
        cell_results = list(islice(results, trials))
        error = next((r for r in cell_results if isinstance(r, TrialError)), None)
        if error is not None:
            logger.warning("skipping cell %s: %s", cell.label, error.message)
            yield _skipped_report(cell, error)
            continue
        for *_, reports, _ in cell_results:
            yield from reports
        report = _cell_report(cell, trials, config.seed, cell_results)
        logger.debug("cell %s: min ratio %s", cell.label, format_float(report.extra["min_ratio"]))
        yield report


SUMMARY_HEADER = (
    "q,d,family_e,family_f,size_e,size_f,trials,mean_ratio,min_ratio,"
    "product_c1,mixed_c1,trivial_product,corollary,pass"
)


def write_sweep_csv(reports, stream):
    """One summary row per sweep cell; per-trial and skipped reports are left out."""
    print(SUMMARY_HEADER, file=stream)
    for report in reports:
        if report.check != "sweep" or "skipped" in report.extra:
            continue
        inputs, extra, flags = report.inputs, report.extra, report.extra["flags"]
        row = [
            report.params["q"],
            report.params["d"],
            inputs["family_e"],
            inputs["family_f"],
            inputs["size_e"],
            inputs["size_f"],
            inputs["trials"],
            format_float(extra["mean_ratio"]),
            format_float(extra["min_ratio"]),
            int(flags["product_c1"]),
            int(flags["mixed_c1"]),
            int(flags["trivial_product"]),
            int(flags["corollary"]),
            report.verdict.value,
        ]
        print(",".join(str(v) for v in row), file=stream)


def main():
    """CLI entry point for the standalone sweep runner."""
    import argparse

    from qdist.main import EXIT_CONFIG, configure_logging, exit_status

    parser = argparse.ArgumentParser(description="Run a distance-sumset threshold sweep")
    parser.add_argument(
        "config",
        help="Path to a key=value sweep config",
    )
    parser.add_argument(
        "-o",
        "--output",
        help="JSON-lines output file (default: stdout)",
    )
    parser.add_argument(
        "--csv",
        help="Also write a per-cell CSV summary to this file",
    )
    parser.add_argument(
        "-w",
        "--workers",
        type=int,
        help="Worker processes (default: from config, 0 = sequential)",
    )
    parser.add_argument(
        "--log-level",
        choices=["debug", "info", "warning", "error"],
        default="info",
        help="Logging level for standard error (default: info)",
    )
    try:
        args = parser.parse_args()
    except SystemExit as err:
        if err.code:
            return EXIT_CONFIG
        raise
    configure_logging(args.log_level)

    try:
        config = parse_config(args.config, overrides={"workers": args.workers})
        extra_checks = [name for name in config.checks if name != "sweep"]
        config = with_checks(config, "sweep", *extra_checks)
        validate(config)
    except ConfigError as err:
        logger.error("%s", err)
        return EXIT_CONFIG

    output = sys.stdout
    if args.output:
        output = open(args.output, "w", encoding="utf-8")

    reports = []
    try:
        for report in threshold_sweep(config):
            reports.append(report)
            print(emit_report(report, "jsonl"), file=output)
    finally:
        if args.output:
            output.close()

    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as summary:
            write_sweep_csv(reports, summary)

    return exit_status(reports)


if __name__ == "__main__":
    raise SystemExit(main())
