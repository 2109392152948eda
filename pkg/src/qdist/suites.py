"""
Verification Suites

One generator per check name. Each walks the config grid (every field in
p x ell, every dimension in d) and yields CheckReports in a fixed order, so the
same config always produces the same report stream.

Randomized suites draw their sets from seeds derived from (seed, trial); when
no size is configured, each trial also draws its set sizes, bounded by
RANDOM_SIZE_LIMIT so pair counts stay desk-scale.
"""

from __future__ import annotations

import logging

import numpy as np

from qdist.charsums import (
    character_orthogonality_report,
    complete_square_residual,
    gauss_power_check,
    gauss_report,
    kloosterman_reports,
    quad_char_balance_report,
)
from qdist.distances import (
    iosevich_rudnev_scan,
    isotropic_report,
    triple_count_report,
)
from qdist.field import make_field
from qdist.geometry import random_point_set
from qdist.spectral import (
    restriction_bound_report,
    restriction_methods_report,
    sphere_ft_report,
    v0_report,
    zero_sphere_decay_report,
)
from qdist.sweep import DEFAULT_TRIALS, PAIR_CHECKS, ordered_map, threshold_sweep

logger = logging.getLogger(__name__)

RANDOM_SIZE_LIMIT = 40
GAUSS_POWERS = (2, 6, 10)


def fields(config):
    for p in config.p:
        for ell in config.ell:
            yield make_field(p, ell)


def field_dims(config):
    for ctx in fields(config):
        for d in config.d:
            yield ctx, d


def _trials(config):
    return config.trials if config.trials is not None else DEFAULT_TRIALS


# -- deterministic suites ------------------------------------------------


def gauss_suite(config):
    for ctx in fields(config):
        yield gauss_report(ctx, 1)


def gauss_power_suite(config):
    for ctx in fields(config):
        for n in GAUSS_POWERS:
            yield gauss_power_check(ctx, n)


def characters_suite(config):
    for ctx in fields(config):
        yield character_orthogonality_report(ctx)
        yield quad_char_balance_report(ctx)


def kloosterman_suite(config):
    for ctx in fields(config):
        yield from kloosterman_reports(ctx)


def complete_square_suite(config):
    for ctx in fields(config):
        for a in range(1, ctx.q):
            for b in range(ctx.q):
                yield complete_square_residual(ctx, a, b)


def sphere_ft_suite(config):
    for ctx, d in field_dims(config):
        yield sphere_ft_report(ctx, d)


def zero_sphere_suite(config):
    for ctx, d in field_dims(config):
        yield zero_sphere_decay_report(ctx, d)


def v0_suite(config):
    for ctx, d in field_dims(config):
        yield v0_report(ctx, d)


def isotropic_suite(config):
    for ctx, d in field_dims(config):
        yield isotropic_report(ctx, d)


def iosevich_rudnev_suite(config):
    for ctx, d in field_dims(config):
        yield iosevich_rudnev_scan(ctx, d, _trials(config), config.seed)


# -- randomized set suites -----------------------------------------------


def run_set_trial(task):
    """
    Reports of one check on one seeded trial.

    task is (check, p, ell, d, seed, trial, size_e, size_f, j); a None size or j
    is drawn from the trial's own generator. Module-level for worker processes.
    """
    name, p, ell, d, seed, trial, size_e, size_f, j = task
    ctx = make_field(p, ell)
    rng = np.random.default_rng([seed, trial])
    limit = min(ctx.q**d, RANDOM_SIZE_LIMIT)
    e = size_e if size_e is not None else int(rng.integers(1, limit + 1))
    f = size_f if size_f is not None else int(rng.integers(1, limit + 1))
    E = random_point_set(ctx, d, e, [seed, trial, 0])
    if name == "restriction":
        j = j if j is not None else int(rng.integers(0, ctx.q))
        return [restriction_bound_report(ctx, d, E), restriction_methods_report(ctx, d, E, j)]
    if name == "triples":
        return [triple_count_report(ctx, E)]
    F = random_point_set(ctx, d, f, [seed, trial, 1])
    return [PAIR_CHECKS[name](ctx, d, E, F)]


def set_suite(name):
    def suite(config):
        sizes_e = config.sizes_e or (config.size,)
        sizes_f = config.sizes_f or sizes_e
        tasks = [
            (name, ctx.p, ctx.ell, d, config.seed, trial, e, f, config.j)
            for ctx, d in field_dims(config)
            for e in sizes_e
            for f in sizes_f
            for trial in range(_trials(config))
        ]
        logger.debug("%s: %d trials", name, len(tasks))
        for reports in ordered_map(run_set_trial, tasks, config.workers):
            yield from reports

    suite.__name__ = f"{name.replace('-', '_')}_suite"
    return suite


SUITES = {
    "gauss": gauss_suite,
    "gauss-power": gauss_power_suite,
    "characters": characters_suite,
    "kloosterman": kloosterman_suite,
    "complete-square": complete_square_suite,
    "sphere-ft": sphere_ft_suite,
    "restriction": set_suite("restriction"),
    "zero-sphere": zero_sphere_suite,
    "v0": v0_suite,
    "energy-bound": set_suite("energy-bound"),
    "proof-chain": set_suite("proof-chain"),
    "cs-bound": set_suite("cs-bound"),
    "sumset": set_suite("sumset"),
    "product-energy": set_suite("product-energy"),
    "triples": set_suite("triples"),
    "shparlinski": set_suite("shparlinski"),
    "iosevich-rudnev": iosevich_rudnev_suite,
    "isotropic": isotropic_suite,
    "sweep": threshold_sweep,
}


def run_check(name, config):
    """Yield the reports of one named suite."""
    return SUITES[name](config)
