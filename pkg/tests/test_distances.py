from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_pair_counts, points
from qdist.distances import (
    asym_distance_set,
    corollary_triggered,
    cs_lower_bound_report,
    distance_set,
    distance_sumset,
    energy,
    energy_floor_report,
    field_sumset,
    iosevich_rudnev_scan,
    iosevich_rudnev_size,
    isotropic_report,
    pair_count_table,
    product_energy_report,
    proof_chain_report,
    shparlinski_report,
    sumset_identity_report,
    triple_count,
    triple_count_report,
    variety_energy_report,
)
from qdist.errors import CapExceeded
from qdist.field import make_field
from qdist.geometry import (
    full_space,
    isotropic_subspace,
    norm,
    product_set,
    random_point_set,
    translate,
)
from qdist.report import Verdict

COLLINEAR = [(0, 0), (1, 0), (2, 0)]


def brute_triples(ctx, E):
    rows = [np.array(x) for x in E]
    dist = [[norm(ctx, ctx.sub(x, y)) for y in rows] for x in rows]
    n = len(rows)
    return sum(
        1
        for x, y, z in product(range(n), repeat=3)
        if dist[x][y] == dist[x][z] and dist[y][z] != 0
    )


def test_pair_count_profiles(f3):
    full = pair_count_table(f3, full_space(f3, 2))
    assert full.counts.tolist() == [9, 36, 36]
    assert full.total == 81
    assert full.support == {0, 1, 2}
    assert energy(full) == 2673

    line = pair_count_table(f3, points(f3, 2, COLLINEAR))
    assert line.counts.tolist() == [3, 6, 0]
    assert energy(line) == 45
    assert energy(pair_count_table(f3, points(f3, 2, [(1, 1)]))) == 1


@pytest.mark.parametrize("p, ell, d, size", [(5, 1, 2, 15), (3, 2, 2, 12), (7, 1, 3, 9)])
def test_pair_counts_match_brute_force(p, ell, d, size):
    ctx = make_field(p, ell)
    D = random_point_set(ctx, d, size, 8)
    profile = pair_count_table(ctx, D)
    assert np.array_equal(profile.counts, brute_pair_counts(ctx, D))
    assert profile.total == size * size


def test_distance_sets(f3, f5):
    assert distance_set(f3, points(f3, 2, COLLINEAR)) == {0, 1}
    assert distance_set(f5, isotropic_subspace(f5, 2)) == {0}
    assert distance_set(f5, points(f5, 2, [])) == frozenset()
    E = points(f5, 2, [(0, 0)])
    F = points(f5, 2, [(1, 0), (1, 1)])
    assert asym_distance_set(f5, E, F) == {1, 2}


def test_field_sumset(f5, f9):
    assert field_sumset(f5, {1, 2}, {0, 4}) == {0, 1, 2}
    assert field_sumset(f5, {1, 2}, set()) == frozenset()
    # t + t = 2t, digits (0, 2)
    assert field_sumset(f9, {3}, {3}) == {6}


def test_distance_sumset_methods_agree(f5):
    E = random_point_set(f5, 2, 4, 1)
    F = random_point_set(f5, 2, 3, 2)
    assert distance_sumset(f5, E, F) == distance_sumset(f5, E, F, "product")
    assert sumset_identity_report(f5, E, F).passed
    with pytest.raises(ValueError):
        distance_sumset(f5, E, F, "convolution")


def test_product_sumset_cap(f7):
    E = full_space(f7, 3)
    with pytest.raises(CapExceeded):
        distance_sumset(f7, E, E, "product")


def test_cs_bound_example(f3):
    E = points(f3, 2, [(0, 0), (1, 0)])
    report = cs_lower_bound_report(f3, E, E)
    assert report.extra["energy"] == 96
    assert report.rhs == Fraction(8, 3)
    assert report.lhs == 3
    assert report.passed


@pytest.mark.parametrize("seed", range(6))
def test_cs_bound_random(seed):
    ctx = make_field(5)
    E = random_point_set(ctx, 2, 2 + seed, seed)
    F = random_point_set(ctx, 2, 3, seed + 100)
    assert cs_lower_bound_report(ctx, E, F).passed


def test_cs_bound_empty(f3):
    report = cs_lower_bound_report(f3, points(f3, 2, []), points(f3, 2, [(0, 0)]))
    assert report.rhs == 0
    assert report.passed


def test_energy_floor_example(f3):
    E = points(f3, 2, [(0, 0), (1, 0)])
    report = energy_floor_report(pair_count_table(f3, product_set(E, E)), 4)
    assert (report.lhs, report.rhs) == (96, 86)
    assert report.passed
    cs = cs_lower_bound_report(f3, E, E)
    assert cs.extra["energy_floor"] == 86
    assert cs.extra["energy_floor_holds"] is True


def test_energy_floor_is_tight_for_one_point(f3):
    report = energy_floor_report(pair_count_table(f3, points(f3, 2, [(1, 1)])))
    assert (report.lhs, report.rhs) == (1, 1)
    assert report.margin == 0
    assert report.passed


@pytest.mark.parametrize("p, d", [(3, 1), (3, 2), (5, 2), (7, 2), (3, 3)])
@pytest.mark.parametrize("seed", range(20))
def test_energy_floor_random_sets(p, d, seed):
    ctx = make_field(p)
    limit = min(p**d, 30)
    D = random_point_set(ctx, d, 1 + seed % limit, seed)
    profile = pair_count_table(ctx, D)
    assert energy(profile) * p >= len(D) ** 4
    assert energy_floor_report(profile, d).passed


@pytest.mark.parametrize("p, seed, e, f", [(3, 0, 3, 2), (3, 1, 5, 4), (3, 2, 9, 9), (5, 3, 4, 3)])
def test_variety_energy_bound(p, seed, e, f):
    ctx = make_field(p)
    E = random_point_set(ctx, 2, e, [seed, 0])
    F = random_point_set(ctx, 2, f, [seed, 1])
    report = variety_energy_report(ctx, 2, E, F)
    assert report.passed, report
    assert report.extra["star_zero_mass"] > 0


def test_variety_energy_bound_in_dimension_one(f7):
    E = random_point_set(f7, 1, 4, 1)
    F = random_point_set(f7, 1, 5, 2)
    assert variety_energy_report(f7, 1, E, F).passed


def test_corollary_trigger():
    assert corollary_triggered(3, 3, 27, 2)
    assert not corollary_triggered(3, 3, 27, 1)
    assert not corollary_triggered(5, 2, 5, 5)
    assert corollary_triggered(3, 2, 9, 9)


def test_proof_chain_corollary_cell(f3):
    E = full_space(f3, 3)
    F = random_point_set(f3, 3, 2, 0)
    report = proof_chain_report(f3, 3, E, F)
    assert report.passed
    assert report.lhs <= 3044304
    assert report.extra["corollary_triggered"]
    assert report.extra["sumset_size"] == 3
    assert report.extra["corollary_holds"]


@pytest.mark.parametrize("seed", range(4))
def test_proof_chain_random_odd_dimension(seed):
    ctx = make_field(3)
    E = random_point_set(ctx, 3, 3 + 2 * seed, [seed, 0])
    F = random_point_set(ctx, 3, 2 + seed, [seed, 1])
    report = proof_chain_report(ctx, 3, E, F)
    assert report.passed, report
    assert isinstance(report.rhs, Fraction)


def test_proof_chain_in_the_plane_with_q_3_mod_4(f7):
    E = random_point_set(f7, 2, 6, 1)
    F = random_point_set(f7, 2, 4, 2)
    report = proof_chain_report(f7, 2, E, F)
    assert report.passed
    # 3d - 1 = 5 is odd, so the middle power is a float
    assert isinstance(report.rhs, float)


def test_proof_chain_outside_claim(f5):
    E = random_point_set(f5, 2, 5, 1)
    report = proof_chain_report(f5, 2, E, E)
    assert report.verdict is Verdict.NO_CLAIM
    assert report.margin is not None


def test_proof_chain_empty_set(f3):
    report = proof_chain_report(f3, 3, points(f3, 3, []), random_point_set(f3, 3, 4, 1))
    assert report.lhs == 0
    assert report.passed


@pytest.mark.parametrize("p, d", [(3, 2), (5, 2), (3, 3), (7, 1)])
def test_product_energy(p, d):
    ctx = make_field(p)
    E = random_point_set(ctx, d, min(6, p**d), 3)
    F = random_point_set(ctx, d, min(4, p**d), 4)
    report = product_energy_report(ctx, d, E, F)
    assert report.passed
    assert report.extra["mu_energy"] == energy(pair_count_table(ctx, E))
    assert isinstance(report.rhs, Fraction)


def test_triple_count_collinear(f3):
    E = points(f3, 2, COLLINEAR)
    assert triple_count(f3, E) == 6
    report = triple_count_report(f3, E)
    assert report.lhs == 45
    assert report.rhs == 3 * (6 + 9)
    assert report.passed


@pytest.mark.parametrize("p, ell, d, size", [(3, 1, 2, 7), (5, 1, 2, 12), (7, 1, 2, 10), (3, 2, 2, 9), (5, 1, 3, 8)])
def test_triple_count_matches_brute_force(p, ell, d, size):
    ctx = make_field(p, ell)
    E = random_point_set(ctx, d, size, 21)
    assert triple_count(ctx, E) == brute_triples(ctx, E)


def test_triple_count_with_isotropic_pairs(f5):
    E = isotropic_subspace(f5, 2)
    assert triple_count(f5, E) == 0
    assert triple_count(f5, points(f5, 2, [])) == 0


def test_triples_make_no_claim_when_q_is_1_mod_4(f5):
    assert triple_count_report(f5, random_point_set(f5, 2, 8, 1)).verdict is Verdict.NO_CLAIM


@pytest.mark.parametrize("p", [7, 11])
@pytest.mark.parametrize("seed", range(5))
def test_triples_companion_bound(p, seed):
    ctx = make_field(p)
    E = random_point_set(ctx, 2, 4 + 5 * seed, seed)
    assert triple_count_report(ctx, E).passed


def test_shparlinski(f3, f5):
    full = full_space(f3, 2)
    report = shparlinski_report(f3, full, full)
    assert report.lhs == 3
    assert report.rhs == 1
    assert report.passed

    origin = points(f5, 3, [(0, 0, 0)])
    odd = shparlinski_report(f5, origin, origin)
    assert odd.passed
    assert isinstance(odd.rhs, float)


@pytest.mark.parametrize("seed", range(4))
def test_shparlinski_random(seed):
    ctx = make_field(7)
    E = random_point_set(ctx, 2, 10 + seed, [seed, 0])
    F = random_point_set(ctx, 2, 12, [seed, 1])
    assert shparlinski_report(ctx, E, F).passed


def test_iosevich_rudnev_size():
    assert iosevich_rudnev_size(17, 2) == 281
    assert iosevich_rudnev_size(19, 2) == 332
    assert iosevich_rudnev_size(3, 3) == 36


def test_iosevich_rudnev_vacuous(f3):
    report = iosevich_rudnev_scan(f3, 3, 2, 0)
    assert report.verdict is Verdict.NO_CLAIM
    assert report.extra["vacuous"]


@pytest.mark.slow
@pytest.mark.parametrize("p", [17, 19])
def test_iosevich_rudnev_threshold(p):
    report = iosevich_rudnev_scan(make_field(p), 2, 20, 5)
    assert report.passed
    assert report.lhs == p


@pytest.mark.parametrize(
    "p, ell, d, verdict, size",
    [
        (5, 1, 2, Verdict.PASS, 5),
        (13, 1, 2, Verdict.PASS, 13),
        (3, 1, 4, Verdict.PASS, 9),
        (3, 2, 2, Verdict.PASS, 9),
        (5, 1, 3, Verdict.PASS, 5),
        (3, 1, 5, Verdict.PASS, 9),
        (3, 1, 2, Verdict.NO_CLAIM, None),
        (7, 1, 3, Verdict.NO_CLAIM, None),
    ],
)
def test_isotropic_report(p, ell, d, verdict, size):
    report = isotropic_report(make_field(p, ell), d)
    assert report.verdict is verdict
    if size is None:
        assert "unsupported" in report.extra
    else:
        assert report.inputs["size"] == size
        assert report.lhs == [0]


F7 = make_field(7)
coordinate = st.integers(min_value=0, max_value=6)


@given(
    st.lists(st.tuples(coordinate, coordinate), min_size=1, max_size=12),
    st.tuples(coordinate, coordinate),
)
@settings(max_examples=50, deadline=None)
def test_distance_profile_is_translation_invariant(rows, shift):
    E = points(F7, 2, rows)
    moved = translate(E, shift)
    assert np.array_equal(pair_count_table(F7, E).counts, pair_count_table(F7, moved).counts)
    assert triple_count(F7, E) == triple_count(F7, moved)
