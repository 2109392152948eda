import numpy as np
import pytest

from qdist.field import make_field
from qdist.geometry import PointSet


@pytest.fixture
def f3():
    return make_field(3)


@pytest.fixture
def f5():
    return make_field(5)


@pytest.fixture
def f7():
    return make_field(7)


@pytest.fixture
def f9():
    return make_field(3, 2)


def points(ctx, d, rows):
    """PointSet from a list of coordinate tuples."""
    return PointSet.from_points(ctx, d, rows)


def brute_pair_counts(ctx, D):
    """nu(t) by a plain double loop over D x D."""
    counts = np.zeros(ctx.q, dtype=np.int64)
    rows = list(D)
    for x in rows:
        for y in rows:
            diff = ctx.sub(np.array(x), np.array(y))
            counts[int(ctx.sum(ctx.square(diff)))] += 1
    return counts
