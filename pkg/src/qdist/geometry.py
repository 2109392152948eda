"""
Geometry over F_q^d

Points, the quadratic norm ||x|| = x_1^2 + ... + x_d^2, spheres, the variety
{||x|| - ||z|| = 0}, isotropic subspaces and the seeded set families used by
the verification suites.

Points of F_q^d are enumerated by the index sum_i x_i q^(d-1-i), so index
order and lexicographic coordinate order coincide.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from qdist.config import MAX_PAIRS, MAX_POINTS, PAIR_BLOCK
from qdist.errors import DimensionError, InvalidInput, UnsupportedCase, check_cap

logger = logging.getLogger(__name__)

Point = tuple


def _readonly(array):
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class PointSet:
    """
    A deduplicated finite subset of F_q^dim.

    coords is an (n, dim) int64 array sorted lexicographically; build instances
    through the classmethods so the canonical form always holds.
    """

    ctx: object
    dim: int
    coords: np.ndarray = field(repr=False)

    @classmethod
    def from_points(cls, ctx, dim, points):
        arr = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, dim), dtype=np.int64)
        arr = arr.reshape(-1, dim) if arr.ndim == 1 and dim == 1 else arr
        if arr.ndim != 2 or arr.shape[1] != dim:
            raise DimensionError(f"points must have {dim} coordinates")
        ctx.check(arr)
        if len(arr):
            arr = np.unique(arr, axis=0)
        return cls(ctx, dim, _readonly(np.ascontiguousarray(arr)))

    @classmethod
    def from_indices(cls, ctx, dim, indices):
        indices = np.unique(np.asarray(indices, dtype=np.int64))
        return cls(ctx, dim, _readonly(index_points(ctx, dim, indices)))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        for row in self.coords:
            yield tuple(int(v) for v in row)

    def __contains__(self, point):
        point = np.asarray(point, dtype=np.int64)
        return bool(np.any(np.all(self.coords == point, axis=1)))

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and self.dim == other.dim
            and np.array_equal(self.coords, other.coords)
        )

    def __hash__(self):
        return hash((self.ctx, self.dim, self.coords.tobytes()))

    def __repr__(self):
        return f"PointSet({self.ctx}, dim={self.dim}, size={len(self)})"

    def indices(self):
        return point_index(self.ctx, self.coords)


def point_index(ctx, coords):
    """Enumeration index of each row of coords."""
    coords = np.asarray(coords, dtype=np.int64)
    dim = coords.shape[-1]
    weights = ctx.q ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    return coords @ weights


def index_points(ctx, dim, indices):
    """Decode enumeration indices into an (n, dim) coordinate array."""
    indices = np.asarray(indices, dtype=np.int64)
    weights = ctx.q ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] // weights) % ctx.q


def space_size(ctx, dim, what="points"):
    """q^dim, checked against MAX_POINTS."""
    total = ctx.q**dim
    check_cap(f"{what} in F_{ctx.q}^{dim}", total, MAX_POINTS)
    return total


def grid_norms(ctx, dim, signs=None):
    """
    Norm of every point of F_q^dim in enumeration order.

    signs gives a +1/-1 weight per coordinate, so signs = (+1,)*n + (-1,)*n
    yields ||x|| - ||z|| on F_q^(2n).
    """
    space_size(ctx, dim)
    signs = (1,) * dim if signs is None else tuple(signs)
    acc = np.zeros((1,) * dim, dtype=np.int64)
    for axis, sign in enumerate(signs):
        term = ctx.squares if sign > 0 else np.asarray(ctx.neg(ctx.squares))
        shape = [1] * dim
        shape[axis] = ctx.q
        acc = np.asarray(ctx.add(acc, term.reshape(shape)))
    return acc.reshape(-1)


# -- norms and forms -----------------------------------------------------


def norm(ctx, x):
    """||x|| = sum x_i^2; rows of a 2-d array are treated as separate points."""
    arr = ctx.check(x)
    return ctx.sum(ctx.square(arr), axis=-1)


def dot(ctx, x, y):
    """sum x_i y_i."""
    x, y = ctx.check(x), ctx.check(y)
    if x.shape[-1] != y.shape[-1]:
        raise DimensionError(f"dot of {x.shape[-1]}- and {y.shape[-1]}-dimensional points")
    return ctx.sum(ctx.mul(x, y), axis=-1)


def star_norm(ctx, X):
    """||x|| - ||z|| for X = (x, z) split into two equal halves."""
    X = ctx.check(X)
    width = X.shape[-1]
    if width % 2:
        raise DimensionError(f"star norm needs an even dimension, got {width}")
    half = width // 2
    return ctx.sub(norm(ctx, X[..., :half]), norm(ctx, X[..., half:]))


def sphere_sizes(ctx, d):
    """|S_r| for every r in F_q."""
    return np.bincount(grid_norms(ctx, d), minlength=ctx.q)


def sphere(ctx, d, r):
    """S_r = {x in F_q^d : ||x|| = r}; r = 0 is allowed."""
    r = int(ctx.check(r))
    return PointSet.from_indices(ctx, d, np.flatnonzero(grid_norms(ctx, d) == r))


def variety_v0(ctx, half_dim):
    """{X in F_q^(2n) : ||X||_* = 0}."""
    signs = (1,) * half_dim + (-1,) * half_dim
    zero = np.flatnonzero(grid_norms(ctx, 2 * half_dim, signs) == 0)
    return PointSet.from_indices(ctx, 2 * half_dim, zero)


# -- isotropic subspaces -------------------------------------------------


def sqrt_minus_one(ctx):
    """Smallest i with i^2 = -1, or None when -1 is not a square."""
    hits = np.flatnonzero(ctx.squares == ctx.neg(1))
    return int(hits[0]) if len(hits) else None


def two_squares_minus_one(ctx):
    """Smallest (a, b) in enumeration order with a^2 + b^2 = -1."""
    minus_one = ctx.neg(1)
    for a in range(ctx.q):
        target = ctx.sub(minus_one, ctx.square(a))
        hits = np.flatnonzero(ctx.squares == target)
        if len(hits):
            return a, int(hits[0])
    raise UnsupportedCase(f"no solution of a^2 + b^2 = -1 in {ctx}")


def span(ctx, basis):
    """All F_q-linear combinations of the rows of basis."""
    basis = ctx.check(basis)
    k, dim = basis.shape
    space_size(ctx, k, "span elements")
    coefs = index_points(ctx, k, np.arange(ctx.q**k, dtype=np.int64))
    combos = ctx.sum(ctx.mul(coefs[:, :, None], basis[None, :, :]), axis=1)
    return PointSet.from_points(ctx, dim, np.asarray(combos).reshape(-1, dim))


def isotropic_basis(ctx, d):
    """
    d/2 independent, mutually orthogonal, self-orthogonal vectors of F_q^d.

    For q = 1 mod 4 the blocks are (1, i) with i^2 = -1; for q = 3 mod 4 and
    d = 0 mod 4 they are (1, 0, a, b) and (0, 1, -b, a) with a^2 + b^2 = -1.

    Raises:
        UnsupportedCase: d odd, or q = 3 mod 4 with d = 2 mod 4
    """
    if d < 2 or d % 2:
        raise UnsupportedCase(f"isotropic subspaces of dimension d/2 need even d >= 2, got {d}")
    basis = np.zeros((d // 2, d), dtype=np.int64)
    if ctx.q % 4 == 1:
        i = sqrt_minus_one(ctx)
        for k in range(d // 2):
            basis[k, 2 * k] = 1
            basis[k, 2 * k + 1] = i
        return basis
    if d % 4:
        raise UnsupportedCase(f"q = {ctx.q} = 3 mod 4 needs d = 0 mod 4, got {d}")
    a, b = two_squares_minus_one(ctx)
    for block in range(d // 4):
        row, col = 2 * block, 4 * block
        basis[row, col : col + 4] = (1, 0, a, b)
        basis[row + 1, col : col + 4] = (0, 1, ctx.neg(b), a)
    return basis


def isotropic_subspace(ctx, d):
    """Span of isotropic_basis(ctx, d): q^(d/2) points with all dot products 0."""
    subspace = span(ctx, isotropic_basis(ctx, d))
    logger.debug("isotropic subspace of %s^%d with %d points", ctx, d, len(subspace))
    return subspace


def embedded_isotropic_subspace(ctx, d):
    """
    For odd d: an isotropic subspace of F_q^(d-1) placed in F_q^(d-1) x {0}.

    Exists when d = 1 mod 4, or d = 3 mod 4 and q = 1 mod 4.
    """
    if d % 2 == 0 or d < 3:
        raise UnsupportedCase(f"embedded isotropic subspaces need odd d >= 3, got {d}")
    inner = isotropic_subspace(ctx, d - 1)
    padded = np.hstack([inner.coords, np.zeros((len(inner), 1), dtype=np.int64)])
    return PointSet.from_points(ctx, d, padded)


# -- set families --------------------------------------------------------


def full_space(ctx, d):
    return PointSet.from_indices(ctx, d, np.arange(space_size(ctx, d), dtype=np.int64))


def random_point_set(ctx, d, size, seed):
    """
    size distinct points of F_q^d, uniform without replacement.

    The result depends only on (ctx, d, size, seed).
    """
    total = ctx.q**d
    if size < 0 or size > total:
        raise InvalidInput(f"cannot draw {size} distinct points from {total}")
    check_cap(f"points in F_{ctx.q}^{d}", total, 2**62)
    rng = np.random.default_rng(seed)
    chosen = rng.choice(total, size=size, replace=False) if size else []
    return PointSet.from_indices(ctx, d, chosen)


def product_set(E, F):
    """E x F in F_q^(2d) as concatenated coordinates."""
    if E.ctx != F.ctx or E.dim != F.dim:
        raise DimensionError("product_set needs sets over the same field and dimension")
    left = np.repeat(E.coords, len(F), axis=0)
    right = np.tile(F.coords, (len(E), 1))
    return PointSet.from_points(E.ctx, E.dim + F.dim, np.hstack([left, right]))


def translate(P, v):
    """P + v."""
    v = P.ctx.check(v)
    if v.shape[-1] != P.dim:
        raise DimensionError("translation vector has the wrong dimension")
    return PointSet.from_points(P.ctx, P.dim, P.ctx.add(P.coords, v[None, :]))


def construction_exponents(E, F):
    """
    log_q(|E||F|^2) for a constructed pair next to the two competing exponents
    d + 2/3 and 3d/2 + 2/3.
    """
    return size_exponents(E.ctx.q, E.dim, len(E), len(F))


def size_exponents(q, d, e, f):
    mass = e * f**2
    return {
        "measured": math.log(mass, q) if mass else float("-inf"),
        "d_plus_two_thirds": d + 2 / 3,
        "three_halves_d_plus_two_thirds": 1.5 * d + 2 / 3,
    }


# -- text format ---------------------------------------------------------


def write_point_set(P, stream):
    """Header 'q p ell d n', then one point per line as element indices."""
    ctx = P.ctx
    print(f"{ctx.q} {ctx.p} {ctx.ell} {P.dim} {len(P)}", file=stream)
    for row in P.coords:
        print(" ".join(str(int(v)) for v in row), file=stream)


def read_point_set(stream):
    """Inverse of write_point_set."""
    from qdist.field import make_field

    lines = [line.strip() for line in stream if line.strip()]
    if not lines:
        raise InvalidInput("empty point-set stream")
    q, p, ell, dim, n = (int(v) for v in lines[0].split())
    ctx = make_field(p, ell)
    if ctx.q != q:
        raise InvalidInput(f"header says q = {q} but p^ell = {ctx.q}")
    rows = [[int(v) for v in line.split()] for line in lines[1 : n + 1]]
    if len(rows) != n:
        raise InvalidInput(f"header announces {n} points, found {len(rows)}")
    return PointSet.from_points(ctx, dim, rows)


# -- pairwise norms ------------------------------------------------------


def pair_norm_blocks(X, Y):
    """
    Yield (row_offset, norms) where norms[i, k] = ||X[row_offset + i] - Y[k]||.

    Rows are processed in blocks of about PAIR_BLOCK**2 pairs.
    """
    ctx = X.ctx
    if X.ctx != Y.ctx or X.dim != Y.dim:
        raise DimensionError("pairwise norms need sets over the same field and dimension")
    block = max(1, PAIR_BLOCK * PAIR_BLOCK // max(len(Y), 1))
    for start in range(0, len(X), block):
        rows = X.coords[start : start + block]
        diff = ctx.sub(rows[:, None, :], Y.coords[None, :, :])
        yield start, np.asarray(norm(ctx, np.asarray(diff).reshape(-1, X.dim))).reshape(len(rows), len(Y))


def pair_norm_counts(X, Y):
    """counts[t] = #{(x, y) in X x Y : ||x - y|| = t}, exact int64."""
    check_cap("pairs", len(X) * len(Y), MAX_PAIRS)
    counts = np.zeros(X.ctx.q, dtype=np.int64)
    for _, norms in pair_norm_blocks(X, Y):
        counts += np.bincount(norms.reshape(-1), minlength=X.ctx.q)
    return counts
