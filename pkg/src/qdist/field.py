"""
Finite Field Core

Exact arithmetic in F_q for odd prime powers q = p^ell (ell <= 3), together with
the principal additive character chi and the quadratic character eta.

Elements are integers in [0, q). Element i stands for the polynomial whose
little-endian base-p digits are its coefficients, reduced modulo the
lexicographically smallest monic irreducible polynomial of degree ell.
Every arithmetic routine accepts Python ints or numpy integer arrays and
broadcasts like numpy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from qdist.config import MAX_ELL, MAX_P, MAX_Q, MUL_TABLE_MAX_Q
from qdist.errors import FieldError

logger = logging.getLogger(__name__)

# An element of F_q is an index in [0, q); a character value is a Python complex.
Felt = int
Cx = complex


def is_prime(n):
    """Trial-division primality test, adequate for n <= MAX_P."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % k for k in range(3, math.isqrt(n) + 1, 2))


def _has_root(coeffs, p):
    """True when the polynomial with little-endian coeffs has a root in F_p."""
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(coeffs):
        acc = (acc * xs + c) % p
    return bool(np.any(acc == 0))


def smallest_irreducible(p, ell):
    """
    Lexicographically smallest monic irreducible polynomial of degree ell over F_p.

    Candidates are ordered by the little-endian base-p integer of their
    coefficient vector. For ell <= 3 a polynomial is irreducible iff it has no
    root in F_p, so the search is an exhaustive root scan.

    Returns:
        Tuple of ell + 1 coefficients, constant term first, leading 1 last.
    """
    if ell == 1:
        return (0, 1)
    for n in range(p**ell):
        low = [(n // p**i) % p for i in range(ell)]
        coeffs = (*low, 1)
        if not _has_root(coeffs, p):
            return coeffs
    raise FieldError(f"no irreducible polynomial of degree {ell} over F_{p}")


def _frozen(array):
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """
    Immutable description of F_q = F_{p^ell}.

    The lookup tables (squares, inverses, traces, chi and eta values) have q
    entries; the full multiplication table is only built when q is at most
    MUL_TABLE_MAX_Q.
    """

    p: int
    ell: int
    q: int
    modulus: tuple[int, ...]
    squares: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)
    trace_table: np.ndarray = field(repr=False)
    chi_table: np.ndarray = field(repr=False)
    eta_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray | None = field(repr=False, default=None)

    def __eq__(self, other):
        if not isinstance(other, FieldCtx):
            return NotImplemented
        return (self.p, self.ell, self.modulus) == (other.p, other.ell, other.modulus)

    def __hash__(self):
        return hash((self.p, self.ell, self.modulus))

    def __str__(self):
        return f"F_{self.q}" if self.ell == 1 else f"F_{self.q} (p={self.p}, ell={self.ell})"

    # -- representation ---------------------------------------------------

    @property
    def elements(self):
        return np.arange(self.q, dtype=np.int64)

    def digits(self, a):
        """Coefficient digits of a, shape a.shape + (ell,)."""
        a = np.asarray(a, dtype=np.int64)
        powers = self.p ** np.arange(self.ell, dtype=np.int64)
        return (a[..., None] // powers) % self.p

    def encode(self, digits):
        """Inverse of digits(): coefficient vectors back to element indices."""
        digits = np.asarray(digits, dtype=np.int64) % self.p
        powers = self.p ** np.arange(self.ell, dtype=np.int64)
        return (digits * powers).sum(axis=-1)

    def from_int(self, n):
        """The element n * 1 of the prime subfield."""
        return int(n) % self.p

    def check(self, a):
        """Validate element indices and return them as int64 data."""
        arr = np.asarray(a, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.q):
            raise FieldError(f"element index outside [0, {self.q})")
        return arr

    # -- arithmetic -------------------------------------------------------

    def add(self, a, b):
        if self.ell == 1:
            return _scalar((np.asarray(a, dtype=np.int64) + b) % self.p)
        return _scalar(self.encode(self.digits(a) + self.digits(b)))

    def neg(self, a):
        if self.ell == 1:
            return _scalar((-np.asarray(a, dtype=np.int64)) % self.p)
        return _scalar(self.encode(-self.digits(a)))

    def sub(self, a, b):
        if self.ell == 1:
            return _scalar((np.asarray(a, dtype=np.int64) - b) % self.p)
        return _scalar(self.encode(self.digits(a) - self.digits(b)))

    def mul(self, a, b):
        if self.mul_table is not None:
            return _scalar(self.mul_table[np.asarray(a), np.asarray(b)])
        if self.ell == 1:
            return _scalar((np.asarray(a, dtype=np.int64) * b) % self.p)
        return _scalar(self._poly_mul(a, b))

    def _poly_mul(self, a, b):
        da, db = np.broadcast_arrays(self.digits(a), self.digits(b))
        ell, p = self.ell, self.p
        prod = np.zeros(da.shape[:-1] + (2 * ell - 1,), dtype=np.int64)
        for i in range(ell):
            for j in range(ell):
                prod[..., i + j] += da[..., i] * db[..., j]
        prod %= p
        # t^ell = -(m_0 + m_1 t + ... + m_{ell-1} t^{ell-1})
        for k in range(2 * ell - 2, ell - 1, -1):
            top = prod[..., k]
            for i in range(ell):
                prod[..., k - ell + i] -= top * self.modulus[i]
            prod[..., k] = 0
            prod %= p
        return self.encode(prod[..., :ell])

    def pow(self, a, e):
        """a ** e; negative exponents go through the inverse."""
        e = int(e)
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = np.ones(np.shape(a), dtype=np.int64)
        base = np.asarray(a, dtype=np.int64)
        while e:
            if e & 1:
                result = np.asarray(self.mul(result, base))
            base = np.asarray(self.mul(base, base))
            e >>= 1
        return _scalar(result)

    def inv(self, a):
        arr = np.asarray(a, dtype=np.int64)
        if np.any(arr == 0):
            raise FieldError("inverse of zero is undefined")
        return _scalar(self.inv_table[arr])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def square(self, a):
        return _scalar(self.squares[np.asarray(a, dtype=np.int64)])

    def sum(self, values, axis=-1):
        """Field sum along an axis."""
        values = np.asarray(values, dtype=np.int64)
        if self.ell == 1:
            return _scalar(values.sum(axis=axis) % self.p)
        # digits() appends a trailing coefficient axis
        digit_axis = axis if axis >= 0 else axis - 1
        return _scalar(self.encode(self.digits(values).sum(axis=digit_axis)))

    def trace(self, a):
        return _scalar(self.trace_table[np.asarray(a, dtype=np.int64)])

    def chi(self, a):
        return self.chi_table[np.asarray(a, dtype=np.int64)]

    def eta(self, a):
        return self.eta_table[np.asarray(a, dtype=np.int64)]


def _scalar(value):
    """Unwrap 0-d numpy results into Python ints."""
    arr = np.asarray(value)
    return int(arr) if arr.ndim == 0 else arr


@lru_cache(maxsize=64)
def make_field(p, ell=1):
    """
    Build the context for F_{p^ell}.

    Raises:
        FieldError: p is not an odd prime, ell is out of range, or q is over the cap.
    """
    p, ell = int(p), int(ell)
    if p == 2:
        raise FieldError("characteristic 2 is not supported")
    if not is_prime(p):
        raise FieldError(f"p = {p} is not prime")
    if p > MAX_P:
        raise FieldError(f"p = {p} exceeds the cap {MAX_P}")
    if not 1 <= ell <= MAX_ELL:
        raise FieldError(f"ell = {ell} outside [1, {MAX_ELL}]")
    q = p**ell
    if q > MAX_Q:
        raise FieldError(f"q = {q} exceeds the cap {MAX_Q}")

    modulus = smallest_irreducible(p, ell)
    empty = np.zeros(0, dtype=np.int64)
    ctx = FieldCtx(p, ell, q, modulus, empty, empty, empty, empty, empty)

    elements = ctx.elements
    if q <= MUL_TABLE_MAX_Q:
        table = np.asarray(ctx.mul(elements[:, None], elements[None, :]), dtype=np.int64)
        object.__setattr__(ctx, "mul_table", _frozen(table))
    squares = np.asarray(ctx.mul(elements, elements), dtype=np.int64)
    inv_table = np.asarray(ctx.pow(elements, q - 2), dtype=np.int64)

    # Tr(a) = a + a^p + ... + a^(p^(ell-1)); lands in the prime subfield.
    trace = elements.copy()
    frob = elements.copy()
    for _ in range(ell - 1):
        frob = np.asarray(ctx.pow(frob, p), dtype=np.int64)
        trace = np.asarray(ctx.add(trace, frob), dtype=np.int64)
    if np.any(trace >= p):
        raise FieldError(f"trace left the prime subfield for modulus {modulus}")

    chi = np.exp(2j * np.pi * trace / p)
    eta = np.full(q, -1, dtype=np.int64)
    eta[squares] = 1
    eta[0] = 0

    for name, value in (
        ("squares", squares),
        ("inv_table", inv_table),
        ("trace_table", trace),
        ("chi_table", chi),
        ("eta_table", eta),
    ):
        object.__setattr__(ctx, name, _frozen(value))

    logger.debug("built %s with modulus %s", ctx, modulus)
    return ctx


_OPS = {
    "add": FieldCtx.add,
    "sub": FieldCtx.sub,
    "mul": FieldCtx.mul,
    "neg": lambda ctx, a, _b=None: ctx.neg(a),
    "inv": lambda ctx, a, _b=None: ctx.inv(a),
    "pow": FieldCtx.pow,
}


def field_arith(ctx, op, a, b=None):
    """Apply one of add, sub, mul, neg, inv, pow to elements of ctx."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise FieldError(f"unknown field operation {op!r}") from None
    ctx.check(a)
    if op not in ("pow", "neg", "inv"):
        ctx.check(b)
    return fn(ctx, a, b)


def trace(ctx, a):
    """Absolute trace of a, as a residue in [0, p)."""
    return ctx.trace(ctx.check(a))


def add_char(ctx, a):
    """chi(a) = exp(2 pi i Tr(a) / p)."""
    value = ctx.chi(ctx.check(a))
    return complex(value) if np.ndim(value) == 0 else value


def quad_char(ctx, a):
    """eta(a) in {-1, 0, +1}, with eta(0) = 0."""
    value = ctx.eta(ctx.check(a))
    return int(value) if np.ndim(value) == 0 else value
