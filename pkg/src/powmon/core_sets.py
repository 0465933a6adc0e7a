"""Finite subsets of the non-negative integers that contain 0.

Sets are stored as Python ints used as occupancy bit-vectors: bit ``i`` is
set iff ``i`` is an element.  A sumset is then an OR of shifted copies of
one operand, one shift per element of the other.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import CapacityExceeded, EmptySet, MissingZero, NegativeElement, ParseError

DEFAULT_CAPACITY = 2**20

_capacity = DEFAULT_CAPACITY


def get_capacity() -> int:
    return _capacity


def set_capacity(cap: int) -> None:
    """Set the largest element any operation may produce."""
    global _capacity
    if cap < 0:
        raise ValueError("capacity must be non-negative")
    _capacity = cap


def _check_cap(top: int) -> None:
    if top > _capacity:
        raise CapacityExceeded(f"element {top} exceeds capacity {_capacity}")


def sum_bits(a: int, b: int) -> int:
    """Sumset of two bit-vector encoded sets (no capacity check)."""
    if a.bit_count() > b.bit_count():
        a, b = b, a
    out = 0
    while a:
        low = a & -a
        out |= b << (low.bit_length() - 1)
        a ^= low
    return out


def reverse_bits(bits: int) -> int:
    return int(bin(bits)[:1:-1], 2)


def bits_to_elements(bits: int) -> tuple[int, ...]:
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return tuple(out)


@functools.total_ordering
class FinSet:
    """Immutable finite set X with 0 in X and X a subset of N.

    Equality and hashing are structural.  Ordering is by bit-vector value,
    which sorts by ``max`` first and then by the largest differing element.
    """

    __slots__ = ("_bits", "_elements")

    def __init__(self, bits: int):
        if not bits & 1:
            raise MissingZero("0 must be an element")
        self._bits = bits
        self._elements: tuple[int, ...] | None = None

    @classmethod
    def from_bits(cls, bits: int) -> FinSet:
        if bits <= 0:
            raise EmptySet("empty bit-vector")
        _check_cap(bits.bit_length() - 1)
        return cls(bits)

    @property
    def bits(self) -> int:
        return self._bits

    @property
    def elements(self) -> tuple[int, ...]:
        if self._elements is None:
            self._elements = bits_to_elements(self._bits)
        return self._elements

    @property
    def max(self) -> int:
        return self._bits.bit_length() - 1

    @property
    def positive_part(self) -> tuple[int, ...]:
        return self.elements[1:]

    def is_interval(self) -> bool:
        return self._bits & (self._bits + 1) == 0

    def __len__(self) -> int:
        return self._bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __contains__(self, x: object) -> bool:
        return isinstance(x, int) and x >= 0 and bool(self._bits >> x & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinSet):
            return NotImplemented
        return self._bits == other._bits

    def __lt__(self, other: FinSet) -> bool:
        if not isinstance(other, FinSet):
            return NotImplemented
        return self._bits < other._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __add__(self, other: FinSet) -> FinSet:
        return sumset(self, other)

    def __or__(self, other: FinSet) -> FinSet:
        return FinSet(self._bits | other._bits)

    def issubset(self, other: FinSet) -> bool:
        return self._bits & ~other._bits == 0

    def __str__(self) -> str:
        return format_finset(self)

    def __repr__(self) -> str:
        return "FinSet({" + ", ".join(map(str, self.elements)) + "})"

    def to_json(self) -> list[int]:
        return list(self.elements)


ZERO = FinSet(1)


def make_finset(values: Iterable[int]) -> FinSet:
    """Canonical FinSet from any iterable of integers (duplicates allowed)."""
    vals = set(values)
    if not vals:
        raise EmptySet("no values given")
    bits = 0
    for v in vals:
        if v < 0:
            raise NegativeElement(f"negative element {v}")
        _check_cap(v)
        bits |= 1 << v
    if not bits & 1:
        raise MissingZero(f"0 missing from {sorted(vals)}")
    return FinSet(bits)


def interval(k: int) -> FinSet:
    """The interval [0, k]."""
    if k < 0:
        raise NegativeElement(f"negative bound {k}")
    _check_cap(k)
    return FinSet((1 << (k + 1)) - 1)


def pair(k: int) -> FinSet:
    """The set {0, k}."""
    if k < 0:
        raise NegativeElement(f"negative element {k}")
    _check_cap(k)
    return FinSet(1 | 1 << k)


def parse_finset(text: str) -> FinSet:
    """Parse the literal format ``"0,2,3"``: strictly ascending, no repeats."""
    pos = 0
    prev = -1
    bits = 0
    if not text.strip():
        raise ParseError(text, 0, "empty set literal")
    for token in text.split(","):
        stripped = token.strip()
        at = pos + (len(token) - len(token.lstrip()))
        try:
            v = int(stripped)
        except ValueError:
            raise ParseError(text, at, f"not an integer: {stripped!r}") from None
        if v < 0:
            raise ParseError(text, at, f"negative element {v}")
        if v <= prev:
            reason = "duplicate element" if v == prev else "elements not ascending"
            raise ParseError(text, at, f"{reason} {v}")
        _check_cap(v)
        bits |= 1 << v
        prev = v
        pos += len(token) + 1
    if not bits & 1:
        raise ParseError(text, 0, "0 must be an element")
    return FinSet(bits)


def format_finset(x: FinSet) -> str:
    return ",".join(map(str, x.elements))


def sumset(x: FinSet, y: FinSet) -> FinSet:
    """X + Y = {a + b : a in X, b in Y}."""
    _check_cap(x.max + y.max)
    return FinSet(sum_bits(x.bits, y.bits))


def n_fold(x: FinSet, h: int) -> FinSet:
    """The h-fold sum hX, with 0X = {0}."""
    if h < 0:
        raise ValueError("h must be non-negative")
    _check_cap(h * x.max)
    result, base = 1, x.bits
    while h:
        if h & 1:
            result = sum_bits(result, base)
        h >>= 1
        if h:
            base = sum_bits(base, base)
    return FinSet(result)


def dilate(x: FinSet, k: int) -> FinSet:
    """k x X = {k*a : a in X} for k >= 1."""
    if k < 1:
        raise ValueError("dilation factor must be positive")
    _check_cap(k * x.max)
    bits = 0
    for a in x.elements:
        bits |= 1 << (k * a)
    return FinSet(bits)


def reversion(x: FinSet) -> FinSet:
    """max X - X."""
    return FinSet(reverse_bits(x.bits))


def gap_set(x: FinSet) -> frozenset[int]:
    el = x.elements
    return frozenset(b - a for a, b in zip(el, el[1:]))


def max_gap(x: FinSet) -> int:
    return max(gap_set(x), default=0)


def max_gap_bits(bits: int) -> int:
    best = 0
    prev = 0
    bits >>= 1
    i = 1
    while bits:
        if bits & 1:
            best = max(best, i - prev)
            prev = i
        bits >>= 1
        i += 1
    return best


@dataclass(frozen=True)
class IntervalDecomposition:
    """The unique cover of a set by pairwise well-separated intervals.

    ``intervals`` holds closed ranges ``(lo, hi)`` in increasing order with
    ``next.lo >= prev.hi + 2``.  Decompositions of the empty set are never
    built because every FinSet contains 0.
    """

    intervals: tuple[tuple[int, int], ...]

    @property
    def dimension(self) -> int:
        return len(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def is_well_separated(self) -> bool:
        if any(lo > hi for lo, hi in self.intervals):
            return False
        return all(b[0] >= a[1] + 2 for a, b in zip(self.intervals, self.intervals[1:]))

    def union(self) -> FinSet:
        bits = 0
        for lo, hi in self.intervals:
            bits |= ((1 << (hi - lo + 1)) - 1) << lo
        return FinSet(bits)


def boxing_decomposition(x: FinSet) -> IntervalDecomposition:
    runs: list[tuple[int, int]] = []
    el = x.elements
    lo = prev = el[0]
    for v in el[1:]:
        if v != prev + 1:
            runs.append((lo, prev))
            lo = v
        prev = v
    runs.append((lo, prev))
    return IntervalDecomposition(tuple(runs))


def boxing_dim(x: FinSet) -> int:
    """Number of maximal runs of consecutive elements."""
    b = x.bits
    # a run starts at every set bit whose lower neighbour is clear
    return (b & ~(b << 1)).bit_count()


def iter_finsets(bound: int) -> Iterator[FinSet]:
    """Every FinSet with max <= bound, in canonical (bit-vector) order."""
    for bits in range(1, 1 << (bound + 1), 2):
        yield FinSet(bits)


def iter_level(k: int) -> Iterator[FinSet]:
    """Every FinSet X with max X = k, in canonical order."""
    if k == 0:
        yield ZERO
        return
    top = 1 << k
    for mid in range(1 << (k - 1)):
        yield FinSet(top | mid << 1 | 1)
