"""Finite tables of endomorphisms of the reduced power monoid.

An :class:`EndoMap` is a total table on a finite domain, normally every
FinSet with ``max <= K``.  Homomorphism consistency can only be checked for
pairs whose sum stays inside the domain, so every structural assertion
here is restricted to ``max X <= K // 2``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, NamedTuple

from .core_sets import (
    FinSet,
    dilate,
    iter_finsets,
    make_finset,
    pair,
    reversion,
    sum_bits,
)
from .errors import InconsistentTable, NotMaxPreserving

UNIT_PAIR = pair(1)


def json_key(x: FinSet) -> tuple[int, tuple[int, ...]]:
    """Order used in JSON output: by max, then lexicographically."""
    return x.max, x.elements


class EndoMap:
    """Immutable table X -> f(X) over a finite domain of FinSets."""

    __slots__ = ("K", "_table")

    def __init__(self, K: int, table: Mapping[FinSet, FinSet]):
        self.K = K
        self._table = dict(sorted(table.items()))

    def __call__(self, x: FinSet) -> FinSet:
        return self._table[x]

    def __contains__(self, x: FinSet) -> bool:
        return x in self._table

    def __len__(self) -> int:
        return len(self._table)

    @property
    def domain(self) -> list[FinSet]:
        return list(self._table)

    def items(self):
        return self._table.items()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EndoMap):
            return NotImplemented
        return self.K == other.K and self._table == other._table

    def __hash__(self) -> int:
        return hash((self.K, tuple(self._table.items())))

    def __repr__(self) -> str:
        return f"EndoMap(K={self.K}, size={len(self._table)})"

    def fixed_points(self) -> list[FinSet]:
        return [x for x, y in self._table.items() if x == y]

    def is_max_preserving(self) -> bool:
        return all(x.max == y.max for x, y in self._table.items())

    def is_level_bijective(self) -> bool:
        return all(_level_bijective(self, k) for k in range(self.K + 1))

    def inverse(self) -> EndoMap:
        """Inverse table; defined only when every level is mapped bijectively."""
        if not self.is_level_bijective():
            raise InconsistentTable("inverse needs a level-bijective table")
        return EndoMap(self.K, {y: x for x, y in self._table.items()})

    def to_dict(self) -> dict:
        entries = sorted(self._table.items(), key=lambda kv: json_key(kv[0]))
        return {
            "K": self.K,
            "entries": [{"x": x.to_json(), "fx": y.to_json()} for x, y in entries],
        }

    def encoding(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> EndoMap:
        table = {make_finset(e["x"]): make_finset(e["fx"]) for e in data["entries"]}
        return cls(data["K"], table)


def tabulate(fn: Callable[[FinSet], FinSet], K: int, domain: Iterable[FinSet] | None = None) -> EndoMap:
    if domain is None:
        domain = iter_finsets(K)
    return EndoMap(K, {x: fn(x) for x in domain})


def endo_identity(K: int) -> EndoMap:
    return tabulate(lambda x: x, K)


def endo_reversion(K: int) -> EndoMap:
    return tabulate(reversion, K)


def augmentation(c: int, K: int) -> EndoMap:
    """Lift of the base endomorphism x -> c*x, i.e. X -> c x X."""
    if c < 0:
        raise ValueError("c must be non-negative")
    if c == 0:
        return tabulate(lambda x: FinSet(1), K)
    return tabulate(lambda x: dilate(x, c), K)


def dilate_of(f: EndoMap, k: int) -> EndoMap:
    """X -> k x f(X)."""
    return EndoMap(f.K, {x: dilate(y, k) for x, y in f.items()})


def reversal_of(f: EndoMap) -> EndoMap:
    """X -> max X - f(X); needs max f(X) = max X everywhere."""
    table = {}
    for x, y in f.items():
        if y.max != x.max:
            raise NotMaxPreserving(f"max f({x}) = {y.max} != {x.max}")
        table[x] = reversion(y)
    return EndoMap(f.K, table)


def shift_double(f: EndoMap) -> EndoMap:
    """X -> {0, max f(X)} + f(X).

    Injective whenever f is.  Note this is generally *not* additive: for the
    identity, {0,3} + {0,1} maps to {0,1,3,4,5,7,8} while the sum of the
    images is [0, 8].
    """
    return EndoMap(f.K, {x: pair(y.max) + y for x, y in f.items()})


class Violation(NamedTuple):
    x: FinSet
    y: FinSet
    f_of_sum: FinSet
    sum_of_f: FinSet


def check_homomorphism(f: EndoMap) -> list[Violation]:
    """Every pair X <= Y with X + Y in the domain where f(X+Y) != f(X) + f(Y)."""
    dom = f.domain
    image = {x.bits: y.bits for x, y in f.items()}
    out = []
    for i, x in enumerate(dom):
        for y in dom[i:]:
            if x.max + y.max > f.K:
                continue
            s = sum_bits(x.bits, y.bits)
            if s not in image:
                continue
            expect = sum_bits(image[x.bits], image[y.bits])
            if image[s] != expect:
                out.append(Violation(x, y, FinSet(image[s]), FinSet(expect)))
    return out


@dataclass(frozen=True)
class EndoClassification:
    injective: bool
    fixes_unit_pair: bool
    level_surjective: bool
    level_bijective: bool
    max_scale: int


def _level(f: EndoMap, k: int) -> list[FinSet]:
    return [x for x in f.domain if x.max == k]


def _level_bijective(f: EndoMap, k: int) -> bool:
    lvl = _level(f, k)
    images = {f(x) for x in lvl}
    return len(images) == len(lvl) and images == set(lvl)


def level_bijective_upto(f: EndoMap, m: int) -> bool:
    return all(_level_bijective(f, k) for k in range(m + 1))


def classify_endo(f: EndoMap, check: bool = True) -> EndoClassification:
    """Injectivity, unit-pair, and per-level surjectivity/bijectivity flags.

    With ``check`` the table must pass :func:`check_homomorphism`.  On
    ``max X <= K // 2`` the law max f(X) = max X * max f({0,1}) is enforced.
    """
    if check:
        bad = check_homomorphism(f)
        if bad:
            v = bad[0]
            raise InconsistentTable(
                f"f({v.x}+{v.y}) = {v.f_of_sum} but f({v.x})+f({v.y}) = {v.sum_of_f}"
            )
    values = [y for _, y in f.items()]
    injective = len(set(values)) == len(values)
    has_unit = UNIT_PAIR in f
    h = f(UNIT_PAIR).max if has_unit else 0
    for x, y in f.items():
        if 2 * x.max <= f.K and y.max != h * x.max:
            raise InconsistentTable(f"max f({x}) = {y.max}, expected {h * x.max}")
    image = set(values)
    surjective = all(x in image for x in f.domain)
    return EndoClassification(
        injective=injective,
        fixes_unit_pair=has_unit and f(UNIT_PAIR) == UNIT_PAIR,
        level_surjective=surjective,
        level_bijective=f.is_level_bijective(),
        max_scale=h,
    )
