"""Numerical monoids: submonoids of (N, +) with finite complement."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

from .errors import EmptyGenerators, NotCoprime, ParseError


def _reach_bound(gens: tuple[int, ...]) -> int:
    # Any coprime pair p, q in the generators gives frobenius <= p*q - p - q.
    # Without a coprime pair fall back to Schur: (g1 - 1)(gn - 1) - 1 < g1*gn.
    pairs = [p * q for p, q in itertools.combinations(gens, 2) if math.gcd(p, q) == 1]
    if 1 in gens:
        return 1
    return min(pairs) if pairs else gens[0] * gens[-1]


@dataclass(frozen=True)
class NumericalMonoid:
    generators: tuple[int, ...]
    gaps: tuple[int, ...]
    frobenius: int

    def __contains__(self, n: object) -> bool:
        if not isinstance(n, int) or n < 0:
            return False
        return n > self.frobenius or n not in self._gapset

    @property
    def _gapset(self) -> frozenset[int]:
        return frozenset(self.gaps)

    def to_dict(self) -> dict:
        return {"generators": list(self.generators), "gaps": list(self.gaps), "frobenius": self.frobenius}


def make_numerical_monoid(generators: Iterable[int]) -> NumericalMonoid:
    gens = tuple(sorted(set(generators)))
    if not gens:
        raise EmptyGenerators("at least one generator is required")
    if gens[0] < 1:
        raise ValueError(f"generators must be positive, got {gens[0]}")
    if math.gcd(*gens) != 1:
        raise NotCoprime(f"gcd{gens} = {math.gcd(*gens)}")
    bound = _reach_bound(gens)
    reach = [False] * (bound + 1)
    reach[0] = True
    for n in range(1, bound + 1):
        reach[n] = any(g <= n and reach[n - g] for g in gens)
    gaps = tuple(n for n in range(bound + 1) if not reach[n])
    return NumericalMonoid(gens, gaps, gaps[-1] if gaps else -1)


def parse_generators(text: str) -> NumericalMonoid:
    gens = []
    pos = 0
    for token in text.split(","):
        try:
            gens.append(int(token))
        except ValueError:
            raise ParseError(text, pos, f"not an integer: {token.strip()!r}") from None
        pos += len(token) + 1
    return make_numerical_monoid(gens)


def elements_up_to(s: NumericalMonoid, K: int) -> list[int]:
    if K < 0:
        raise ValueError("K must be non-negative")
    return [n for n in range(K + 1) if n in s]


def is_proper(s: NumericalMonoid) -> bool:
    return bool(s.gaps)
