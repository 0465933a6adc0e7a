"""Eventual structure of iterated sumsets kA.

For a finite A with gcd 1 and max a, kA eventually has the shape
``C | [c, k*a - d] | (k*a - D)`` with fixed exceptional sets C and D.  This
module computes the index from which ``(k+1)A = kA + B`` holds, extracts
(C, c, D, d) canonically, and exposes two explicit sumset identities used
by the automorphism search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core_sets import (
    FinSet,
    bits_to_elements,
    interval,
    make_finset,
    sum_bits,
    sumset,
)
from .errors import CapacityExceeded, NotSandwiched, TrivialSet

PERSISTENCE_WINDOW = 5


def _iteration_cap(a_hat: int) -> int:
    return 4 * a_hat * a_hat + 16


def normalize(a: FinSet) -> tuple[int, FinSet]:
    """Return (gcd A, A / gcd A).  gcd of {0} is reported as 1."""
    q = math.gcd(*a.elements) or 1
    if q == 1:
        return 1, a
    return q, make_finset(x // q for x in a.elements)


def stabilization_index(a: FinSet, b: FinSet, window: int = PERSISTENCE_WINDOW) -> int:
    """Smallest k >= 0 with (k+1)A = kA + B, where {0, max A} <= B <= A.

    The equation is re-checked for the next ``window`` values of k.
    """
    if not (b.issubset(a) and a.max in b):
        raise NotSandwiched(f"{{0, {a.max}}} <= B <= A fails for A={a}, B={b}")
    _, a_hat = normalize(a)
    cap = _iteration_cap(a_hat.max)
    cur = 1  # 0A
    for k in range(cap + 1):
        nxt = sum_bits(cur, a.bits)
        if nxt == sum_bits(cur, b.bits):
            _check_persistence(a.bits, b.bits, nxt, k, window)
            return k
        cur = nxt
    raise CapacityExceeded(f"no stabilization for A={a}, B={b} within k <= {cap}")


def _check_persistence(a: int, b: int, next_fold: int, k: int, window: int) -> None:
    cur = next_fold  # (k+1)A
    for j in range(k + 1, k + 1 + window):
        nxt = sum_bits(cur, a)
        if nxt != sum_bits(cur, b):
            raise AssertionError(f"persistence broke at k={j}")
        cur = nxt


@dataclass(frozen=True)
class NathansonStructure:
    """Parameters of kA' = C | [c, k*a' - d] | (k*a' - D), with A' = A / q."""

    q: int
    C: tuple[int, ...]
    c: int
    D: tuple[int, ...]
    d: int
    k_star: int
    k0: int
    a_hat: int

    def predicted_bits(self, k: int) -> int:
        top = k * self.a_hat
        bits = 0
        for x in self.C:
            bits |= 1 << x
        if self.c <= top - self.d:
            bits |= ((1 << (top - self.d - self.c + 1)) - 1) << self.c
        for x in self.D:
            if top - x >= 0:
                bits |= 1 << (top - x)
        return bits

    def predicted(self, k: int) -> FinSet:
        """The formula's value for k times the normalized set."""
        return FinSet(self.predicted_bits(k))

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "C": list(self.C),
            "c": self.c,
            "D": list(self.D),
            "d": self.d,
            "k_star": self.k_star,
            "k0": self.k0,
        }


def _split_gaps(bits: int, top: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Gaps of a set in [0, top] split into low ones and mirrored high ones."""
    low, high = [], []
    missing = ~bits & ((1 << (top + 1)) - 1)
    for g in bits_to_elements(missing):
        if g < top - g:
            low.append(g)
        else:
            high.append(top - g)
    return tuple(low), tuple(sorted(high))


def nathanson_structure(a: FinSet, window: int = PERSISTENCE_WINDOW) -> NathansonStructure:
    """Extract (C, c, D, d) for A / gcd A.

    ``k_star`` is the (at least 1) index from which (k+1)A' = kA' + {0, a'}
    holds; ``k0`` is the least k >= 1 from which the formula holds with a
    non-empty middle interval [c, k*a' - d].
    """
    if a.max == 0:
        raise TrivialSet("A = {0} has no eventual structure")
    q, a_hat_set = normalize(a)
    ah = a_hat_set.max
    k_star = max(1, stabilization_index(a_hat_set, FinSet(1 | 1 << ah), window))
    cap = _iteration_cap(ah)

    folds = {}  # k -> bits of kA'

    def fold(k: int) -> int:
        if k not in folds:
            folds[k] = 1 if k == 0 else sum_bits(fold(k - 1), a_hat_set.bits)
        return folds[k]

    k = k_star
    while True:
        if k > cap:
            raise CapacityExceeded(f"structure of {a} not found within k <= {cap}")
        low, high = _split_gaps(fold(k), k * ah)
        low2, high2 = _split_gaps(fold(k + 1), (k + 1) * ah)
        c = low[-1] + 1 if low else 0
        d = high[-1] + 1 if high else 0
        if low == low2 and high == high2 and c <= k * ah - d:
            break
        k += 1

    C = tuple(x for x in bits_to_elements(fold(k)) if x < c)
    D = tuple(sorted(k * ah - x for x in bits_to_elements(fold(k)) if x > k * ah - d))
    s = NathansonStructure(q, C, c, D, d, k_star, k, ah)

    for j in range(k, k + window + 1):
        if s.predicted_bits(j) != fold(j):
            raise AssertionError(f"formula fails at k={j} for {a}")
    # k0: least k >= 1 from which the formula holds with a non-empty middle run
    k0 = k
    while k0 > 1 and c <= (k0 - 1) * ah - d and s.predicted_bits(k0 - 1) == fold(k0 - 1):
        k0 -= 1
    return NathansonStructure(q, C, c, D, d, k_star, k0, ah)


def stabilization_bound(a: FinSet) -> int:
    """max(k0, ceil(1 + (c + d) / a')): an upper bound on the stabilization index."""
    s = nathanson_structure(a)
    return max(s.k0, 1 + -(-(s.c + s.d) // s.a_hat))


def interval_absorb(x: FinSet, k: int) -> FinSet:
    """X + [0, k]; equals [0, k + max X] whenever k >= max X."""
    out = sumset(x, interval(k))
    if k >= x.max:
        assert out == interval(k + x.max)
    return out


def special_block(a: int, n: int) -> FinSet:
    """{0} | [a, n*a + n(n+1)/2]."""
    hi = n * a + n * (n + 1) // 2
    if a == 0:
        return interval(hi)
    return FinSet(1 | ((1 << (hi - a + 1)) - 1) << a)


def special_sum(a: int, n: int) -> FinSet:
    """Sum of {0, a+i, a+i+1} for i = 0..n-1.

    For n >= a + 1 the result is checked against {0} | [a, n*a + n(n+1)/2].
    """
    if n < 1:
        raise ValueError("n must be positive")
    out = FinSet(1)
    for i in range(n):
        out = out + make_finset([0, a + i, a + i + 1])
    if n >= a + 1:
        assert out == special_block(a, n)
    return out
