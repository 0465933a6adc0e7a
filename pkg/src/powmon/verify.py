"""Exhaustive and seeded-random checks of the sumset identities.

Each suite returns a :class:`SuiteResult`; the first counterexample (if any)
is kept verbatim so the CLI can print it.  Default bounds are the desk-scale
ones the acceptance tests use.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .core_sets import (
    FinSet,
    boxing_decomposition,
    boxing_dim,
    interval,
    iter_finsets,
    make_finset,
    max_gap,
    n_fold,
    pair,
    reversion,
)
from .structure import (
    PERSISTENCE_WINDOW,
    nathanson_structure,
    normalize,
    special_block,
    stabilization_bound,
    stabilization_index,
)

DEFAULT_SAMPLES = 10_000


@dataclass
class SuiteResult:
    suite: str
    checked: int
    unit: str
    failures: list[str] = field(default_factory=list)
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        return f"checked {self.checked} {self.unit}"

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "checked": self.checked,
            "unit": self.unit,
            "ok": self.ok,
            "failures": self.failures,
            "seed": self.seed,
        }


def _random_finset(rng: random.Random, bound: int) -> FinSet:
    """0 plus each of 1..bound independently, at a density drawn per set."""
    p = rng.random()
    bits = 1
    for i in range(1, bound + 1):
        if rng.random() < p:
            bits |= 1 << i
    return FinSet(bits)


def _subsets_between(a: FinSet) -> Iterator[FinSet]:
    """Every B with {0, max A} <= B <= A."""
    inner = [x for x in a.elements if 0 < x < a.max]
    base = pair(a.max).bits
    for mask in range(1 << len(inner)):
        bits = base
        for i, x in enumerate(inner):
            if mask >> i & 1:
                bits |= 1 << x
        yield FinSet(bits)


def eq23(max_elem: int = 12, h_max: int | None = None) -> SuiteResult:
    """{0, m+h} <= X + [0,h] <= [0, m+h], strict on the right iff h <= max gap - 2."""
    h_max = max_elem + 2 if h_max is None else h_max
    res = SuiteResult("eq23", 0, "(X,h) pairs")
    for x in iter_finsets(max_elem):
        g = max_gap(x)
        for h in range(h_max + 1):
            y = x + interval(h)
            top = x.max + h
            res.checked += 1
            if not (pair(top).issubset(y) and y.issubset(interval(top))):
                res.failures.append(f"X={x} h={h}: X+[0,h]={y} escapes the sandwich")
            elif (y != interval(top)) != (h <= g - 2):
                res.failures.append(f"X={x} h={h}: strictness {y != interval(top)} but max gap {g}")
            if res.failures:
                return res
    return res


def prop31(max_n: int = 8) -> SuiteResult:
    """Sum of {0, a+i, a+i+1}, i < n, equals {0} | [a, na + n(n+1)/2] for n >= a+1."""
    res = SuiteResult("prop31", 0, "(a,n) pairs")
    for a in range(max_n):
        for n in range(a + 1, max_n + 1):
            total = make_finset([0])
            for i in range(n):
                total = total + make_finset([0, a + i, a + i + 1])
            res.checked += 1
            want = special_block(a, n)
            if total != want:
                res.failures.append(f"a={a} n={n}: sum={total} formula={want}")
                return res
    return res


def lemma_ftac(max_elem: int = 10, window: int = PERSISTENCE_WINDOW) -> SuiteResult:
    """(k+1)A = kA + B stabilizes, persists, and does so by stabilization_bound(A)."""
    res = SuiteResult("lemma-ftac", 0, "(A,B) pairs")
    for a in iter_finsets(max_elem):
        if a.max == 0:
            continue
        bound = stabilization_bound(a)
        for b in _subsets_between(a):
            res.checked += 1
            try:
                k = stabilization_index(a, b, window)
            except AssertionError as exc:
                res.failures.append(f"A={a} B={b}: {exc}")
                return res
            if k > bound:
                res.failures.append(f"A={a} B={b}: index {k} exceeds bound {bound}")
                return res
    return res


def nathanson(max_elem: int = 9, window: int = PERSISTENCE_WINDOW) -> SuiteResult:
    """Extracted (C, c, D, d) reproduce kA' for k0 <= k <= k0 + window."""
    res = SuiteResult("nathanson", 0, "sets")
    for a in iter_finsets(max_elem):
        if a.max == 0:
            continue
        s = nathanson_structure(a)
        _, a_hat = normalize(a)
        res.checked += 1
        if any(x > s.c - 2 for x in s.C) or any(x > s.d - 2 for x in s.D):
            res.failures.append(f"A={a}: C={s.C} or D={s.D} reaches past c-2 / d-2")
            return res
        for k in range(s.k0, s.k0 + window + 1):
            if s.predicted(k) != n_fold(a_hat, k):
                res.failures.append(f"A={a} k={k}: predicted {s.predicted(k)} actual {n_fold(a_hat, k)}")
                return res
    return res


def rev(max_elem: int = 30, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> SuiteResult:
    """rev is an involution and additive on seeded random pairs."""
    rng = random.Random(seed)
    res = SuiteResult("rev", 0, "random pairs", seed=seed)
    for _ in range(samples):
        x, y = _random_finset(rng, max_elem), _random_finset(rng, max_elem)
        res.checked += 1
        if reversion(reversion(x)) != x:
            res.failures.append(f"X={x}: rev(rev X) = {reversion(reversion(x))}")
        elif reversion(x + y) != reversion(x) + reversion(y):
            res.failures.append(f"X={x} Y={y}: rev(X+Y) = {reversion(x + y)}")
        if res.failures:
            return res
    return res


def idempotent(max_elem: int = 12) -> SuiteResult:
    """2X = X only for X = {0}."""
    res = SuiteResult("idempotent", 0, "sets")
    for x in iter_finsets(max_elem):
        res.checked += 1
        if (x + x == x) != (x.max == 0):
            res.failures.append(f"X={x}: 2X = {x + x}")
            return res
    return res


def bdim(max_elem: int = 40, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> SuiteResult:
    """Decompositions are well separated and exact; bdim is subadditive on unions."""
    rng = random.Random(seed)
    res = SuiteResult("bdim", 0, "random pairs", seed=seed)
    for _ in range(samples):
        x, y = _random_finset(rng, max_elem), _random_finset(rng, max_elem)
        res.checked += 1
        for z in (x, y, x | y):
            dec = boxing_decomposition(z)
            if not dec.is_well_separated() or dec.union() != z or dec.dimension != boxing_dim(z):
                res.failures.append(f"X={z}: decomposition {dec.intervals} is not a well-separated cover")
                return res
        if boxing_dim(x | y) > boxing_dim(x) + boxing_dim(y):
            res.failures.append(f"X={x} Y={y}: bdim(X|Y) = {boxing_dim(x | y)}")
            return res
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "eq23": eq23,
    "prop31": prop31,
    "lemma-ftac": lemma_ftac,
    "nathanson": nathanson,
    "rev": rev,
    "idempotent": idempotent,
    "bdim": bdim,
}
SEEDED = {"rev", "bdim"}


def run_suite(name: str, max_value: int | None = None, seed: int = 0, samples: int = DEFAULT_SAMPLES) -> SuiteResult:
    """Run a suite by name; ``max_value`` overrides its default bound."""
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    kwargs: dict = {}
    if max_value is not None:
        if max_value < 0:
            raise ValueError("--max must be non-negative")
        kwargs["max_n" if name == "prop31" else "max_elem"] = max_value
    if name in SEEDED:
        kwargs.update(seed=seed, samples=samples)
    return fn(**kwargs)
