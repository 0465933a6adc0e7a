"""Bounded search for automorphisms of the reduced power monoid.

The search builds every injective table f on the truncation
``{X : max X <= K}`` (or ``{X subset of S : max X <= K}`` for a numerical
monoid S) that is additive on all in-range pairs, and keeps the tables
satisfying the enabled assignment rules:

    R1  max f(X) = max X
    R2  f({0,k}) = {0,k} and f([0,k]) = [0,k]
    R3  max gap f(X) = max gap X
    R4  1 in X  =>  1 in f(X)                     (identity branch)
    R5  f({0,a,a+1}) = {0,a,a+1}                  (identity branch)
    R6  f({0} | [a, na + n(n+1)/2]) fixed, n>=a+1  (identity branch)
    R7  f({0,2,3}) = {0,2,3}, or {0,1,3} on the reversion branch

The reversion branch evaluates the identity-branch rules on (X, rev f(X)).

Sets are visited by increasing bit-vector value, so every summand of a set
is assigned before the set itself; a set with a decomposition U + V has its
image forced to f(U) + f(V), and each assignment f(X) = Y also requires
Y + f(U) to stay in the domain whenever X + U does.  Sets that are never a
summand in range (the top of the truncation, mostly) face no additivity
constraint at all.  Their images are settled last as a bipartite matching:
the number of completions is counted exactly, and the tables are listed only
when there are at most ``limit`` of them.  Past small K these free top sets
make the survivor count grow factorially, which is an artifact of the
truncation rather than a statement about the untruncated monoid.

With ``prune=True`` the rules shrink each set's candidate list before the
backtracking starts.  With ``prune=False`` they are applied only to finished
tables; both modes must return the same survivors.
"""
from __future__ import annotations

import functools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable

from .core_sets import (
    FinSet,
    iter_level,
    max_gap_bits,
    reverse_bits,
    sum_bits,
)
from .errors import InvalidBound, NotProper, SearchInconsistency
from .morphisms import EndoMap, reversal_of
from .nummon import NumericalMonoid, elements_up_to, is_proper

ALL_RULES = ("R1", "R2", "R3", "R4", "R5", "R6", "R7")
IDENTITY_ONLY = frozenset({"R4", "R5", "R6"})
PROBE_RULES = frozenset({"R1", "R3"})
COUNTER_KEYS = ALL_RULES + ("hom", "inj")
BRANCHES = ("identity", "both")

_TRIPLE = 0b1101  # {0,2,3}
_TRIPLE_REV = 0b1011  # {0,1,3}


@dataclass(frozen=True)
class LevelFamily:
    """All X with {0, k} <= X <= [0, k]."""

    k: int
    sets: tuple[FinSet, ...]

    def __len__(self) -> int:
        return len(self.sets)


def enumerate_level(k: int) -> LevelFamily:
    if k < 0:
        raise InvalidBound(f"level {k} is negative")
    return LevelFamily(k, tuple(iter_level(k)))


def _is_pair(b: int) -> bool:
    return (b & (b - 1)) == 1 or b == 1


def _is_interval(b: int) -> bool:
    return b & (b + 1) == 0


def _is_staircase(b: int) -> bool:
    """{0, a, a+1} with a >= 1."""
    rest = b >> 1
    if b & 1 == 0 or rest == 0:
        return False
    low = rest & -rest
    return rest == low * 3


def _is_special_block(b: int) -> bool:
    """{0} | [a, n*a + n(n+1)/2] for some n >= a + 1."""
    if _is_interval(b):
        # a in {0, 1}: [0, m] is such a block iff m is a triangular number
        # (a=0) or m = n + n(n+1)/2 with n >= 2 (a=1)
        m = b.bit_length() - 1
        candidates = [0, 1]
    else:
        rest = b >> 1
        low = rest & -rest
        a = low.bit_length()
        run = rest >> (a - 1)
        if run & (run + 1):
            return False
        m = b.bit_length() - 1
        candidates = [a]
    for a in candidates:
        n = a + 1
        while n * a + n * (n + 1) // 2 <= m:
            if n * a + n * (n + 1) // 2 == m:
                return True
            n += 1
    return False


def _first_failure(x: int, y: int, rules: frozenset[str]) -> str | None:
    """Identity-branch rule check on bit-vectors; returns failing rule id."""
    if "R1" in rules and x.bit_length() != y.bit_length():
        return "R1"
    if "R2" in rules and (_is_pair(x) or _is_interval(x)) and y != x:
        return "R2"
    if "R3" in rules and max_gap_bits(x) != max_gap_bits(y):
        return "R3"
    if "R4" in rules and x & 2 and not y & 2:
        return "R4"
    if "R5" in rules and _is_staircase(x) and y != x:
        return "R5"
    if "R6" in rules and y != x and _is_special_block(x):
        return "R6"
    if "R7" in rules and x == _TRIPLE and y != _TRIPLE:
        return "R7"
    return None


def _check_bits(x: int, y: int, branch: str, rules: frozenset[str]) -> str | None:
    if branch == "reversion":
        y = reverse_bits(y)
    elif branch != "identity":
        raise ValueError(f"unknown branch {branch!r}")
    return _first_failure(x, y, rules)


def constraint_filter(
    x: FinSet, y: FinSet, branch: str = "identity", rules: Iterable[str] = ALL_RULES
) -> tuple[bool, str | None]:
    """Whether f(X) = Y passes every enabled rule; else the first failing rule."""
    rule = _check_bits(x.bits, y.bits, branch, frozenset(rules))
    return rule is None, rule


@dataclass
class SearchReport:
    """Outcome of one search.

    ``count`` is exact.  ``survivors`` lists the tables in canonical order when
    there are at most ``limit`` of them and is ``None`` otherwise.
    """

    K: int
    base: NumericalMonoid | None
    branch: str
    survivors: list[EndoMap] | None
    nodes: int
    prunes: dict[str, int]
    ms: int
    count: int = 0
    prune: bool = True
    raw_tables: int = 0

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "K": self.K,
            "base": "N" if self.base is None else {"generators": list(self.base.generators)},
            "branch": self.branch,
            "survivors": None if self.survivors is None else [s.to_dict() for s in self.survivors],
            "count": self.count,
            "nodes": self.nodes,
            "prunes": {k: self.prunes.get(k, 0) for k in COUNTER_KEYS},
            "ms": self.ms if timing else 0,
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), separators=(",", ":"))


@dataclass(frozen=True)
class _Spec:
    """Picklable description of one search problem.

    Each filter is a tuple of branches whose rules must all hold.  A pruned
    search takes exactly one filter; an unpruned one checks every filter
    against finished tables.
    """

    K: int
    gens: tuple[int, ...] | None
    filters: tuple[tuple[str, ...], ...]
    rules: frozenset[str]
    prune: bool
    limit: int | None


@dataclass
class _Problem:
    spec: _Spec
    domain: list[int]
    inside: set[int]
    decomps: dict[int, list[tuple[int, int]]]
    core: list[int]  # {0} and every set that is a summand of an in-range sum
    forced: list[int]  # decomposable sets that are never summands
    free: list[int]  # indecomposable sets that are never summands
    partners: dict[int, list[int]]
    allowed: list[dict[int, set[int]]]  # per filter
    candidates: dict[int, list[int]]
    static_prunes: dict[str, int]


def _domain_bits(K: int, gens: tuple[int, ...] | None) -> list[int]:
    if gens is None:
        return list(range(1, 1 << (K + 1), 2))
    from .nummon import make_numerical_monoid

    members = [m for m in elements_up_to(make_numerical_monoid(gens), K) if m > 0]
    out = []
    for mask in range(1 << len(members)):
        b = 1
        for i, m in enumerate(members):
            if mask >> i & 1:
                b |= 1 << m
        out.append(b)
    return sorted(out)


def _first_branch_failure(x: int, y: int, branches: tuple[str, ...], rules: frozenset[str]) -> str | None:
    for br in branches:
        rule = _check_bits(x, y, br, rules)
        if rule is not None:
            return rule
    return None


def _build(spec: _Spec) -> _Problem:
    domain = _domain_bits(spec.K, spec.gens)
    inside = set(domain)
    nonzero = domain[1:]
    decomps: dict[int, list[tuple[int, int]]] = {x: [] for x in domain}
    for i, u in enumerate(nonzero):
        mu = u.bit_length() - 1
        for v in nonzero[i:]:
            if mu + v.bit_length() - 1 > spec.K:
                continue
            s = sum_bits(u, v)
            if s in inside:
                decomps[s].append((u, v))

    summands = {u for ds in decomps.values() for pair in ds for u in pair}
    core = [x for x in domain if x == 1 or x in summands]
    leaves = [x for x in domain if x != 1 and x not in summands]
    pos = {x: i for i, x in enumerate(core)}
    partners: dict[int, list[int]] = {x: [] for x in core}
    for ds in decomps.values():
        for u, v in ds:
            first, second = sorted((u, v), key=pos.__getitem__)
            partners[second].append(first)

    allowed = [
        {x: {y for y in domain if _first_branch_failure(x, y, fl, spec.rules) is None} for x in domain}
        for fl in spec.filters
    ]
    idempotent = [y for y in domain if sum_bits(y, y) == y]
    static = {k: 0 for k in COUNTER_KEYS}
    candidates: dict[int, list[int]] = {}
    for x in domain:
        pool = idempotent if x == 1 else domain
        if spec.prune:
            candidates[x] = [y for y in pool if y in allowed[0][x]]
            if not decomps[x]:
                for y in pool:
                    rule = _first_branch_failure(x, y, spec.filters[0], spec.rules)
                    if rule is not None:
                        static[rule] += 1
        else:
            candidates[x] = list(pool)
    return _Problem(
        spec, domain, inside, decomps, core,
        [x for x in leaves if decomps[x]], [x for x in leaves if not decomps[x]],
        partners, allowed, candidates, static,
    )


@functools.lru_cache(maxsize=1 << 16)
def _component_matchings(rows: tuple[int, ...]) -> int:
    """Perfect matchings of rows into columns, by a DP over used-column masks."""
    ways = {0: 1}
    for r in sorted(rows, key=int.bit_count):
        nxt: dict[int, int] = {}
        for used, n in ways.items():
            free = r & ~used
            while free:
                b = free & -free
                free ^= b
                nxt[used | b] = nxt.get(used | b, 0) + n
        ways = nxt
    return sum(ways.values())


def _count_matchings(rows: list[int]) -> int:
    """Number of ways to give every row a distinct column from its mask."""
    if any(r == 0 for r in rows):
        return 0
    # split into column-connected components; each is counted separately
    groups: list[tuple[int, list[int]]] = []
    for r in rows:
        merged, cols = [r], r
        rest = []
        for gcols, grows in groups:
            if gcols & cols:
                cols |= gcols
                merged += grows
            else:
                rest.append((gcols, grows))
        # a later group may now touch the enlarged column set
        changed = True
        while changed:
            changed = False
            keep = []
            for gcols, grows in rest:
                if gcols & cols:
                    cols |= gcols
                    merged += grows
                    changed = True
                else:
                    keep.append((gcols, grows))
            rest = keep
        groups = rest + [(cols, merged)]
    total = 1
    for cols, grows in groups:
        if len(grows) > cols.bit_count():
            return 0
        # relabel columns to 0..m-1 so equal shapes share a cache entry
        index = {}
        c = cols
        while c:
            b = c & -c
            index[b] = len(index)
            c ^= b
        packed = []
        for r in grows:
            m = 0
            while r:
                b = r & -r
                m |= 1 << index[b]
                r ^= b
            packed.append(m)
        total *= _component_matchings(tuple(sorted(packed)))
        if not total:
            return 0
    return total


class _Engine:
    """Backtracking over the core; leaf images are counted, then listed if few."""

    def __init__(self, problem: _Problem):
        self.p = problem
        self.image: dict[int, int] = {}
        self.used: set[int] = set()
        self.nodes = 0
        self.raw = 0
        self.counts = {k: 0 for k in COUNTER_KEYS}
        nf = len(problem.spec.filters)
        self.totals = [0] * nf
        self.tables: list[list[tuple[int, ...]] | None] = [[] for _ in range(nf)]

    def _forced(self, x: int) -> int | None:
        img = self.image
        ds = self.p.decomps[x]
        y = sum_bits(img[ds[0][0]], img[ds[0][1]])
        if y not in self.p.inside or any(sum_bits(img[u], img[v]) != y for u, v in ds[1:]):
            return None
        return y

    def _rule_reject(self, x: int, y: int) -> bool:
        p = self.p
        if p.spec.prune and y not in p.allowed[0][x]:
            self.counts[_first_branch_failure(x, y, p.spec.filters[0], p.spec.rules)] += 1
            return True
        return False

    def usable(self, i: int) -> list[int]:
        """Images the i-th core set can take given the current partial table."""
        p = self.p
        x = p.core[i]
        if p.decomps[x]:
            y = self._forced(x)
            if y is None:
                self.counts["hom"] += 1
                return []
            if self._rule_reject(x, y):
                return []
            opts = [y]
        else:
            opts = p.candidates[x]
        known = [self.image.get(u) for u in p.partners[x]]
        out = []
        for y in opts:
            if y in self.used:
                self.counts["inj"] += 1
            elif any(sum_bits(y if fu is None else fu, y) not in p.inside for fu in known):
                self.counts["hom"] += 1
            else:
                out.append(y)
        return out

    def assign(self, x: int, y: int) -> None:
        self.image[x] = y
        self.used.add(y)
        self.nodes += 1

    def unassign(self, x: int) -> None:
        self.used.discard(self.image.pop(x))

    def run(self, i: int = 0) -> None:
        if i == len(self.p.core):
            self.complete()
            return
        x = self.p.core[i]
        for y in self.usable(i):
            self.assign(x, y)
            self.run(i + 1)
            self.unassign(x)

    def complete(self) -> None:
        p = self.p
        added = []
        try:
            for x in p.forced:
                y = self._forced(x)
                if y is None:
                    self.counts["hom"] += 1
                    return
                if y in self.used:
                    self.counts["inj"] += 1
                    return
                if self._rule_reject(x, y):
                    return
                self.assign(x, y)
                added.append(x)
            self._leaves()
        finally:
            for x in added:
                self.unassign(x)

    def _leaves(self) -> None:
        p = self.p
        rest = [y for y in p.domain if y not in self.used]
        self.raw += math.factorial(len(p.free))
        for k, allowed in enumerate(p.allowed):
            if not p.spec.prune and any(y not in allowed[x] for x, y in self.image.items()):
                continue
            rows = [sum(1 << j for j, y in enumerate(rest) if y in allowed[x]) for x in p.free]
            n = _count_matchings(rows)
            if not n:
                continue
            self.totals[k] += n
            if self.tables[k] is None:
                continue
            if p.spec.limit is not None and self.totals[k] > p.spec.limit:
                self.tables[k] = None
                continue
            self._list(k, 0, rest)

    def _list(self, k: int, j: int, rest: list[int]) -> None:
        p = self.p
        if j == len(p.free):
            self.tables[k].append(tuple(self.image[x] for x in p.domain))
            return
        x = p.free[j]
        for idx, y in enumerate(rest):
            if y in p.allowed[k][x]:
                self.image[x] = y
                self._list(k, j + 1, rest[:idx] + rest[idx + 1:])
                del self.image[x]


def _prefix(engine: _Engine) -> tuple[int, list[int]]:
    """Assign core sets with a single usable image, up to the first branching."""
    i = 0
    core = engine.p.core
    while i < len(core):
        opts = engine.usable(i)
        if len(opts) != 1:
            return i, opts
        engine.assign(core[i], opts[0])
        i += 1
    return i, []


_Result = tuple[int, dict[str, int], int, list[int], list]


def _subtree(args: tuple[_Spec, int]) -> _Result:
    spec, choice = args
    e = _Engine(_build(spec))
    i, _ = _prefix(e)
    e.nodes = 0
    e.counts = {k: 0 for k in COUNTER_KEYS}
    e.assign(e.p.core[i], choice)
    e.run(i + 1)
    return e.nodes, e.counts, e.raw, e.totals, e.tables


def _run_spec(spec: _Spec, threads: int) -> tuple[_Problem, _Result]:
    """Run one search; subtrees below the first branching set may run in parallel."""
    problem = _build(spec)
    e = _Engine(problem)
    i, opts = _prefix(e)
    counts = dict(problem.static_prunes)
    for k, v in e.counts.items():
        counts[k] += v
    if i == len(problem.core):
        e.run(i)
        for k, v in e.counts.items():
            counts[k] = problem.static_prunes[k] + v
        return problem, (e.nodes, counts, e.raw, e.totals, e.tables)
    jobs = [(spec, y) for y in opts]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_subtree, jobs))
    else:
        results = [_subtree(j) for j in jobs]
    nodes, raw = e.nodes, 0
    nf = len(spec.filters)
    totals = [0] * nf
    tables: list[list | None] = [[] for _ in range(nf)]
    for n, c, r, t, tb in results:
        nodes += n
        raw += r
        for k, v in c.items():
            counts[k] += v
        for k in range(nf):
            totals[k] += t[k]
            if tables[k] is not None and tb[k] is not None:
                tables[k].extend(tb[k])
            else:
                tables[k] = None
    for k in range(nf):
        if spec.limit is not None and totals[k] > spec.limit:
            tables[k] = None
    return problem, (nodes, counts, raw, totals, tables)


def _threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("POWMON_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("POWMON_THREADS must be a positive integer")
        return n
    return 1


def _tables_to_maps(K: int, domain: list[int], tables: Iterable[tuple[int, ...]]) -> list[EndoMap]:
    keys = [FinSet(x) for x in domain]
    return [EndoMap(K, {x: FinSet(y) for x, y in zip(keys, t)}) for t in tables]


def _canonical(maps: Iterable[EndoMap]) -> list[EndoMap]:
    uniq = {m.encoding(): m for m in maps}
    return [uniq[k] for k in sorted(uniq)]


@dataclass
class _Outcome:
    totals: list[int]
    maps: list[list[EndoMap] | None]
    nodes: int
    counts: dict[str, int]
    raw: int


def _search(
    K: int,
    gens: tuple[int, ...] | None,
    filters: tuple[tuple[str, ...], ...],
    rules: frozenset[str],
    prune: bool,
    threads: int,
    limit: int | None,
) -> _Outcome:
    if prune:
        specs = [_Spec(K, gens, (fl,), rules, True, limit) for fl in filters]
    else:
        specs = [_Spec(K, gens, filters, rules, False, limit)]
    out = _Outcome([], [], 0, {k: 0 for k in COUNTER_KEYS}, 0)
    for spec in specs:
        problem, (nodes, counts, raw, totals, tables) = _run_spec(spec, threads)
        out.nodes += nodes
        out.raw += raw
        for k, v in counts.items():
            out.counts[k] += v
        out.totals += totals
        out.maps += [None if t is None else _tables_to_maps(K, problem.domain, t) for t in tables]
    return out


DEFAULT_LIMIT = 100_000


def search_automorphisms(
    K: int,
    branch: str = "both",
    prune: bool = True,
    rules: Iterable[str] = ALL_RULES,
    threads: int | None = None,
    limit: int | None = DEFAULT_LIMIT,
) -> SearchReport:
    """All automorphism candidates on the truncation max X <= K.

    ``branch="identity"`` keeps the tables fixing {0,2,3}.  ``"both"`` adds
    the reversion branch, searched directly and cross-checked against the
    reversals of the identity-branch survivors.  Survivors are listed only
    when there are at most ``limit`` of them; the count is always exact.
    """
    if K < 0:
        raise InvalidBound(f"K = {K} is negative")
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    rules = frozenset(rules)
    threads = _threads(threads)
    start = time.perf_counter()
    if branch == "identity":
        res = _search(K, None, (("identity",),), rules, prune, threads, limit)
        count, survivors = res.totals[0], res.maps[0]
    else:
        res = _search(K, None, (("identity",), ("reversion",)), rules, prune, threads, limit)
        n_id, n_rev = res.totals
        ident, rev = res.maps
        if n_id != n_rev:
            raise SearchInconsistency(f"identity branch has {n_id} survivors, reversion branch {n_rev}")
        if ident is not None and rev is not None:
            mirrored = {reversal_of(f).encoding() for f in ident}
            direct = {f.encoding() for f in rev}
            if mirrored != direct:
                raise SearchInconsistency("reversal image differs from the direct reversion search")
            survivors = _canonical(ident + rev)
            count = len(survivors)
        else:
            both = _search(K, None, (("identity", "reversion"),), rules, prune, threads, limit)
            res.nodes += both.nodes
            res.raw += both.raw
            for k, v in both.counts.items():
                res.counts[k] += v
            count = n_id + n_rev - both.totals[0]
            survivors = None
        if limit is not None and count > limit:
            survivors = None
    ms = int((time.perf_counter() - start) * 1000)
    if survivors is not None:
        survivors = _canonical(survivors)
    return SearchReport(K, None, branch, survivors, res.nodes, res.counts, ms, count, prune, res.raw)


def branch_survivors(
    K: int,
    branch: str,
    prune: bool = True,
    rules: Iterable[str] = ALL_RULES,
    threads: int | None = None,
    limit: int | None = DEFAULT_LIMIT,
) -> tuple[int, list[EndoMap] | None]:
    """Count and (when at most ``limit``) canonical list for one branch alone.

    ``branch`` is "identity" or "reversion"; the reversion branch is the
    direct search, not the mirror of the identity branch.
    """
    if branch not in ("identity", "reversion"):
        raise ValueError(f"branch must be identity or reversion, got {branch!r}")
    if K < 0:
        raise InvalidBound(f"K = {K} is negative")
    res = _search(K, None, ((branch,),), frozenset(rules), prune, _threads(threads), limit)
    maps = res.maps[0]
    return res.totals[0], None if maps is None else _canonical(maps)


def conjecture_probe(
    s: NumericalMonoid,
    K: int,
    prune: bool = True,
    rules: Iterable[str] = PROBE_RULES,
    threads: int | None = None,
    check_bound: bool = True,
    limit: int | None = DEFAULT_LIMIT,
) -> SearchReport:
    """Automorphism candidates of the truncated power monoid of S.

    Only R1 and R3 are enabled by default; the other rules are derived for
    N and can be switched on through ``rules`` for experiments.
    """
    if not is_proper(s):
        raise NotProper("S = N has no gaps; search N directly")
    if K < 0 or (check_bound and K < s.frobenius + 2):
        raise InvalidBound(f"K = {K} must be at least frobenius + 2 = {s.frobenius + 2}")
    rules = frozenset(rules)
    start = time.perf_counter()
    res = _search(K, s.generators, (("identity",),), rules, prune, _threads(threads), limit)
    branch = "identity" if rules & (IDENTITY_ONLY | {"R7"}) else "both"
    survivors = None if res.maps[0] is None else _canonical(res.maps[0])
    ms = int((time.perf_counter() - start) * 1000)
    return SearchReport(K, s, branch, survivors, res.nodes, res.counts, ms, res.totals[0], prune, res.raw)


def restriction(f_name: str, K: int, gens: tuple[int, ...] | None = None) -> EndoMap:
    """Identity or reversion table on the same domain the search uses."""
    domain = _domain_bits(K, gens)
    if f_name == "identity":
        return _tables_to_maps(K, domain, [tuple(domain)])[0]
    if f_name == "reversion":
        return _tables_to_maps(K, domain, [tuple(reverse_bits(x) for x in domain)])[0]
    raise ValueError(f_name)
