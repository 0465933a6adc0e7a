import json
import math

import pytest

from powmon.core_sets import interval, iter_finsets, make_finset, pair
from powmon.errors import NotSandwiched, TrivialSet
from powmon.structure import (
    interval_absorb,
    nathanson_structure,
    normalize,
    special_block,
    special_sum,
    stabilization_bound,
    stabilization_index,
)


def S(*xs):
    return make_finset(xs)


def brute_folds(a, kmax):
    """kA as Python sets for k = 0..kmax."""
    out = [{0}]
    for _ in range(kmax):
        out.append({x + y for x in out[-1] for y in a})
    return out


def brute_stab(a, b):
    folds = brute_folds(a, 60)
    for k in range(60):
        if folds[k + 1] == {x + y for x in folds[k] for y in b}:
            return k
    raise AssertionError("no stabilization")


def subsets_between(a):
    """Every B with {0, max A} <= B <= A."""
    inner = [x for x in a.elements if 0 < x < a.max]
    for mask in range(1 << len(inner)):
        yield make_finset([0, a.max] + [v for i, v in enumerate(inner) if mask >> i & 1])


class TestStabilizationIndex:
    def test_examples(self):
        assert stabilization_index(S(0, 2, 3), S(0, 2, 3)) == 0
        assert stabilization_index(S(0, 2, 3), S(0, 3)) == 2

    @pytest.mark.parametrize("n", range(2, 9))
    def test_interval_pair(self, n):
        assert stabilization_index(interval(n), pair(n)) == 1

    def test_not_sandwiched(self):
        with pytest.raises(NotSandwiched):
            stabilization_index(S(0, 2, 3), S(0, 2))
        with pytest.raises(NotSandwiched):
            stabilization_index(S(0, 2, 3), S(0, 1, 3))

    def test_matches_brute_force(self):
        for a in iter_finsets(7):
            for b in subsets_between(a):
                assert stabilization_index(a, b) == brute_stab(a.elements, b.elements)

    def test_monotone_in_b(self):
        for a in iter_finsets(8):
            top = stabilization_index(a, pair(a.max))
            for b in subsets_between(a):
                assert stabilization_index(a, b) <= top

    def test_bound_sound(self):
        for a in iter_finsets(10):
            if a.max:
                assert stabilization_index(a, pair(a.max)) <= stabilization_bound(a)

    def test_gcd_equivalence(self):
        for a in iter_finsets(9):
            if a.max == 0:
                continue
            q, ah = normalize(a)
            fa = brute_folds(a.elements, 6)
            fh = brute_folds(ah.elements, 6)
            for k in range(6):
                lhs = fa[k + 1] <= {x + y for x in fa[k] for y in (0, a.max)}
                rhs = fh[k + 1] <= {x + y for x in fh[k] for y in (0, ah.max)}
                assert lhs == rhs


class TestNathanson:
    def test_unit_pair(self):
        s = nathanson_structure(S(0, 1))
        assert (s.q, s.C, s.c, s.D, s.d, s.k0) == (1, (), 0, (), 0, 1)

    def test_023(self):
        s = nathanson_structure(S(0, 2, 3))
        assert (s.q, s.C, s.c, s.D, s.d, s.k0) == (1, (0,), 2, (), 0, 1)

    def test_035(self):
        s = nathanson_structure(S(0, 3, 5))
        assert (s.q, s.C, s.c, s.D, s.d, s.k_star, s.k0) == (1, (0, 3, 5, 6), 8, (0, 2), 4, 4, 3)

    def test_gcd_normalized(self):
        s = nathanson_structure(S(0, 6, 10))
        assert s.q == 2
        assert (s.C, s.c, s.D, s.d) == ((0, 3, 5, 6), 8, (0, 2), 4)

    def test_trivial(self):
        with pytest.raises(TrivialSet):
            nathanson_structure(S(0))
        with pytest.raises(TrivialSet):
            stabilization_bound(S(0))

    def test_json(self):
        d = nathanson_structure(S(0, 3, 5)).to_dict()
        assert json.loads(json.dumps(d)) == {
            "q": 1, "C": [0, 3, 5, 6], "c": 8, "D": [0, 2], "d": 4, "k_star": 4, "k0": 3,
        }

    def test_reproduces_brute_force(self):
        for a in iter_finsets(9):
            if a.max == 0:
                continue
            s = nathanson_structure(a)
            q = math.gcd(*a.elements)
            assert q == s.q
            ah = [x // q for x in a.elements]
            folds = brute_folds(ah, s.k0 + 5)
            assert set(s.C) <= set(range(s.c - 1))
            assert set(s.D) <= set(range(s.d - 1))
            assert s.k0 <= s.k_star
            for k in range(s.k0, s.k0 + 6):
                formula = set(s.C) | set(range(s.c, k * s.a_hat - s.d + 1)) | {k * s.a_hat - x for x in s.D}
                assert formula == folds[k]

    def test_bounds(self):
        assert stabilization_bound(S(0, 1)) == 1
        assert stabilization_bound(S(0, 2, 3)) == 2
        assert stabilization_bound(S(0, 3, 5)) == 4


class TestIdentities:
    def test_interval_absorb(self):
        assert interval_absorb(S(0, 5), 5) == interval(10)
        assert interval_absorb(S(0, 5), 3) == S(0, 1, 2, 3, 5, 6, 7, 8)
        assert interval_absorb(interval(2), 0) == interval(2)

    def test_special_sum_examples(self):
        assert special_sum(0, 1) == S(0, 1)
        assert special_sum(1, 2) == interval(5)
        assert special_sum(2, 3) == make_finset([0, *range(2, 13)])

    def test_special_sum_below_threshold_is_raw(self):
        # n <= a: no identity claimed, result is the plain sumset
        raw = {0}
        for i in range(2):
            raw = {x + y for x in raw for y in (0, 5 + i, 6 + i)}
        assert special_sum(5, 2) == make_finset(raw)

    def test_special_sum_exhaustive(self):
        count = 0
        for a in range(8):
            for n in range(a + 1, 9):
                raw = {0}
                for i in range(n):
                    raw = {x + y for x in raw for y in (0, a + i, a + i + 1)}
                assert make_finset(raw) == special_block(a, n) == special_sum(a, n)
                count += 1
        assert count == 36
