import itertools

import pytest
from hypothesis import given, settings, strategies as st

from powmon.core_sets import (
    FinSet,
    IntervalDecomposition,
    boxing_decomposition,
    boxing_dim,
    dilate,
    format_finset,
    gap_set,
    interval,
    iter_finsets,
    iter_level,
    make_finset,
    max_gap,
    n_fold,
    pair,
    parse_finset,
    reversion,
    set_capacity,
    get_capacity,
    sumset,
)
from powmon.errors import CapacityExceeded, EmptySet, MissingZero, NegativeElement, ParseError


def S(*xs):
    return make_finset(xs)


def brute_sum(xs, ys):
    return sorted({x + y for x in xs for y in ys})


def brute_runs(xs):
    # maximal runs by direct scan over [0, max]
    xs = set(xs)
    runs, lo = [], None
    for v in range(max(xs) + 2):
        if v in xs and lo is None:
            lo = v
        elif v not in xs and lo is not None:
            runs.append((lo, v - 1))
            lo = None
    return runs


finsets = st.lists(st.integers(0, 30), max_size=12).map(lambda v: make_finset([0, *v]))


class TestMakeFinset:
    def test_dedup_sort(self):
        assert make_finset([0, 3, 2, 2]).elements == (0, 2, 3)

    def test_identity_element(self):
        assert make_finset([0]).elements == (0,)
        assert make_finset([0]).max == 0

    def test_missing_zero(self):
        with pytest.raises(MissingZero):
            make_finset([1, 2])

    def test_negative(self):
        with pytest.raises(NegativeElement):
            make_finset([0, -1])

    def test_empty(self):
        with pytest.raises(EmptySet):
            make_finset([])


class TestSumset:
    def test_identity(self):
        x = S(0, 2, 3)
        assert sumset(S(0), x) == x

    @pytest.mark.parametrize(
        "x, y",
        [((0, 1), (0, 2)), ((0, 2, 3), (0, 3)), ((0, 5, 7), (0, 1, 9))],
    )
    def test_matches_enumeration(self, x, y):
        assert list(sumset(S(*x), S(*y))) == brute_sum(x, y)

    def test_examples(self):
        assert sumset(S(0, 1), S(0, 2)).elements == (0, 1, 2, 3)
        assert sumset(S(0, 2, 3), S(0, 3)).elements == (0, 2, 3, 5, 6)

    @given(finsets, finsets)
    def test_commutative_and_max_additive(self, x, y):
        assert x + y == y + x
        assert (x + y).max == x.max + y.max
        assert list(x + y) == brute_sum(x, y)

    @given(finsets, finsets, finsets)
    def test_associative(self, x, y, z):
        assert (x + y) + z == x + (y + z)


class TestNFold:
    def test_double(self):
        assert n_fold(S(0, 2, 3), 2).elements == (0, 2, 3, 4, 5, 6)

    def test_zero_fold(self):
        assert n_fold(S(0, 4, 9), 0) == S(0)

    @pytest.mark.parametrize("k", range(1, 12))
    def test_023_closed_form(self, k):
        assert n_fold(S(0, 2, 3), k) == make_finset([0, *range(2, 3 * k + 1)])

    @given(finsets, st.integers(0, 6))
    def test_recurrence(self, x, h):
        assert n_fold(x, h + 1) == n_fold(x, h) + x


class TestDilate:
    def test_examples(self):
        assert dilate(S(0, 2, 3), 1) == S(0, 2, 3)
        assert dilate(S(0, 2, 3), 2) == S(0, 4, 6)
        assert dilate(S(0, 1), 3) == S(0, 3)

    @given(finsets, st.integers(1, 5))
    def test_cardinality(self, x, k):
        assert len(dilate(x, k)) == len(x)


class TestReversion:
    def test_examples(self):
        assert reversion(S(0, 1, 3)) == S(0, 2, 3)
        assert reversion(S(0, 7)) == S(0, 7)
        assert reversion(S(0)) == S(0)

    @given(finsets)
    def test_involution(self, x):
        assert reversion(reversion(x)) == x
        assert {x.max - v for v in x} == set(reversion(x))

    @given(finsets, finsets)
    def test_homomorphism(self, x, y):
        assert reversion(x + y) == reversion(x) + reversion(y)


class TestGaps:
    def test_examples(self):
        assert gap_set(S(0)) == frozenset()
        assert gap_set(S(0, 2, 3)) == {1, 2}
        assert gap_set(interval(6)) == {1}
        assert max_gap(S(0)) == 0
        assert max_gap(S(0, 2, 3)) == 2

    @pytest.mark.parametrize("a", range(1, 10))
    def test_staircase(self, a):
        assert max_gap(S(0, a, a + 1)) == a


class TestBoxing:
    def test_examples(self):
        assert boxing_decomposition(S(0)).intervals == ((0, 0),)
        assert boxing_decomposition(S(0, 2, 3)).intervals == ((0, 0), (2, 3))
        d = boxing_decomposition(S(0, 5, 7, 8, 9))
        assert d.intervals == ((0, 0), (5, 5), (7, 9))
        assert d.dimension == 3
        assert boxing_dim(interval(7)) == 1
        assert boxing_dim(S(0, 2, 3)) == 2
        assert boxing_dim(S(0, 5, 7, 8, 9)) == 3

    def test_matches_run_scan_exhaustively(self):
        for x in iter_finsets(10):
            d = boxing_decomposition(x)
            assert list(d.intervals) == brute_runs(x.elements)
            assert boxing_dim(x) == d.dimension
            assert d.is_well_separated()
            assert d.union() == x
            assert (boxing_dim(x) == 1) == x.is_interval()

    @given(finsets, finsets)
    def test_subadditive(self, x, y):
        assert boxing_dim(x | y) <= boxing_dim(x) + boxing_dim(y)

    def test_not_well_separated(self):
        assert not IntervalDecomposition(((0, 1), (2, 3))).is_well_separated()


class TestIdempotent:
    def test_only_zero_is_idempotent(self):
        for x in iter_finsets(10):
            assert (x + x == x) == (x == S(0))


class TestIntervalAbsorption:
    def test_inclusions_small(self):
        for x in iter_finsets(8):
            for h in range(10):
                s = x + interval(h)
                assert {0, x.max + h} <= set(s)
                assert s.issubset(interval(x.max + h))
                assert (s != interval(x.max + h)) == (h <= max_gap(x) - 2)


class TestLiteral:
    def test_round_trip(self):
        for x in iter_finsets(7):
            assert parse_finset(format_finset(x)) == x
        assert str(S(0, 2, 3)) == "0,2,3"

    @pytest.mark.parametrize(
        "text, pos",
        [("0,3,2", 4), ("0,2,2", 4), ("1,2", 0), ("0,x", 2), ("", 0), ("0,-1", 2)],
    )
    def test_errors_cite_position(self, text, pos):
        with pytest.raises(ParseError) as err:
            parse_finset(text)
        assert err.value.position == pos


class TestEnumeration:
    def test_counts(self):
        assert sum(1 for _ in iter_finsets(6)) == 2**6
        for k in range(1, 8):
            lvl = list(iter_level(k))
            assert len(lvl) == 2 ** (k - 1)
            assert all(x.max == k for x in lvl)
            assert lvl == sorted(lvl)

    def test_helpers(self):
        assert pair(4) == S(0, 4)
        assert interval(3) == S(0, 1, 2, 3)


class TestCapacity:
    def test_exceeded(self):
        old = get_capacity()
        try:
            set_capacity(10)
            with pytest.raises(CapacityExceeded):
                sumset(S(0, 6), S(0, 6))
            with pytest.raises(CapacityExceeded):
                make_finset([0, 11])
            with pytest.raises(CapacityExceeded):
                dilate(S(0, 4), 3)
            with pytest.raises(CapacityExceeded):
                n_fold(S(0, 3), 4)
            assert sumset(S(0, 5), S(0, 5)).max == 10
        finally:
            set_capacity(old)
