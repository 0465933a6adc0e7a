import itertools

import pytest

from powmon.errors import EmptyGenerators, NotCoprime
from powmon.nummon import elements_up_to, is_proper, make_numerical_monoid, parse_generators


def brute_members(gens, limit):
    """Non-negative combinations of gens up to limit, by bounded enumeration."""
    out = set()
    ranges = [range(limit // g + 1) for g in gens]
    for coeffs in itertools.product(*ranges):
        v = sum(c * g for c, g in zip(coeffs, gens))
        if v <= limit:
            out.add(v)
    return out


@pytest.mark.parametrize(
    "gens, gaps, frob",
    [((1,), (), -1), ((2, 3), (1,), 1), ((3, 5), (1, 2, 4, 7), 7)],
)
def test_examples(gens, gaps, frob):
    s = make_numerical_monoid(gens)
    assert s.gaps == gaps
    assert s.frobenius == frob


def test_elements_up_to():
    assert elements_up_to(make_numerical_monoid([2, 3]), 6) == [0, 2, 3, 4, 5, 6]
    assert elements_up_to(make_numerical_monoid([3, 5]), 8) == [0, 3, 5, 6, 8]
    assert elements_up_to(make_numerical_monoid([1]), 3) == [0, 1, 2, 3]


def test_is_proper():
    assert not is_proper(make_numerical_monoid([1]))
    assert is_proper(make_numerical_monoid([2, 3]))
    assert is_proper(make_numerical_monoid([3, 5]))


def test_errors():
    with pytest.raises(NotCoprime):
        make_numerical_monoid([4, 6])
    with pytest.raises(EmptyGenerators):
        make_numerical_monoid([])


@pytest.mark.parametrize(
    "gens",
    [(2, 5), (3, 4), (4, 7), (5, 6, 9), (6, 10, 15), (4, 6, 9), (7, 11, 13), (3, 7, 11)],
)
def test_against_brute_force(gens):
    s = make_numerical_monoid(gens)
    limit = 120
    members = brute_members(gens, limit)
    assert elements_up_to(s, limit) == sorted(members)
    assert set(s.gaps) == set(range(limit + 1)) - members
    # closure and finite complement
    for a in members:
        for b in members:
            if a + b <= limit:
                assert a + b in s
    assert all(n in s for n in range(s.frobenius + 1, limit + 1))


def test_monotone_generation():
    base = make_numerical_monoid([5, 7])
    for extra in range(1, 20):
        bigger = make_numerical_monoid([5, 7, extra])
        assert set(bigger.gaps) <= set(base.gaps)


def test_parse_and_json():
    s = parse_generators("3,5")
    assert s.to_dict() == {"generators": [3, 5], "gaps": [1, 2, 4, 7], "frobenius": 7}
