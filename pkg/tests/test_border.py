import random

import pytest
from hypothesis import given, settings, strategies as st

from instances import toy_instance
from msifm.border import DEFAULT_BORDER_CAP, compute_border, minimal_infrequent, negative_border, size_guard
from msifm.errors import BorderTooLarge, ValidationError
from oracles import brute_border

G = ["g1", "g2", "g3"]


def fs(*sets):
    return [frozenset(s) for s in sets]


def test_examples():
    assert negative_border(G, [{"g1", "g2"}, {"g2", "g3"}]) == fs({"g1", "g3"})
    assert negative_border(G, [set(G)]) == []
    assert negative_border(G, [{"g1"}]) == fs({"g2"}, {"g3"})


def test_empty_frequent_family_gives_singletons():
    assert negative_border(G, []) == fs({"g1"}, {"g2"}, {"g3"})


def test_rejects_foreign_or_empty_itemsets():
    with pytest.raises(ValidationError):
        negative_border(G, [{"g9"}])
    with pytest.raises(ValidationError):
        minimal_infrequent(3, [0])


def test_size_guard():
    assert size_guard(G, [{"g1", "g2"}, {"g2", "g3"}], cap=10)
    with pytest.raises(BorderTooLarge) as exc:
        size_guard(G, [{"g1", "g2"}, {"g2", "g3"}], cap=0, attr="Groups")
    assert exc.value.cap == 0 and exc.value.attr == "Groups"


def test_size_guard_early_exit_on_large_domain():
    # 20 items, five 10-item frequent sets: the border is large, and the cap
    # must trip long before the 2^20 lattice is walked.
    rng = random.Random(7)
    domain = [f"i{k}" for k in range(20)]
    S = [set(rng.sample(domain, 10)) for _ in range(5)]
    with pytest.raises(BorderTooLarge):
        size_guard(domain, S, cap=5)
    # on a 10-item shrink the guard agrees with full enumeration
    small = domain[:10]
    S_small = [set(rng.sample(small, 5)) for _ in range(5)]
    full = brute_border(small, S_small)
    assert size_guard(small, S_small, cap=len(full))
    with pytest.raises(BorderTooLarge):
        size_guard(small, S_small, cap=len(full) - 1)


def test_compute_border_of_instance():
    b = compute_border(toy_instance())
    assert b.members == ((0b101,),)
    assert b.total == 1
    assert DEFAULT_BORDER_CAP == 10_000


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 10), st.data())
def test_matches_enumeration(n, data):
    domain = [f"x{k}" for k in range(n)]
    S = data.draw(st.lists(st.sets(st.sampled_from(domain), min_size=1), max_size=8))
    got = negative_border(domain, S, cap=None)
    assert set(got) == brute_border(domain, S)
    assert len(got) == len(set(got))
    # canonical (bitmask) order
    masks = [sum(1 << domain.index(i) for i in m) for m in got]
    assert masks == sorted(masks)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 9), st.data())
def test_partition_and_antichain(n, data):
    domain = [f"x{k}" for k in range(n)]
    S = data.draw(st.lists(st.sets(st.sampled_from(domain), min_size=1), max_size=6))
    border = negative_border(domain, S, cap=None)
    for a in border:
        for b in border:
            assert a == b or not a <= b
    for mask in range(1, 1 << n):
        T = frozenset(domain[k] for k in range(n) if mask >> k & 1)
        covered = any(T <= frozenset(J) for J in S)
        assert covered != any(m <= T for m in border)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.data())
def test_order_independent(n, data):
    domain = [f"x{k}" for k in range(n)]
    S = data.draw(st.lists(st.sets(st.sampled_from(domain), min_size=1), max_size=6))
    shuffled = data.draw(st.permutations(S))
    assert negative_border(domain, S, cap=None) == negative_border(domain, shuffled, cap=None)
