import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from msifm.errors import DimensionMismatch, NumericFailure
from msifm.simplex import (
    FLOAT,
    OPTIMAL,
    RATIONAL,
    LinearProgram,
    RevisedSimplex,
    logical,
    reduced_cost_of,
    solve_restricted,
)
from oracles import vertex_lp_min


def capped_example(arithmetic=RATIONAL):
    # min w  s.t.  w + x >= 3,  x <= 2
    lp = LinearProgram([3], arithmetic)
    w = lp.add_column([1], cost=1)
    x = lp.add_column([1], cost=0, upper=2)
    return lp, w, x


def test_cap_forces_upper_bound():
    lp, w, x = capped_example()
    solver = RevisedSimplex(lp)
    assert solver.solve() == OPTIMAL
    assert solver.objective == 1
    assert solver.values() == {w: 1, x: 2}
    assert x in solver.at_upper()
    assert solver.duals() == (1,)


def test_cap_float_mode():
    lp, w, x = capped_example(FLOAT)
    state = solve_restricted(lp)
    assert state.objective == pytest.approx(1.0)
    assert x in state.at_upper
    assert isinstance(state.objective, float)


def test_zero_objective_feasible_system():
    lp = LinearProgram([0, -4])
    lp.add_column([1, -1], cost=0)
    lp.add_column([0, -1], cost=0, upper=3)
    state = solve_restricted(lp)
    assert state.objective == 0
    assert state.status == OPTIMAL


def test_warm_start_resumes():
    lp, w, x = capped_example()
    state = solve_restricted(lp)
    again = solve_restricted(lp, state)
    assert again.objective == state.objective and again.at_upper == state.at_upper


def test_reduced_cost_of():
    assert reduced_cost_of([0, 0, 0], 0, [1, 2, 3]) == 0
    assert reduced_cost_of([0, 1, 0], 0, [0, 5, 0]) == -5
    rng = random.Random(3)
    col = [rng.choice([-1, 0, 1]) for _ in range(4)]
    duals = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(4)]
    assert reduced_cost_of(col, 2, duals) == 2 - sum(c * d for c, d in zip(col, duals))
    with pytest.raises(DimensionMismatch):
        reduced_cost_of([1, 0], 0, [1, 2, 3])


def test_rejects_bad_columns():
    lp = LinearProgram([1, 1])
    with pytest.raises(DimensionMismatch):
        lp.add_column([1], cost=0)
    with pytest.raises(ValueError):
        lp.add_column([1, 0], cost=0, upper=0)
    with pytest.raises(ValueError):
        LinearProgram([1], "decimal")


def test_no_start_basis():
    lp = LinearProgram([1])
    lp.add_column([2], cost=0, upper=Fraction(1, 4))
    with pytest.raises(NumericFailure):
        RevisedSimplex(lp)


def beale():
    """Beale's cycling example, rows scaled to integers, x6 capped at 1."""
    lp = LinearProgram([0, 0])
    lp.add_column([-1, -1], cost=Fraction(-3, 4))
    lp.add_column([32, 24], cost=20)
    lp.add_column([4, 1], cost=Fraction(-1, 2), upper=1)
    lp.add_column([-36, -6], cost=6)
    return lp


def test_beale_no_cycling():
    solver = RevisedSimplex(beale(), trace=True, audit=True)
    assert solver.solve(max_pivots=100) == OPTIMAL
    # the vertex oracle needs every variable capped; 100 never binds here
    A = [[-1, 32, 4, -36], [-1, 24, 1, -6]]
    costs = [Fraction(-3, 4), 20, Fraction(-1, 2), 6]
    assert solver.objective == vertex_lp_min(A, [0, 0], costs, [100, 100, 1, 100]) == Fraction(-5, 4)
    # the start is degenerate: the first pivots leave the objective unchanged
    assert solver.history[0].objective == 0
    keys = [rec.basis_key for rec in solver.history]
    assert len(keys) == len(set(keys))
    assert not solver.audit_failures
    objs = [rec.objective for rec in solver.history]
    assert all(b <= a for a, b in zip(objs, objs[1:]))


def test_bounded_optimality_conditions():
    solver = RevisedSimplex(beale())
    solver.solve()
    basic = set(solver.head)
    upper = solver.at_upper()
    for j in range(solver.lp.n):
        d = solver.reduced_cost(j)
        if j in upper:
            assert d <= 0
        elif j not in basic:
            assert d >= 0
    for g in range(solver.r):
        if logical(g) not in basic:
            assert solver.reduced_cost(logical(g)) >= 0


def _random_lp(rng, arithmetic=RATIONAL):
    r = rng.randint(1, 3)
    n = rng.randint(1, 3)
    A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(r)]
    b = [rng.randint(-4, 6) for _ in range(r)]
    c = [rng.randint(-5, 5) for _ in range(n)]
    u = [rng.randint(1, 4) for _ in range(n)]
    lp = LinearProgram(b, arithmetic)
    cols = np.array(A, dtype=np.int64).T.reshape(n, r)
    lp.add_columns(cols, c, u)
    # one capped artificial per positive row keeps the start feasible and the LP bounded
    art_cap = 30
    full_c, full_u, full_A = list(c), list(u), [row[:] for row in A]
    for g in range(r):
        if b[g] > 0:
            e = [0] * r
            e[g] = 1
            lp.add_column(e, cost=20, upper=art_cap)
            full_c.append(20)
            full_u.append(art_cap)
            for k in range(r):
                full_A[k].append(e[k])
    return lp, full_A, b, full_c, full_u


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_matches_vertex_enumeration(seed):
    rng = random.Random(seed)
    lp, A, b, c, u = _random_lp(rng)
    expected = vertex_lp_min(A, b, c, u)
    solver = RevisedSimplex(lp, audit=True)
    solver.solve()
    assert solver.objective == expected
    assert not solver.audit_failures
    assert solver.check_feasible()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_float_mode_agrees(seed):
    rng = random.Random(seed)
    lp, *_ = _random_lp(rng)
    rng = random.Random(seed)
    flp, *_ = _random_lp(rng, FLOAT)
    exact = solve_restricted(lp).objective
    approx = solve_restricted(flp).objective
    assert approx == pytest.approx(float(exact), abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_objective_monotone_and_partition(seed):
    rng = random.Random(seed)
    lp, *_ = _random_lp(rng)
    solver = RevisedSimplex(lp, trace=True, audit=True)
    solver.solve()
    objs = [rec.objective for rec in solver.history]
    assert all(b <= a for a, b in zip(objs, objs[1:]))
    state = solver.state()
    basic = {j for j in state.basic if j >= 0}
    assert not basic & state.at_upper
    for j in state.at_upper:
        assert lp.uppers[j] is not None
    for ref, v in zip(state.basic, state.values):
        assert v >= 0
        if ref >= 0 and lp.uppers[ref] is not None:
            assert v <= lp.uppers[ref]
