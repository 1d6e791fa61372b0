"""The eight acceptance criteria, each at its stated tolerance and time bound.

Every test records a PASS/FAIL line that the session summary prints (see
conftest).  Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import random
import time
from fractions import Fraction

import pytest

import acceptance_log
from instances import random_instances, random_transaction, sel, social_schema
from msifm.border import compute_border, negative_border
from msifm.driver import Termination, run_colgen, run_oracle
from msifm.master import build_rows
from msifm.model import (
    ConstraintInstance,
    Dataset,
    DuplicateConstraint,
    Schema,
    SupportConstraint,
    count_transactions,
    verify,
)
from msifm.pricing import Pricer
from msifm.rounding import round_solution
from msifm.simplex import RevisedSimplex
from oracles import brute_border, brute_column, brute_price, brute_support, ifm_satisfied
from test_simplex import beale

SEED = 20240611
N_INSTANCES = 50


def check(number, title, passed, detail=""):
    acceptance_log.record(number, title, bool(passed), detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}  {detail}")
    assert passed, f"criterion {number} failed: {detail}"


@pytest.fixture(scope="module")
def corpus():
    insts = random_instances(SEED, N_INSTANCES)
    assert all(count_transactions(i.schema) <= 1 << 14 for i in insts)
    return insts


@pytest.fixture(scope="module")
def runs(corpus):
    """(colgen, oracle) per instance, plus the wall time of the whole batch."""
    t0 = time.perf_counter()
    pairs = [(run_colgen(inst), run_oracle(inst, 1 << 14)) for inst in corpus]
    return pairs, time.perf_counter() - t0


def test_c1_oracle_equivalence(corpus, runs):
    pairs, elapsed = runs
    mismatches = [k for k, (cg, orc) in enumerate(pairs) if cg.objective != orc.objective]
    optimal = all(cg.reason is Termination.OPTIMAL for cg, _ in pairs)
    ps = {inst.schema.p for inst in corpus}
    positive = sum(1 for cg, _ in pairs if cg.objective > 0)
    shape_ok = (
        ps == {0, 1, 2}
        and all(inst.schema.n_mv <= 10 and len(inst.mv_constraints) <= 6 and len(inst.ms_constraints) <= 3
                for inst in corpus)
        and 0 < positive < len(corpus)
        and any(inst.dup_constraints for inst in corpus)
    )
    check(1, "colgen objective == oracle objective (exact)",
          not mismatches and optimal and shape_ok and elapsed < 60,
          f"{len(corpus)} instances, {len(mismatches)} mismatches, {positive} with objective > 0, {elapsed:.1f}s / 60s")


def test_c2_pricing_exactness(corpus, runs):
    pairs, _ = runs
    rng = random.Random(SEED + 2)
    t0 = time.perf_counter()
    vectors = 0
    failures = []
    column_checks = 0
    for k, (inst, (cg, _)) in enumerate(zip(corpus, pairs)):
        rows = build_rows(inst, compute_border(inst))
        everything = list(inst.schema.iter_transactions())
        cols = rows.incidence(everything)
        # spot-check the bulk incidence against per-row set semantics
        for idx in rng.sample(range(len(everything)), min(20, len(everything))):
            column_checks += 1
            if tuple(cols[idx]) != brute_column(everything[idx], rows):
                failures.append((k, "column"))
        pricer = Pricer(inst, rows)
        duals_list = [cg.state.duals] + [
            [Fraction(rng.randint(-8, 8), rng.randint(1, 6)) for _ in range(rows.r)] for _ in range(4)
        ]
        for duals in duals_list:
            vectors += 1
            U = set(rng.sample(everything, rng.randint(0, min(4, len(everything) - 2))))
            best, argmin = brute_price(everything, cols, duals, U)
            got = pricer.price(duals, U)
            if got is None or got.reduced_cost != best or got.transaction not in argmin or got.transaction in U:
                failures.append((k, "price"))
            # seed U with the global minimizer: the runner-up comes back
            U2 = U | {got.transaction}
            best2, argmin2 = brute_price(everything, cols, duals, U2)
            got2 = pricer.price(duals, U2)
            if best2 is None:
                if got2 is not None:
                    failures.append((k, "exhausted"))
                continue
            if got2 is None or got2.transaction in U2 or got2.reduced_cost != best2 or got2.transaction not in argmin2:
                failures.append((k, "runner-up"))
    elapsed = time.perf_counter() - t0
    check(2, "pricing == brute-force minimum outside U, runner-up when U holds the minimizer",
          not failures and vectors >= 200 and elapsed < 30,
          f"{vectors} dual vectors, {column_checks} column spot checks, {len(failures)} failures, {elapsed:.1f}s / 30s")


def test_c3_border_correctness():
    rng = random.Random(SEED + 3)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(100):
        n = rng.randint(1, 10)
        domain = [f"i{k}" for k in range(n)]
        S = [set(rng.sample(domain, rng.randint(1, n))) for _ in range(rng.randint(0, 8))]
        if set(negative_border(domain, S, cap=None)) != brute_border(domain, S):
            bad += 1
    elapsed = time.perf_counter() - t0
    check(3, "negative border == brute-force antichain", bad == 0 and elapsed < 10,
          f"100 cases, {bad} mismatches, {elapsed:.2f}s / 10s")


def social_hand_dataset(s):
    rows = [
        (("Male", "Rome", "25"), (["g1", "g2", "g4"], ["e1", "e3"]), 40),
        (("Male", "Rome", "20"), (["g1", "g2"], []), 30),
        (("Male", "Milan", "25"), (["g3"], ["e2"]), 50),
        (("Male", "Milan", "20"), ([], ["e1"]), 40),
        (("Female", "Rome", "20"), (["g1", "g2"], ["e1", "e3"]), 35),
        (("Female", "Milan", "25"), (["g2", "g3"], ["e3"]), 45),
        (("Female", "Rome", "25"), (["g4"], ["e1", "e2"]), 30),
        (("Female", "Milan", "20"), (["g1"], []), 30),
    ]
    return Dataset({s.transaction(list(sv), [list(g), list(e)]): c for sv, (g, e), c in rows})


def social_scaled_instance():
    s = social_schema()
    hand = social_hand_dataset(s)
    slack = 12

    def around(*entries, lo=None, hi=None):
        L = sel(s, *entries)
        v = brute_support(hand, L.entries)
        return SupportConstraint(L, max(0, v - slack) if lo is None else lo, v + slack if hi is None else hi)

    sv = [around(("Gender", "Male"), lo=120, hi=180)]
    sv += [around((a.name, item)) for a in s.sv_attrs for item in a.domain if item != "Male"]
    mv = [around(("Groups", g)) for g in (["g1", "g2"], ["g2", "g3"], ["g4"], ["g1"])]
    mv += [around(("Events", e)) for e in (["e1", "e3"], ["e2"], ["e1"])]
    ms = [
        around(("Gender", "Male"), ("Location", "Rome"), ("Groups", ["g1", "g2"])),
        around(("Gender", "Female"), ("Groups", ["g1", "g2"]), ("Events", ["e1", "e3"])),
        around(("Groups", ["g1", "g2"], "equal")),
    ]
    dups = [
        DuplicateConstraint(sel(s, ("Gender", "Male"), ("Location", "Rome"), ("Groups", ["g1", "g2"])), 45),
        DuplicateConstraint(sel(s, ("Gender", "Female"), ("Groups", ["g1", "g2"]), ("Events", ["e1", "e3"])), 50),
    ]
    inst = ConstraintInstance(s, sv, mv, ms, dups, 45, hand.size)
    return inst, hand


def test_c4_feasible_end_to_end():
    t0 = time.perf_counter()
    inst, hand = social_scaled_instance()
    border = compute_border(inst)
    hand_ok = verify(hand, inst, border).ok
    res = run_colgen(inst)
    D = round_solution(res.dataset, inst.size, inst.dup_constraints)
    report = verify(D, inst, res.border)
    elapsed = time.perf_counter() - t0
    check(4, "scaled social-network instance: objective 0, rounded dataset verifies",
          hand_ok and res.objective == 0 and D.is_integral and report.ok and elapsed < 10,
          f"size {inst.size}, {res.iterations} iterations, {len(report)} violations, {elapsed:.2f}s / 10s")


def test_c5_infeasible_detection():
    t0 = time.perf_counter()
    s = Schema(sv=[("A", ["a1", "a2"]), ("B", ["b1", "b2", "b3"])], mv=[("G", ["g1", "g2"])])
    size = 20
    lows = {"a1": 12, "a2": 12, "b1": 8, "b2": 8, "b3": 8}
    sv = [SupportConstraint(sel(s, (a.name, item)), lows[item], size) for a in s.sv_attrs for item in a.domain]
    assert sum(lows.values()) > size * s.p
    mv = [SupportConstraint(sel(s, ("G", ["g1"])), 0, size)]
    inst = ConstraintInstance(s, sv, mv, [], [], None, size)
    res = run_colgen(inst)
    D = round_solution(res.dataset, size, inst.dup_constraints)
    report = verify(D, inst, res.border)
    elapsed = time.perf_counter() - t0
    check(5, "pigeonhole-infeasible SV bounds: objective > 0 and violations reported",
          res.objective > 0 and len(report) > 0 and elapsed < 5,
          f"objective {res.objective}, {len(report)} violations, {elapsed:.2f}s / 5s")


def test_c6_simplex_invariants(corpus):
    problems = []
    n_runs = 0
    for k, inst in enumerate(corpus):
        for runner in (lambda i: run_colgen(i, trace=True, audit=True),
                       lambda i: run_oracle(i, 1 << 14, trace=True, audit=True)):
            res = runner(inst)
            n_runs += 1
            objs = [rec.objective for rec in res.pivot_history]
            if any(b > a for a, b in zip(objs, objs[1:])):
                problems.append((k, "pivot objective increased"))
            outer = list(getattr(res, "objectives", ()))
            if any(b > a for a, b in zip(outer, outer[1:])):
                problems.append((k, "iteration objective increased"))
            if res.audit_failures:
                problems.append((k, "primal feasibility lost"))
    solver = RevisedSimplex(beale(), trace=True, audit=True)
    solver.solve(max_pivots=200)
    keys = [rec.basis_key for rec in solver.history]
    degenerate = sum(1 for a, b in zip([0] + [r.objective for r in solver.history], [r.objective for r in solver.history]) if a == b)
    if len(keys) != len(set(keys)):
        problems.append(("beale", "basis repeated"))
    if solver.audit_failures:
        problems.append(("beale", "primal feasibility lost"))
    check(6, "objective non-increasing, feasibility at every pivot, no basis repeat on a degenerate LP",
          not problems and degenerate > 0,
          f"{n_runs} audited runs, {len(solver.history)} pivots on the degenerate LP ({degenerate} degenerate), "
          f"{len(problems)} problems")


def _ifm_case(rng):
    n = rng.randint(2, 6)
    items = [f"i{k}" for k in range(n)]
    s = Schema(mv=[("G", items)])
    size = rng.randint(4, 20)
    hidden = Dataset({random_transaction(rng, s, 0.5): rng.randint(1, 4) for _ in range(4)})
    factor = Fraction(size, hidden.size)
    hidden = Dataset.from_values((t, c * factor) for t, c in hidden.items())
    used, mv = set(), []
    for _ in range(rng.randint(1, 4)):
        I = frozenset(rng.sample(items, rng.randint(1, min(3, n))))
        if I in used:
            continue
        used.add(I)
        v = brute_support(hidden, sel(s, ("G", sorted(I))).entries)
        lo = max(0, int(v) - rng.randint(0, 2))
        mv.append(SupportConstraint(sel(s, ("G", sorted(I))), lo, lo + rng.randint(0, 4)))
    return s, ConstraintInstance(s, [], mv, [], [], None, size)


def test_c7_specialization_to_ifm():
    rng = random.Random(SEED + 7)
    disagreements = 0
    checked = 0
    outcomes = set()
    for _ in range(20):
        s, inst = _ifm_case(rng)
        border = compute_border(inst)
        frequent = [(c.selection.entries[0].items, c.lo, c.hi) for c in inst.mv_constraints]
        res = run_colgen(inst)
        candidates = [round_solution(res.dataset, inst.size)]
        everything = list(s.iter_transactions())
        for _ in range(15):
            picks = rng.sample(everything, rng.randint(1, min(4, len(everything))))
            candidates.append(Dataset({t: rng.randint(1, inst.size) for t in picks}))
        for D in candidates:
            sets = {frozenset(t.mv_items("G")): c for t, c in D.items()}
            ours = verify(D, inst, border).ok
            theirs = ifm_satisfied(sets, s.mv_attrs[0].domain, frequent, None, inst.size)
            outcomes.add(ours)
            checked += 1
            disagreements += ours != theirs
    check(7, "p=0, q=1 semantics coincide with classical IFM",
          disagreements == 0 and outcomes == {True, False},
          f"20 instances, {checked} datasets, {disagreements} disagreements")


def test_c8_space_bound(corpus, runs):
    pairs, _ = runs
    over = []
    for k, (inst, (cg, orc)) in enumerate(zip(corpus, pairs)):
        bound = cg.rows.r + cg.iterations + cg.at_upper + len(inst.mv_constraints)
        if cg.live_columns > bound:
            over.append(k)
        if orc.transaction_columns != count_transactions(inst.schema):
            over.append(("oracle", k))
    ratio = max(orc.transaction_columns / cg.live_columns for cg, orc in pairs)
    check(8, "live columns <= r + iterations + |U| + m_mv; oracle holds every transaction",
          not over, f"{len(over)} violations over {len(pairs)} runs, oracle/colgen column ratio up to {ratio:.0f}x")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
