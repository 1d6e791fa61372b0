"""Column generation loop and the fully expanded oracle."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .border import DEFAULT_BORDER_CAP, Border, compute_border
from .errors import TimeBudgetExceeded, TooLarge
from .master import MasterProblem, RowSet, build_rows, initial_state
from .model import ConstraintInstance, Dataset, count_transactions
from .pricing import Pricer
from .simplex import FLOAT_TOL, RATIONAL, TIME_LIMIT, BasisState, PivotRecord, RevisedSimplex

log = logging.getLogger(__name__)

DEFAULT_ORACLE_CAP = 65_536


class Termination(str, Enum):
    OPTIMAL = "optimal"
    TIME_LIMIT = "time_limit"


@dataclass(frozen=True)
class ProgressEvent:
    iteration: int
    objective: object
    column: object  # Transaction added this iteration, None on termination
    reduced_cost: object


@dataclass(frozen=True)
class ColgenResult:
    state: BasisState
    objective: object
    dataset: Dataset
    iterations: int
    reason: Termination
    rows: RowSet
    border: Border
    live_columns: int
    at_upper: int
    pivots: int
    objectives: tuple = ()  # RMP optimum after each iteration
    pivot_history: tuple[PivotRecord, ...] = field(default=(), repr=False)
    audit_failures: tuple[int, ...] = ()


@dataclass(frozen=True)
class OracleResult:
    state: BasisState
    objective: object
    dataset: Dataset
    columns: int  # all structural columns, artificials included
    transaction_columns: int
    rows: RowSet
    border: Border
    pivots: int
    pivot_history: tuple[PivotRecord, ...] = field(default=(), repr=False)
    audit_failures: tuple[int, ...] = ()


def _prepare(inst, border, border_cap, arithmetic):
    if border is None:
        border = compute_border(inst, border_cap)
    rows = build_rows(inst, border)
    start = initial_state(inst, rows)
    master = MasterProblem(inst, rows, start.columns, arithmetic)
    return border, rows, start, master


def run_colgen(inst: ConstraintInstance, time_limit: float | None = None, *,
               arithmetic: str = RATIONAL, border_cap: int | None = DEFAULT_BORDER_CAP,
               border: Border | None = None,
               observer: Callable[[ProgressEvent], None] | None = None,
               trace: bool = False, audit: bool = False) -> ColgenResult:
    """Alternate RMP solves and pricing until no column prices out or time runs out.

    ``time_limit`` is in seconds; None means unlimited.  ``trace`` keeps the
    pivot history, ``audit`` re-checks primal feasibility after every pivot.
    """
    deadline = None if time_limit is None else time.monotonic() + time_limit
    border, rows, start, master = _prepare(inst, border, border_cap, arithmetic)
    solver = RevisedSimplex(master.lp, start.basis, trace=trace, audit=audit)
    pricer = Pricer(inst, rows)
    tol = 0 if arithmetic == RATIONAL else FLOAT_TOL
    iterations = 0
    objectives = []
    reason = Termination.OPTIMAL
    while True:
        if solver.solve(deadline) == TIME_LIMIT:
            reason = Termination.TIME_LIMIT
            break
        objectives.append(solver.objective)
        if solver.objective <= tol:
            # zero is a lower bound on the objective, so this is optimal
            break
        U = {
            master.transaction_at(j) for j in solver.at_upper()
            if master.transaction_at(j) is not None
        }
        try:
            found = pricer.price(solver.duals(), U, deadline)
        except TimeBudgetExceeded:
            reason = Termination.TIME_LIMIT
            break
        if found is None or found.reduced_cost >= -tol or master.index_of(found.transaction) is not None:
            break
        master.add_transactions([found.transaction])
        iterations += 1
        log.debug("iteration %d: objective %s, added %r (reduced cost %s)",
                  iterations, solver.objective, found.transaction, found.reduced_cost)
        if observer is not None:
            observer(ProgressEvent(iterations, solver.objective, found.transaction, found.reduced_cost))
    if observer is not None:
        observer(ProgressEvent(iterations, solver.objective, None, None))
    values = solver.values()
    status = "optimal" if reason is Termination.OPTIMAL else TIME_LIMIT
    return ColgenResult(
        state=solver.state(status),
        objective=solver.objective,
        dataset=master.dataset(values),
        iterations=iterations,
        reason=reason,
        rows=rows,
        border=border,
        live_columns=master.live_columns,
        at_upper=len(solver.at_upper()),
        pivots=solver.pivots,
        objectives=tuple(objectives),
        pivot_history=tuple(solver.history),
        audit_failures=tuple(solver.audit_failures),
    )


def run_oracle(inst: ConstraintInstance, cap_columns: int = DEFAULT_ORACLE_CAP, *,
               arithmetic: str = RATIONAL, border_cap: int | None = DEFAULT_BORDER_CAP,
               border: Border | None = None, trace: bool = False, audit: bool = False) -> OracleResult:
    """Solve the LP with every transaction column materialized."""
    total = count_transactions(inst.schema)
    if total > cap_columns:
        raise TooLarge(total, cap_columns)
    border, rows, start, master = _prepare(inst, border, border_cap, arithmetic)
    added = master.add_transactions(list(inst.schema.iter_transactions()))
    n_seeds = len(start.columns) - sum(1 for row in rows if row.has_artificial)
    solver = RevisedSimplex(master.lp, start.basis, trace=trace, audit=audit)
    solver.solve()
    return OracleResult(
        state=solver.state(),
        objective=solver.objective,
        dataset=master.dataset(solver.values()),
        columns=master.live_columns,
        transaction_columns=len(added) + n_seeds,
        rows=rows,
        border=border,
        pivots=solver.pivots,
        pivot_history=tuple(solver.history),
        audit_failures=tuple(solver.audit_failures),
    )
