"""Minimum reduced-cost transaction search (the pricing problem).

The reduced cost of a transaction column is ``-duals . column``; it depends
on a transaction only through which rows it satisfies.  Per MV attribute,
those row incidences are fixed by (a) which *generators* (itemsets used in
subset tests) the itemset contains and (b) which *equality itemsets* it equals.
Two itemsets ``T`` and ``T'`` with ``T' = union of the generators inside T``
hit the same subset rows, so the union-closure of the generators, plus the
equality itemsets, plus one non-equality witness for every closure element
that is itself an equality itemset, covers every incidence class.  Pricing
enumerates that candidate space exactly.

A column in U (at its cap) may not be returned.  When the best candidate is
in U, other members of its incidence class share its reduced cost, so they
are enumerated in canonical order before moving to the next class.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Collection, Iterator, Sequence

import numpy as np

from . import _backend
from .errors import DimensionMismatch, TimeBudgetExceeded
from .master import RowSet
from .model import ConstraintInstance, Transaction


@dataclass(frozen=True)
class PriceResult:
    transaction: Transaction
    reduced_cost: object


def _next_submask(s: int, space: int) -> int:
    return ((s | ~space) + 1) & space


class _AttributePricing:
    """Incidence classes of one MV attribute."""

    def __init__(self, n_items: int, generators: Collection[int], equalities: Collection[int]):
        self.n_items = n_items
        self.generators = tuple(sorted(set(g for g in generators if g)))
        self.equalities = frozenset(equalities)
        closure = {0}
        for g in self.generators:
            closure |= {c | g for c in closure}
        self.closure = tuple(sorted(closure))
        reps = {}
        for c in self.closure:
            witness = next(self.members(c, eq=False), None)
            if witness is not None:
                reps[witness] = (c, False)
        for e in self.equalities:
            reps[e] = (self.close(e), True)
        self.reps = tuple(sorted(reps))
        self.rep_class = reps

    def close(self, x: int) -> int:
        """Union of the generators contained in ``x``."""
        out = 0
        for g in self.generators:
            if g & ~x == 0:
                out |= g
        return out

    def members(self, c: int, eq: bool) -> Iterator[int]:
        """Itemsets of one incidence class in canonical order.

        ``eq=True`` classes hold the single equality itemset ``c``.  Otherwise
        the class is every ``X`` with ``close(X) == c`` that is not an
        equality itemset; each such ``X`` is ``c`` plus items that complete no
        further generator.
        """
        if eq:
            yield c
            return
        full = (1 << self.n_items) - 1
        free = 0
        for k in range(self.n_items):
            bit = 1 << k
            if not c & bit and self.close(c | bit) == c:
                free |= bit
        y = 0
        while True:
            x = c | y
            if x not in self.equalities and (y == 0 or self.close(x) == c):
                yield x
            y = _next_submask(y, free & full)
            if y == 0:
                return

    def class_members(self, rep: int) -> Iterator[int]:
        c, eq = self.rep_class[rep]
        return self.members(rep if eq else c, eq)


class Pricer:
    """Exact pricing over the structured candidate space of one master problem."""

    def __init__(self, inst: ConstraintInstance, rows: RowSet):
        self.inst = inst
        self.rows = rows
        schema = inst.schema
        gens = [set() for _ in range(schema.q)]
        eqs = [set() for _ in range(schema.q)]
        selections = [row.selection for row in rows if row.selection is not None]
        selections += [d.selection for d in inst.dup_constraints]
        for sel in selections:
            for pos, mask, eq in sel.mv_tests:
                (eqs if eq else gens)[pos].add(mask)
        self.attrs = [
            _AttributePricing(n, gens[i], eqs[i]) for i, n in enumerate(schema.mv_sizes)
        ]
        sv_space = itertools.product(*(range(n) for n in schema.sv_sizes))
        mv_space = [a.reps for a in self.attrs]
        self.candidates = [
            Transaction(schema, sv, mv, check=False)
            for sv in sv_space
            for mv in itertools.product(*mv_space)
        ]
        self.cols = rows.incidence(self.candidates)

    def mv_candidates(self, attr: int) -> tuple[int, ...]:
        return self.attrs[attr].reps

    def reduced_cost(self, t: Transaction, duals: Sequence):
        return reduced_cost(t, duals, self.rows)

    def _values(self, duals: Sequence):
        """Scaled reduced costs ``-cols @ Y`` and the scale, where ``Y = duals * scale``."""
        if len(duals) != self.rows.r:
            raise DimensionMismatch(f"{len(duals)} duals for {self.rows.r} rows")
        if any(isinstance(v, float) for v in duals):
            return None, np.asarray(duals, dtype=np.float64), 1
        fr = [Fraction(v) for v in duals]
        scale = math.lcm(*(v.denominator for v in fr)) if fr else 1
        y = [int(v * scale) for v in fr]
        if sum(abs(v) for v in y) < _backend.INT64_SAFE:
            return np.array(y, dtype=np.int64), None, scale
        return np.array(y, dtype=object), None, scale

    def _argmin(self, y_int, y_float, excluded):
        if y_int is not None and y_int.dtype == np.int64:
            return _backend.kernels.masked_argmin(self.cols, y_int, excluded)
        if y_int is not None:
            vals = -(self.cols.astype(object).dot(y_int))
        else:
            vals = -(self.cols @ y_float)
        keep = np.flatnonzero(excluded == 0)
        if keep.size == 0:
            return -1, 0
        best = keep[0]
        for k in keep[1:]:
            if vals[k] < vals[best]:
                best = k
        return int(best), vals[best]

    def price(self, duals: Sequence, U: Collection[Transaction] = (),
              deadline: float | None = None) -> PriceResult | None:
        """Transaction outside ``U`` with minimum reduced cost, or None if none exists."""
        y_int, y_float, scale = self._values(duals)
        U = set(U)
        excluded = np.zeros(len(self.candidates), dtype=np.uint8)
        while True:
            if deadline is not None and time.monotonic() >= deadline:
                raise TimeBudgetExceeded("pricing ran out of time")
            k, val = self._argmin(y_int, y_float, excluded)
            if k < 0:
                return None
            value = Fraction(int(val), scale) if y_int is not None else float(val)
            t = self.candidates[k]
            if t not in U:
                return PriceResult(t, value)
            alt = self._alternate(t, U)
            if alt is not None:
                return PriceResult(alt, value)
            excluded[k] = 1

    def _alternate(self, t: Transaction, U: set) -> Transaction | None:
        """A member of ``t``'s incidence class outside ``U``, in canonical order."""
        need = len(U) + 1
        per_attr = [
            list(itertools.islice(a.class_members(m), need)) for a, m in zip(self.attrs, t.mv)
        ]
        for mv in itertools.product(*per_attr):
            alt = Transaction(t.schema, t.sv, mv, check=False)
            if alt not in U:
                return alt
        return None


def reduced_cost(t: Transaction, duals: Sequence, rows: RowSet):
    """``0 - duals . column_of(t)``; every transaction column costs 0."""
    col = rows.column_of(t)
    if len(duals) != len(col):
        raise DimensionMismatch(f"{len(duals)} duals for {len(col)} rows")
    return -sum((d * a for d, a in zip(duals, col) if a), 0)


def price(pricer: Pricer, duals: Sequence, U: Collection[Transaction] = (),
          deadline: float | None = None) -> PriceResult | None:
    return pricer.price(duals, U, deadline)


def candidate_space(inst: ConstraintInstance, rows: RowSet) -> list[Transaction]:
    """The transactions pricing enumerates, in canonical order (duals play no role)."""
    return list(Pricer(inst, rows).candidates)
