"""The succinct LP: rows, artificial columns, transaction columns and the start basis.

Rows are all of ``>=`` type.  A transaction column has coefficient +1 on a
lower-bound row whose selection it satisfies, -1 on an upper-bound or
infrequency row it satisfies, and +1/-1 on the two size rows.  Duplicate caps
are column bounds, never rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence, Union

import numpy as np

from . import _backend
from .border import Border
from .errors import SchemaMismatch
from .model import (
    ConstraintInstance,
    Dataset,
    DuplicateConstraint,
    MVSelection,
    SelectionList,
    SUBSET,
    Transaction,
    duplicate_cap,
)
from .simplex import LinearProgram, RATIONAL, logical

_KERNEL_MAX_MV = 64


class RowFamily(IntEnum):
    SV_LOWER = 8
    SV_UPPER = 9
    MV_LOWER = 10
    MV_UPPER = 11
    INFREQUENCY = 12
    MS_LOWER = 13
    MS_UPPER = 14
    SIZE_LOWER = 15
    SIZE_UPPER = 16


LOWER_FAMILIES = frozenset({RowFamily.SV_LOWER, RowFamily.MV_LOWER, RowFamily.MS_LOWER, RowFamily.SIZE_LOWER})
ARTIFICIAL_FAMILIES = frozenset(RowFamily) - {RowFamily.INFREQUENCY, RowFamily.SIZE_UPPER}


@dataclass(frozen=True)
class Row:
    family: RowFamily
    selection: SelectionList | None  # None: size rows, satisfied by every transaction
    rhs: int
    label: str

    @property
    def sign(self) -> int:
        return 1 if self.family in LOWER_FAMILIES else -1

    @property
    def has_artificial(self) -> bool:
        return self.family in ARTIFICIAL_FAMILIES


class RowSet:
    """Ordered LP rows with a vectorized incidence evaluator."""

    def __init__(self, inst: ConstraintInstance, rows: Sequence[Row]):
        self.inst = inst
        self.schema = inst.schema
        self.rows = tuple(rows)
        self.rhs = tuple(row.rhs for row in self.rows)
        self._encode()

    @property
    def r(self) -> int:
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, g):
        return self.rows[g]

    def family_counts(self) -> dict[RowFamily, int]:
        counts = {f: 0 for f in RowFamily}
        for row in self.rows:
            counts[row.family] += 1
        return counts

    def _encode(self):
        s = self.schema
        r = self.r
        self.kernel_ok = all(n <= _KERNEL_MAX_MV for n in s.mv_sizes)
        self.row_sign = np.array([row.sign for row in self.rows], dtype=np.int8)
        if not self.kernel_ok:
            return
        self.row_sv = np.full((r, s.p), -1, dtype=np.int32)
        self.row_mv = np.zeros((r, s.q), dtype=np.uint64)
        self.row_op = np.zeros((r, s.q), dtype=np.int8)
        for g, row in enumerate(self.rows):
            if row.selection is None:
                continue
            for pos, k in row.selection.sv_tests:
                self.row_sv[g, pos] = k
            for pos, mask, eq in row.selection.mv_tests:
                self.row_mv[g, pos] = mask
                self.row_op[g, pos] = 2 if eq else 1

    def column_of(self, t: Transaction) -> tuple[int, ...]:
        """Coefficient vector of transaction ``t`` (entries in {-1, 0, +1})."""
        if t.schema is not self.schema and t.schema != self.schema:
            raise SchemaMismatch("transaction is defined over a different schema")
        return tuple(
            row.sign if row.selection is None or row.selection.matches(t) else 0
            for row in self.rows
        )

    def incidence(self, transactions: Sequence[Transaction]) -> np.ndarray:
        """``(len(transactions), r)`` int8 coefficient matrix."""
        n = len(transactions)
        if not self.kernel_ok:
            return np.array([self.column_of(t) for t in transactions], dtype=np.int8).reshape(n, self.r)
        s = self.schema
        sv = np.array([t.sv for t in transactions], dtype=np.int32).reshape(n, s.p)
        mv = np.array([t.mv for t in transactions], dtype=np.uint64).reshape(n, s.q)
        return _backend.kernels.row_incidence(
            np.ascontiguousarray(sv), np.ascontiguousarray(mv),
            self.row_sv, self.row_mv, self.row_op, self.row_sign,
        )


def build_rows(inst: ConstraintInstance, border: Border) -> RowSet:
    """Rows in family order; inside a family by attribute, then item or itemset order."""
    schema = inst.schema
    sv_by_key = {c.selection.sv_tests[0]: c for c in inst.sv_constraints}
    sv_cons = [sv_by_key[(i, k)] for i in range(schema.p) for k in range(schema.sv_sizes[i])]
    mv_cons = sorted(inst.mv_constraints, key=lambda c: c.selection.mv_tests[0][:2])

    rows: list[Row] = []

    def pair(lower_family, upper_family, cons, tag):
        for c in cons:
            rows.append(Row(lower_family, c.selection, c.lo, f"{tag}-lower{c.selection.describe()}"))
        for c in cons:
            rows.append(Row(upper_family, c.selection, -c.hi, f"{tag}-upper{c.selection.describe()}"))

    pair(RowFamily.SV_LOWER, RowFamily.SV_UPPER, sv_cons, "sv")
    pair(RowFamily.MV_LOWER, RowFamily.MV_UPPER, mv_cons, "mv")
    if inst.sigma_prime is not None:
        for i, attr in enumerate(schema.mv_attrs):
            for mask in border[i]:
                sel = SelectionList(schema, [MVSelection(attr.name, schema.items_of(i, mask), SUBSET)])
                rows.append(Row(RowFamily.INFREQUENCY, sel, -inst.sigma_prime, f"infrequency{sel.describe()}"))
    lowers = list(inst.ms_constraints)
    for c in lowers:
        rows.append(Row(RowFamily.MS_LOWER, c.selection, c.lo, f"ms-lower{c.selection.describe()}"))
    for c in lowers:
        rows.append(Row(RowFamily.MS_UPPER, c.selection, -c.hi, f"ms-upper{c.selection.describe()}"))
    rows.append(Row(RowFamily.SIZE_LOWER, None, inst.size, "size-lower"))
    rows.append(Row(RowFamily.SIZE_UPPER, None, -inst.size, "size-upper"))
    return RowSet(inst, rows)


@dataclass(frozen=True)
class Artificial:
    row: int


@dataclass(frozen=True)
class TransactionCol:
    transaction: Transaction


MasterColumn = Union[Artificial, TransactionCol]


def column_of(t: Transaction, rows: RowSet) -> tuple[int, ...]:
    return rows.column_of(t)


def upper_bound_of(t: Transaction, dups: Iterable[DuplicateConstraint]) -> int | None:
    return duplicate_cap(dups, t)


def seed_transactions(inst: ConstraintInstance) -> list[Transaction]:
    """One column per frequent itemset: first item on every SV attribute, the itemset on its
    MV attribute, empty elsewhere."""
    schema = inst.schema
    sv = (0,) * schema.p
    seeds = []
    for i in range(schema.q):
        for mask in inst.frequent_itemsets(i):
            mv = [0] * schema.q
            mv[i] = mask
            seeds.append(Transaction(schema, sv, mv))
    return seeds


@dataclass(frozen=True)
class InitialState:
    columns: tuple[MasterColumn, ...]
    basis: tuple[int, ...]  # per row: structural index into ``columns`` or a logical ref
    values: tuple[int, ...]  # basic values aligned with ``basis``

    @property
    def objective(self) -> int:
        return sum(v for ref, v in zip(self.basis, self.values)
                   if ref >= 0 and isinstance(self.columns[ref], Artificial))


def initial_state(inst: ConstraintInstance, rows: RowSet) -> InitialState:
    """Artificials for every row that has one, plus the seed transactions.

    Start point: all x = 0, lower-row artificials at their rhs, upper-row
    artificials at 0 (nonbasic), surplus of upper, infrequency and size-upper
    rows at minus their rhs.
    """
    columns: list[MasterColumn] = []
    art_index = {}
    for g, row in enumerate(rows):
        if row.has_artificial:
            art_index[g] = len(columns)
            columns.append(Artificial(g))
    columns.extend(TransactionCol(t) for t in seed_transactions(inst))
    basis, values = [], []
    for g, row in enumerate(rows):
        if row.sign > 0:
            basis.append(art_index[g])
            values.append(row.rhs)
        else:
            basis.append(logical(g))
            values.append(-row.rhs)
    return InitialState(tuple(columns), tuple(basis), tuple(values))


class MasterProblem:
    """The LP restricted to an explicit, growing list of master columns."""

    def __init__(self, inst: ConstraintInstance, rows: RowSet, columns: Sequence[MasterColumn] = (),
                 arithmetic: str = RATIONAL):
        self.inst = inst
        self.rows = rows
        self.lp = LinearProgram(rows.rhs, arithmetic)
        self.columns: list[MasterColumn] = []
        self._by_transaction: dict[Transaction, int] = {}
        arts = [c for c in columns if isinstance(c, Artificial)]
        if arts:
            block = np.zeros((len(arts), rows.r), dtype=np.int8)
            for k, c in enumerate(arts):
                block[k, c.row] = 1
            self.lp.add_columns(block, [1] * len(arts))
            self.columns.extend(arts)
        rest = [c.transaction for c in columns if isinstance(c, TransactionCol)]
        if len(arts) + len(rest) != len(columns):
            raise ValueError("artificial columns must precede transaction columns")
        self.add_transactions(rest)

    def add_transactions(self, transactions: Sequence[Transaction]) -> range:
        fresh = [t for t in transactions if t not in self._by_transaction]
        if not fresh:
            return range(self.lp.n, self.lp.n)
        block = self.rows.incidence(fresh)
        caps = [upper_bound_of(t, self.inst.dup_constraints) for t in fresh]
        idx = self.lp.add_columns(block, [0] * len(fresh), caps)
        for j, t in zip(idx, fresh):
            self._by_transaction[t] = j
            self.columns.append(TransactionCol(t))
        return idx

    def index_of(self, t: Transaction) -> int | None:
        return self._by_transaction.get(t)

    def transaction_at(self, j: int) -> Transaction | None:
        col = self.columns[j]
        return col.transaction if isinstance(col, TransactionCol) else None

    @property
    def live_columns(self) -> int:
        return self.lp.n

    def dataset(self, values: dict):
        """Fractional dataset read off the positive transaction variables."""
        return Dataset.from_values(
            (self.columns[j].transaction, v)
            for j, v in sorted(values.items())
            if isinstance(self.columns[j], TransactionCol) and v > 0
        )
