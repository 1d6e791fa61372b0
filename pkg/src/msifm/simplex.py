"""Revised simplex for ``min c x  s.t.  A x >= b,  0 <= x <= u``.

Every row ``g`` gets an implicit surplus (logical) column ``-e_g`` with cost 0
and no upper bound, turning the rows into equalities.  Variables are
partitioned into basic (B), nonbasic at upper bound (U) and nonbasic at zero
(N); caps are never rows.  Entering and leaving choices follow Bland's rule
over the internal column order (logicals first, then structural columns in
insertion order), which rules out cycling.

Exact mode keeps ``B^-1`` as an integer matrix over a common denominator and
updates it with fraction-free (Bareiss) pivots when the coefficient matrix is
integral; otherwise it falls back to ``Fraction`` entries.  Float mode uses
float64 with a 1e-9 pivot tolerance and periodic refactorization.

Column references in :class:`BasisState` are structural indices ``j >= 0``;
the logical column of row ``g`` is ``-1 - g``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _backend
from .errors import DimensionMismatch, NumericFailure

RATIONAL = "rational"
FLOAT = "float"
FLOAT_TOL = 1e-9
REFACTOR_EVERY = 64

OPTIMAL = "optimal"
TIME_LIMIT = "time_limit"

_LOWER, _UPPER, _BASIC = 0, 1, 2


def logical(row: int) -> int:
    """Column reference of the surplus variable of ``row``."""
    return -1 - row


def _is_integral(x) -> bool:
    return isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1)


class LinearProgram:
    """Columns of an LP with ``>=`` rows.  ``upper=None`` means uncapped."""

    def __init__(self, rhs: Sequence, arithmetic: str = RATIONAL):
        if arithmetic not in (RATIONAL, FLOAT):
            raise ValueError(f"arithmetic must be {RATIONAL!r} or {FLOAT!r}")
        self.arithmetic = arithmetic
        conv = float if arithmetic == FLOAT else Fraction
        self.rhs = tuple(conv(b) for b in rhs)
        for b in self.rhs:
            if not math.isfinite(b):
                raise ValueError("rhs values must be finite")
        self.r = len(self.rhs)
        self._conv = conv
        self.coef = np.zeros((0, self.r), dtype=np.int8)
        self.costs: list = []
        self.uppers: list = []

    @property
    def n(self) -> int:
        return len(self.costs)

    @property
    def small_integral(self) -> bool:
        return self.coef.dtype == np.int8

    def _block(self, matrix) -> np.ndarray:
        block = np.asarray(matrix)
        if block.ndim != 2 or block.shape[1] != self.r:
            raise DimensionMismatch(f"column block must have shape (k, {self.r})")
        if self.arithmetic == FLOAT:
            return block.astype(np.float64)
        if block.dtype.kind in "iub":
            if block.size == 0 or np.abs(block.astype(np.int64)).max() <= 127:
                return block.astype(np.int8)
            return block.astype(object)
        exact = np.empty(block.shape, dtype=object)
        for idx, v in np.ndenumerate(block):
            exact[idx] = Fraction(v)
        if all(v.denominator == 1 and abs(v) <= 127 for v in exact.flat):
            return exact.astype(np.int64).astype(np.int8)
        return exact

    def add_columns(self, matrix, costs: Sequence, uppers: Sequence | None = None) -> range:
        """Append ``k`` columns given as a ``(k, r)`` coefficient array."""
        block = self._block(matrix)
        k = block.shape[0]
        costs = list(costs)
        uppers = [None] * k if uppers is None else list(uppers)
        if len(costs) != k or len(uppers) != k:
            raise DimensionMismatch("costs/uppers length must match the number of columns")
        for u in uppers:
            if u is not None and not u > 0:
                raise ValueError("column caps must be positive")
        if block.dtype != self.coef.dtype:
            target = np.float64 if self.arithmetic == FLOAT else object
            self.coef = self.coef.astype(target)
            block = block.astype(target)
        start = self.n
        self.coef = np.concatenate([self.coef, block]) if start else block.copy()
        self.costs.extend(self._conv(c) for c in costs)
        self.uppers.extend(None if u is None else self._conv(u) for u in uppers)
        return range(start, self.n)

    def add_column(self, coeffs, cost=0, upper=None) -> int:
        """Append one column given densely (length r) or as ``{row: value}``."""
        if isinstance(coeffs, dict):
            dense = [0] * self.r
            for g, v in coeffs.items():
                dense[g] = v
            coeffs = dense
        if len(coeffs) != self.r:
            raise DimensionMismatch(f"column has {len(coeffs)} entries, LP has {self.r} rows")
        return self.add_columns([list(coeffs)], [cost], [upper])[0]


@dataclass(frozen=True)
class BasisState:
    """Immutable snapshot of an extended basic solution."""

    basic: tuple[int, ...]
    at_upper: frozenset
    values: tuple
    duals: tuple
    objective: object
    status: str

    def value_of(self, ref: int, lp: LinearProgram | None = None):
        if ref in self.at_upper:
            if lp is None:
                raise ValueError("need the LP to read a capped value")
            return lp.uppers[ref]
        try:
            return self.values[self.basic.index(ref)]
        except ValueError:
            return 0


@dataclass(frozen=True)
class PivotRecord:
    kind: str  # "pivot" or "flip"
    entering: int
    leaving: int | None
    objective: object
    basis_key: tuple


def reduced_cost_of(column: Sequence, cost, duals: Sequence):
    """``cost - duals . column``."""
    if len(column) != len(duals):
        raise DimensionMismatch(f"column has {len(column)} rows, duals {len(duals)}")
    return cost - sum((d * a for d, a in zip(duals, column) if a), 0)


class RevisedSimplex:
    """Stateful bounded-variable revised simplex over a growing column set.

    Columns appended to ``lp`` after construction enter at zero, so the
    current basis stays feasible and the next :meth:`solve` continues from it.
    """

    def __init__(self, lp: LinearProgram, basis: Sequence[int] | None = None,
                 at_upper: Sequence[int] = (), *, trace: bool = False, audit: bool = False):
        self.lp = lp
        self.r = lp.r
        self.exact = lp.arithmetic == RATIONAL
        self.tol = 0 if self.exact else FLOAT_TOL
        self.trace = trace
        self.audit = audit
        self.history: list[PivotRecord] = []
        self.audit_failures: list[int] = []
        self.pivots = 0
        self._since_refactor = 0
        self._zero = Fraction(0) if self.exact else 0.0
        self._cost_cache = None
        n = lp.n
        self._status = np.zeros(n, dtype=np.int8)
        for j in at_upper:
            if lp.uppers[j] is None:
                raise NumericFailure(f"column {j} has no cap and cannot start at its upper bound")
            self._status[j] = _UPPER
        if basis is None:
            basis = self._crash()
        basis = list(basis)
        if len(basis) != self.r or len(set(basis)) != self.r:
            raise NumericFailure("initial basis must list r distinct columns")
        self.head = basis
        self._logical_basic = [False] * self.r
        for ref in basis:
            self._mark(ref, True)
        self._refactor()
        self._check_start()
        self.objective = self._objective()

    # -- structure helpers -------------------------------------------------

    def _sync(self):
        grow = self.lp.n - self._status.shape[0]
        if grow > 0:
            self._status = np.concatenate([self._status, np.zeros(grow, dtype=np.int8)])

    def _mark(self, ref, basic: bool):
        if ref < 0:
            self._logical_basic[-1 - ref] = basic
        else:
            self._status[ref] = _BASIC if basic else _LOWER

    def _column(self, ref) -> np.ndarray:
        if ref < 0:
            col = np.zeros(self.r, dtype=np.int8 if self.lp.small_integral else self.lp.coef.dtype)
            col[-1 - ref] = -1
            return col
        return self.lp.coef[ref]

    def _cost(self, ref):
        return self._zero if ref < 0 else self.lp.costs[ref]

    def _upper(self, ref):
        return None if ref < 0 else self.lp.uppers[ref]

    def _order(self, ref) -> int:
        # Bland order: logicals first, then structural columns.
        return -1 - ref if ref < 0 else self.r + ref

    def _crash(self) -> list[int]:
        """Pick a feasible starting basis: logicals on rows with b <= 0, unit columns elsewhere."""
        basis = []
        lp = self.lp
        nz = lp.coef != 0
        used = set()
        for g, b in enumerate(lp.rhs):
            if b <= 0:
                basis.append(logical(g))
                continue
            found = None
            for j in np.flatnonzero(nz[:, g]):
                j = int(j)
                v = lp.coef[j, g]
                if j in used or nz[j].sum() != 1 or not v > 0:
                    continue
                u = lp.uppers[j]
                if u is None or b / v <= u:
                    found = j
                    break
            if found is None:
                raise NumericFailure(f"no feasible starting column for row {g}")
            used.add(found)
            basis.append(found)
        return basis

    # -- factorization -----------------------------------------------------

    def _refactor(self):
        r = self.r
        self._int_mode = self.exact and self.lp.small_integral
        if not self.exact:
            B = np.zeros((r, r))
            for pos, ref in enumerate(self.head):
                B[:, pos] = self._column(ref)
            try:
                self._N = np.linalg.inv(B)
            except np.linalg.LinAlgError:
                raise NumericFailure("singular basis") from None
            self._d = 1
            self._recompute_values()
            self._since_refactor = 0
            return
        B = [[Fraction(0)] * r for _ in range(r)]
        for pos, ref in enumerate(self.head):
            col = self._column(ref)
            for g in np.flatnonzero(col):
                B[g][pos] = Fraction(col[g])
        inv, det = _gauss_jordan_inverse(B)
        N = np.empty((r, r), dtype=object)
        if self._int_mode:
            d = abs(det)
            for i in range(r):
                for k in range(r):
                    v = inv[i][k] * d
                    if v.denominator != 1:
                        raise NumericFailure("adjugate is not integral")
                    N[i, k] = int(v)
            self._N, self._d = N, int(d)
        else:
            for i in range(r):
                for k in range(r):
                    N[i, k] = inv[i][k]
            self._N, self._d = N, 1
        self._recompute_values()
        self._since_refactor = 0

    def _binv_times(self, vec) -> list:
        """``B^-1 vec`` as exact Fractions (or floats)."""
        nz = np.flatnonzero(vec)
        if self._int_mode:
            num = self._N[:, nz].dot(vec[nz].astype(object)) if nz.size else [0] * self.r
            d = self._d
            return [Fraction(int(v), d) for v in num]
        if self.exact:
            num = self._N[:, nz].dot(vec[nz].astype(object)) if nz.size else [Fraction(0)] * self.r
            return [Fraction(v) for v in num]
        return list(self._N[:, nz] @ vec[nz].astype(np.float64))

    def _recompute_values(self):
        lp = self.lp
        rhs = np.array(lp.rhs, dtype=object if self.exact else np.float64)
        for j in np.flatnonzero(self._status[: lp.n] == _UPPER):
            rhs = rhs - lp.coef[j].astype(rhs.dtype) * lp.uppers[j]
        if self.exact:
            N = self._N
            d = self._d
            self.xB = [Fraction(sum((N[i, k] * rhs[k] for k in range(self.r) if rhs[k]), Fraction(0))) / d
                       for i in range(self.r)]
        else:
            self.xB = list(self._N @ rhs)

    def _check_start(self):
        for pos, ref in enumerate(self.head):
            v = self.xB[pos]
            u = self._upper(ref)
            if v < -self.tol or (u is not None and v > u + self.tol):
                raise NumericFailure("starting basis is not primal feasible")

    # -- pricing and pivoting ----------------------------------------------

    def _duals_scaled(self):
        """``c_B N`` where ``y = c_B N / d``."""
        cb = [self._cost(ref) for ref in self.head]
        nz = [i for i, c in enumerate(cb) if c]
        if self._int_mode:
            if not nz:
                return np.zeros(self.r, dtype=object)
            return np.array(cb, dtype=object)[nz].dot(self._N[nz, :])
        if self.exact:
            if not nz:
                return np.array([Fraction(0)] * self.r, dtype=object)
            return np.array(cb, dtype=object)[nz].dot(self._N[nz, :])
        return np.array(cb, dtype=np.float64) @ self._N

    def duals(self) -> tuple:
        y = self._duals_scaled()
        if self._int_mode:
            return tuple(Fraction(int(v), self._d) for v in y)
        if self.exact:
            return tuple(Fraction(v) for v in y)
        return tuple(float(v) for v in y)

    def _choose_entering(self):
        """Bland's rule: the lowest-ordered column that improves the objective."""
        y = self._duals_scaled()
        tol = self.tol
        # logical column g has reduced cost y_g and can only increase
        for g in range(self.r):
            if not self._logical_basic[g] and y[g] < -tol:
                return logical(g), 1
        self._sync()
        lp = self.lp
        if lp.n == 0:
            return None, 0
        j = self._scan_structural(y)
        if j < 0:
            return None, 0
        return j, (1 if self._status[j] == _LOWER else -1)

    def _integral_costs(self):
        lp = self.lp
        if self._cost_cache is None or self._cost_cache[0] != lp.n:
            if all(c.denominator == 1 for c in lp.costs):
                ints = np.array([int(c) for c in lp.costs], dtype=object)
                cmax = max((abs(int(c)) for c in lp.costs), default=0)
            else:
                ints, cmax = None, None
            self._cost_cache = (lp.n, ints, cmax)
        return self._cost_cache[1], self._cost_cache[2]

    def _scan_structural(self, y) -> int:
        lp = self.lp
        state = self._status[: lp.n]
        if self._int_mode:
            d = self._d
            ints, cmax = self._integral_costs()
            if ints is not None:
                ymax = max((abs(int(v)) for v in y), default=0)
                if ymax * self.r + cmax * d < _backend.INT64_SAFE:
                    y64 = np.array([int(v) for v in y], dtype=np.int64)
                    c64 = ints.astype(np.int64) * np.int64(d)
                    return _backend.kernels.bland_entering(lp.coef, y64, c64, state)
                scaled = ints * d - lp.coef.astype(object).dot(y)
            else:
                scaled = np.array(lp.costs, dtype=object) * d - lp.coef.astype(object).dot(y)
        elif self.exact:
            scaled = np.array(lp.costs, dtype=object) - lp.coef.astype(object).dot(y)
        else:
            scaled = np.array(lp.costs, dtype=np.float64) - lp.coef @ y
        tol = self.tol
        eligible = ((state == _LOWER) & (scaled < -tol)) | ((state == _UPPER) & (scaled > tol))
        hits = np.flatnonzero(eligible)
        return int(hits[0]) if hits.size else -1

    def _basis_key(self):
        self._sync()
        return (frozenset(self.head), frozenset(np.flatnonzero(self._status == _UPPER).tolist()))

    def _step(self, e: int, direction: int):
        lp = self.lp
        alpha = self._binv_times(self._column(e))
        tol = self.tol
        theta = None
        leave = None
        leave_to_upper = False
        for i in range(self.r):
            di = alpha[i] * direction
            if di > tol:
                t = self.xB[i] / di
                to_upper = False
            elif di < -tol:
                ub = self._upper(self.head[i])
                if ub is None:
                    continue
                t = (ub - self.xB[i]) / (-di)
                to_upper = True
            else:
                continue
            if not self.exact and t < 0:
                t = 0.0
            if (theta is None or t < theta
                    or (t == theta and self._order(self.head[i]) < self._order(self.head[leave]))):
                theta, leave, leave_to_upper = t, i, to_upper
        ue = self._upper(e)
        if ue is not None and (theta is None or ue <= theta):
            # bound flip: no basis change
            for i in range(self.r):
                if alpha[i]:
                    self.xB[i] -= direction * ue * alpha[i]
            self._status[e] = _UPPER if direction > 0 else _LOWER
            self._after_move("flip", e, None)
            return
        if theta is None:
            raise NumericFailure(f"unbounded direction along column {e}")
        for i in range(self.r):
            if alpha[i]:
                self.xB[i] -= direction * theta * alpha[i]
        start = self._zero if direction > 0 else ue
        entering_value = start + direction * theta
        out = self.head[leave]
        self._update_inverse(leave, e)
        self.head[leave] = e
        self.xB[leave] = entering_value
        self._mark(e, True)
        if out < 0:
            self._logical_basic[-1 - out] = False
        else:
            self._status[out] = _UPPER if leave_to_upper else _LOWER
        if not self.exact:
            self._since_refactor += 1
            if self._since_refactor >= REFACTOR_EVERY:
                self._refactor()
        self._after_move("pivot", e, out)

    def _update_inverse(self, i: int, e: int):
        col = self._column(e)
        if self._int_mode:
            nz = np.flatnonzero(col)
            a = self._N[:, nz].dot(col[nz].astype(object))
            ai = int(a[i])
            if ai == 0:
                raise NumericFailure("zero pivot")
            row = self._N[i].copy()
            N = (self._N * ai - np.outer(a, row)) // self._d
            N[i] = row
            d = ai
            if d < 0:
                N, d = -N, -d
            self._N, self._d = N, d
        else:
            a = np.array(self._binv_times(col), dtype=object if self.exact else np.float64)
            ai = a[i]
            if abs(ai) <= self.tol:
                raise NumericFailure("zero pivot")
            row = self._N[i] / ai
            self._N = self._N - np.outer(a, row)
            self._N[i] = row

    def _after_move(self, kind, e, out):
        self.pivots += 1
        before = self.objective
        self.objective = self._objective()
        if not self.exact:
            self.xB = [0.0 if abs(v) < self.tol else v for v in self.xB]
        if self.trace:
            self.history.append(PivotRecord(kind, e, out, self.objective, self._basis_key()))
        if self.audit:
            if not self.check_feasible() or self.objective > before + self.tol:
                self.audit_failures.append(self.pivots)

    def _objective(self):
        lp = self.lp
        total = sum((self._cost(ref) * v for ref, v in zip(self.head, self.xB) if ref >= 0), self._zero)
        for j in np.flatnonzero(self._status[: lp.n] == _UPPER):
            total += lp.costs[j] * lp.uppers[j]
        return total if self.exact else float(total)

    def solve(self, deadline: float | None = None, max_pivots: int | None = None) -> str:
        """Pivot to optimality; returns OPTIMAL or TIME_LIMIT.  ``deadline`` is ``time.monotonic()`` based."""
        self._sync()
        done = 0
        while True:
            if deadline is not None and time.monotonic() >= deadline:
                return TIME_LIMIT
            if max_pivots is not None and done >= max_pivots:
                raise NumericFailure(f"pivot limit {max_pivots} reached")
            e, direction = self._choose_entering()
            if e is None:
                return OPTIMAL
            self._step(e, direction)
            done += 1

    # -- inspection --------------------------------------------------------

    def at_upper(self) -> frozenset:
        self._sync()
        return frozenset(int(j) for j in np.flatnonzero(self._status == _UPPER))

    def values(self) -> dict:
        """Nonzero structural values ``{j: x_j}``."""
        out = {}
        for ref, v in zip(self.head, self.xB):
            if ref >= 0 and v != 0:
                out[ref] = v if self.exact else float(v)
        for j in self.at_upper():
            out[j] = self.lp.uppers[j]
        return out

    def reduced_cost(self, ref: int):
        y = self.duals()
        col = self._column(ref)
        return reduced_cost_of(col.tolist(), self._cost(ref), y)

    def check_feasible(self) -> bool:
        """Recompute ``A x - s = b`` and all bounds from scratch."""
        lp = self.lp
        tol = self.tol if self.exact else 1e-7
        surplus = [self._zero] * self.r
        for ref, v in zip(self.head, self.xB):
            u = self._upper(ref)
            if v < -tol or (u is not None and v > u + tol):
                return False
            if ref < 0:
                surplus[-1 - ref] = v
        activity = [self._zero] * self.r
        for j, v in self.values().items():
            col = lp.coef[j]
            for g in np.flatnonzero(col):
                activity[g] += col[g] * v
        for g in range(self.r):
            if abs(activity[g] - surplus[g] - lp.rhs[g]) > tol:
                return False
        return True

    def state(self, status: str = OPTIMAL) -> BasisState:
        return BasisState(
            basic=tuple(self.head),
            at_upper=self.at_upper(),
            values=tuple(self.xB),
            duals=self.duals(),
            objective=self.objective,
            status=status,
        )


def _gauss_jordan_inverse(B):
    """Inverse and determinant of a square Fraction matrix (lists)."""
    r = len(B)
    M = [row[:] + [Fraction(int(i == k)) for k in range(r)] for i, row in enumerate(B)]
    det = Fraction(1)
    for c in range(r):
        piv = None
        best = None
        for i in range(c, r):
            v = M[i][c]
            if v != 0 and (best is None or abs(v) > best):
                piv, best = i, abs(v)
        if piv is None:
            raise NumericFailure("singular basis")
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        pv = M[c][c]
        det *= pv
        inv_p = 1 / pv
        M[c] = [v * inv_p for v in M[c]]
        for i in range(r):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                Mi, Mc = M[i], M[c]
                M[i] = [a - f * b for a, b in zip(Mi, Mc)]
    return [row[r:] for row in M], det


def solve_restricted(lp: LinearProgram, warm_start: BasisState | None = None, *,
                     deadline: float | None = None, trace: bool = False) -> BasisState:
    """Optimize ``lp`` over its explicit columns, optionally from a previous basis."""
    if warm_start is not None:
        solver = RevisedSimplex(lp, warm_start.basic, warm_start.at_upper, trace=trace)
    else:
        solver = RevisedSimplex(lp, trace=trace)
    status = solver.solve(deadline)
    return solver.state(status)
