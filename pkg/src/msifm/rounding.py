"""Largest-remainder rounding of a fractional dataset to integer counts."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

from .errors import CapSaturation
from .model import Dataset, DuplicateConstraint, duplicate_cap


def _floor(v) -> int:
    return math.floor(Fraction(v))


def round_solution(fractional: Dataset, size: int,
                   dup_constraints: Iterable[DuplicateConstraint] = ()) -> Dataset:
    """Integer dataset of total ``size`` close to ``fractional``.

    Every count is floored (and clamped to its duplicate cap), then the missing
    units go to entries by descending fractional part, ties in canonical
    order.  A unit that would break a cap moves on to the next entry; passes
    repeat while any entry has room.  If units are left over, CapSaturation
    carries the partial dataset.
    """
    dups = tuple(dup_constraints)
    entries = []  # (transaction, floor, remainder, cap)
    for t, v in fractional.items():
        v = Fraction(v)
        cap = duplicate_cap(dups, t)
        base = _floor(v)
        if cap is not None:
            base = min(base, cap)
        entries.append([t, base, v - base, cap])
    missing = size - sum(e[1] for e in entries)

    if missing < 0:
        # only reachable from an input above size: trim the smallest remainders first
        order = sorted(range(len(entries)), key=lambda k: (entries[k][2], -k))
        while missing < 0 and any(e[1] > 0 for e in entries):
            for k in order:
                if missing == 0:
                    break
                if entries[k][1] > 0:
                    entries[k][1] -= 1
                    missing += 1

    # stable sort keeps canonical order among equal remainders
    order = sorted(range(len(entries)), key=lambda k: -entries[k][2])
    while missing > 0:
        placed = False
        for k in order:
            if missing == 0:
                break
            e = entries[k]
            if e[3] is None or e[1] < e[3]:
                e[1] += 1
                missing -= 1
                placed = True
        if not placed:
            break

    result = Dataset((e[0], e[1]) for e in entries if e[1] > 0)
    if missing > 0:
        raise CapSaturation(result, missing)
    return result
