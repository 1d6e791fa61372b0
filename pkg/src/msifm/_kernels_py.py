"""Reference implementations of the hot kernels (numpy, no compiled code).

Signatures and results match ``_kernels.pyx`` exactly; the compiled module
only adds speed (and early exit in ``bland_entering``).
"""

from __future__ import annotations

import numpy as np


def row_incidence(sv, mv, row_sv, row_mv, row_op, row_sign):
    """Coefficient matrix ``(n, r)``: ``row_sign[g]`` where transaction n satisfies row g, else 0.

    ``row_sv[g, a] < 0`` means row g does not test SV attribute a;
    ``row_op[g, b]`` is 0 (no test), 1 (subset) or 2 (equality) on MV attribute b.
    """
    n = sv.shape[0]
    r = row_sign.shape[0]
    ok = np.ones((n, r), dtype=bool)
    for a in range(row_sv.shape[1]):
        want = row_sv[:, a]
        active = want >= 0
        if active.any():
            ok[:, active] &= sv[:, a, None] == want[None, active]
    for b in range(row_op.shape[1]):
        ops = row_op[:, b]
        have = mv[:, b, None]
        sub = ops == 1
        if sub.any():
            need = row_mv[sub, b][None, :]
            ok[:, sub] &= (need & ~have) == 0
        eq = ops == 2
        if eq.any():
            ok[:, eq] &= have == row_mv[eq, b][None, :]
    return np.where(ok, row_sign[None, :], 0).astype(np.int8)


def bland_entering(cols, y, cost, state):
    """First column j with ``state[j] == 0`` and ``D_j < 0`` or ``state[j] == 1`` and ``D_j > 0``,
    where ``D = cost - cols @ y``.  Returns -1 when no column qualifies."""
    d = cost - cols.astype(np.int64) @ y
    eligible = ((state == 0) & (d < 0)) | ((state == 1) & (d > 0))
    hits = np.flatnonzero(eligible)
    return int(hits[0]) if hits.size else -1


def masked_argmin(cols, y, excluded):
    """Index and value of the first minimum of ``-cols @ y`` over non-excluded rows.

    Returns ``(-1, 0)`` when every row is excluded.
    """
    vals = -(cols.astype(np.int64) @ y)
    keep = excluded == 0
    if not keep.any():
        return -1, 0
    idx = np.flatnonzero(keep)
    best = idx[np.argmin(vals[idx])]
    return int(best), int(vals[best])
