"""Reference solvers: capacity-indexed DP and meet-in-the-middle search.

Both are oracles for the fast solver.  ``solve_bellman`` is the classic
O(n * t) table, vectorized over capacities; it refuses instances whose
table would exceed an explicit cell budget instead of thrashing.
``solve_exhaustive`` is exact for up to 40 items and can also report a
witness subset, which the property tests use to validate solution
structure, not just values.
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np

from .core import INT32_VALUE_CAP, INT64_VALUE_CAP, normalize

DEFAULT_CELL_BUDGET = 600_000_000_000


class BudgetExceededError(RuntimeError):
    """The requested computation is larger than the caller allowed."""


def solve_bellman(raw_items, capacity, cell_budget=DEFAULT_CELL_BUDGET, stats=None):
    """Maximum profit by the textbook capacity DP, one numpy pass per item."""
    inst = normalize(raw_items, capacity)
    if inst.all_fit:
        return inst.total_profit
    t = inst.capacity
    cells = inst.n * (t + 1)
    if cell_budget is not None and cells > cell_budget:
        raise BudgetExceededError(
            f"table needs {cells} cells, over the budget of {cell_budget}"
        )
    if stats is not None:
        stats.note_table(t + 1)
    # cells are nonnegative and bounded by the profit total, so the narrowest
    # sufficient dtype is safe; narrower cells mean fewer bytes per pass
    total_profit = sum(it.profit for it in inst.items)
    if total_profit > INT64_VALUE_CAP:
        dtype = object
    elif total_profit <= INT32_VALUE_CAP:
        dtype = np.int32
    else:
        dtype = np.int64
    dp = np.zeros(t + 1, dtype=dtype)
    tmp = np.empty(t + 1, dtype=dtype)
    for w, p in inst.items:
        # temp copy keeps this a 0-1 update: sources predate the writes
        head = t + 1 - w
        np.add(dp[:head], p, out=tmp[:head])
        np.maximum(dp[w:], tmp[:head], out=dp[w:])
    return int(dp[t])


def _half_profiles(items, capacity):
    """All (weight, profit, index mask) triples of one half, weight-feasible."""
    out = [(0, 0, 0)]
    for pos, (w, p, bit) in enumerate(items):
        out += [(tw + w, tp + p, m | bit) for tw, tp, m in out if tw + w <= capacity]
    return out


def solve_exhaustive(raw_items, capacity, with_subset=False):
    """Exact answer by meet-in-the-middle; items are limited to 40.

    With ``with_subset`` the return value is (profit, frozenset of indices
    into raw_items); ties resolve deterministically toward the subset found
    first in enumeration order.
    """
    items = [(w, p) for w, p in raw_items]
    n = len(items)
    if n > 40:
        raise BudgetExceededError("exhaustive solver accepts at most 40 items")
    for w, p in items:
        if w < 1 or p < 1:
            raise ValueError("weights and profits must be positive")
    tagged = [(w, p, 1 << i) for i, (w, p) in enumerate(items)]
    left = _half_profiles(tagged[: n // 2], capacity)
    right = _half_profiles(tagged[n // 2 :], capacity)

    right.sort(key=lambda e: (e[0], -e[1]))
    r_weights = [e[0] for e in right]
    best_p = []
    best_m = []
    cur_p, cur_m = -1, 0
    for _, p, m in right:
        if p > cur_p:
            cur_p, cur_m = p, m
        best_p.append(cur_p)
        best_m.append(cur_m)

    top = -1
    top_mask = 0
    for w, p, m in left:
        pos = bisect_right(r_weights, capacity - w) - 1
        if pos < 0:
            continue
        cand = p + best_p[pos]
        if cand > top:
            top = cand
            top_mask = m | best_m[pos]
    if not with_subset:
        return top if top >= 0 else 0
    if top < 0:
        return 0, frozenset()
    chosen = frozenset(i for i in range(n) if top_mask >> i & 1)
    return top, chosen
