"""Hint-guided extension of sparse DP tables.

The central object is a table q over signed indices [-L, L] together with a
hint set S[i] per finite entry: a set of item weights that are still allowed
to extend entry i.  ``solve_singleton`` handles the case where every hint
has at most one weight, by running SMAWK over each (weight, residue) group
and merging the resulting winner rows with a bucket scan, so the work stays
near-linear in table size plus hint count.  ``solve_small_b`` lifts that to
hint sets of size <= b through isolating colorings, and ``solve`` handles
arbitrary budgets by first splitting the weight universe with a
balls-and-bins coloring.

Outputs are "relaxed" solutions: entry i is guaranteed optimal only when
every maximizer of i keeps its support inside S[z] for its base z; they are
always feasible, support-disciplined, and never below the trivial value
q[i].  ``relaxed_check`` verifies exactly this contract by enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .colorings import (
    det_balls_and_bins,
    det_isolating_colorings,
    is_isolated,
)
from .core import BOTTOM, is_bottom
from .smawk import row_maxima


class ConcaveProfitFn:
    """Profit of taking x items of one weight class, x in [0, cap].

    Backed by a prefix-sum tuple; prefix[0] must be 0 and the increments
    must be nonincreasing (items of a class are used best-first).
    """

    __slots__ = ("prefix", "cap")

    def __init__(self, prefix):
        prefix = tuple(prefix)
        if not prefix or prefix[0] != 0:
            raise ValueError("prefix profits must start at 0")
        for k in range(2, len(prefix)):
            if prefix[k] - prefix[k - 1] > prefix[k - 1] - prefix[k - 2]:
                raise ValueError("profit increments must be nonincreasing")
        self.prefix = prefix
        self.cap = len(prefix) - 1

    def value(self, x: int) -> int:
        if x < 0:
            raise ValueError("negative multiplicity")
        return self.prefix[min(x, self.cap)]

    def spread(self) -> int:
        return max(self.prefix) - min(self.prefix)

    def __repr__(self):  # pragma: no cover
        return f"ConcaveProfitFn({list(self.prefix)!r})"


class SetStore:
    """Interned hint sets addressed by integer handles.

    Restriction and difference against another stored set are memoized, so
    chains of restrict/update calls share structure instead of copying.
    """

    def __init__(self):
        self._sets: list[frozenset] = []
        self._handles: dict[frozenset, int] = {}
        self._inter_memo: dict[tuple[int, int], int] = {}
        self._minus_memo: dict[tuple[int, int], int] = {}

    def add(self, elems) -> int:
        s = frozenset(elems)
        h = self._handles.get(s)
        if h is None:
            h = len(self._sets)
            self._sets.append(s)
            self._handles[s] = h
        return h

    def get(self, handle: int) -> frozenset:
        return self._sets[handle]

    def intersect(self, handle: int, other: int) -> int:
        key = (handle, other)
        h = self._inter_memo.get(key)
        if h is None:
            h = self.add(self._sets[handle] & self._sets[other])
            self._inter_memo[key] = h
        return h

    def subtract(self, handle: int, other: int) -> int:
        key = (handle, other)
        h = self._minus_memo.get(key)
        if h is None:
            h = self.add(self._sets[handle] - self._sets[other])
            self._minus_memo[key] = h
        return h


@dataclass
class ExtendStats:
    """Work counters for the extension solvers (asserted in tests)."""

    matrix_evals: int = 0
    ap_count: int = 0
    bucket_inserts: int = 0

    def absorb(self, other: "ExtendStats") -> None:
        self.matrix_evals += other.matrix_evals
        self.ap_count += other.ap_count
        self.bucket_inserts += other.bucket_inserts


@dataclass
class HintedExtendInstance:
    half_size: int
    universe: tuple
    q: list
    hint_handles: list
    fns: dict
    store: SetStore

    @classmethod
    def build(cls, half_size, q, hint_sets, fns, store=None):
        """Construct from plain values; hint_sets entries are sets or None."""
        store = store if store is not None else SetStore()
        handles = [None if s is None else store.add(s) for s in hint_sets]
        inst = cls(half_size, tuple(sorted(fns)), list(q), handles, dict(fns), store)
        inst.validate()
        return inst

    @property
    def size(self) -> int:
        return 2 * self.half_size + 1

    def slot(self, index: int) -> int:
        if index < -self.half_size or index > self.half_size:
            raise IndexError(index)
        return index + self.half_size

    def indices(self):
        return range(-self.half_size, self.half_size + 1)

    def q_at(self, index: int):
        return self.q[self.slot(index)]

    def hint_set(self, index: int):
        h = self.hint_handles[self.slot(index)]
        return None if h is None else self.store.get(h)

    def validate(self) -> None:
        if len(self.q) != self.size or len(self.hint_handles) != self.size:
            raise ValueError("table arrays disagree with half_size")
        uni = set(self.universe)
        if set(self.fns) != uni:
            raise ValueError("profit functions must cover exactly the universe")
        for w in self.universe:
            if not isinstance(w, int) or w < 1:
                raise ValueError("weights must be positive integers")
        for k in range(self.size):
            defined = self.hint_handles[k] is not None
            finite = not is_bottom(self.q[k])
            if defined != finite:
                raise ValueError("hint sets must exist exactly on finite entries")
            if defined and not self.store.get(self.hint_handles[k]) <= uni:
                raise ValueError("hint sets must stay inside the universe")


@dataclass
class HintedExtendSolution:
    half_size: int
    r: list
    z: list
    x: list
    stats: ExtendStats | None = None

    def slot(self, index: int) -> int:
        return index + self.half_size

    def value(self, index: int):
        return self.r[self.slot(index)]

    def base(self, index: int) -> int:
        return self.z[self.slot(index)]

    def mult(self, index: int) -> dict:
        return self.x[self.slot(index)]


def trivial_solution(inst: HintedExtendInstance) -> HintedExtendSolution:
    size = inst.size
    return HintedExtendSolution(
        inst.half_size,
        list(inst.q),
        list(range(-inst.half_size, inst.half_size + 1)),
        [{} for _ in range(size)],
        ExtendStats(),
    )


def _value_spread(inst: HintedExtendInstance) -> int:
    finite = [v for v in inst.q if not is_bottom(v)]
    spread = (max(finite) - min(finite)) if finite else 0
    fn_spread = max((fn.spread() for fn in inst.fns.values()), default=0)
    return spread + fn_spread + 1


def solve_singleton(inst: HintedExtendInstance) -> HintedExtendSolution:
    """Extend a table whose hint sets all have at most one weight.

    Candidates i = j + x*w for a hinted base j are grouped by weight and
    residue; each group is one concave matrix whose row maxima come from a
    single SMAWK pass.  Winner columns turn into arithmetic progressions
    that a single left-to-right bucket scan merges: at each index the best
    progression is applied (strict improvement only) and advanced one step,
    the rest stay parked.
    """
    L = inst.half_size
    sol = trivial_solution(inst)
    stats = sol.stats
    q = inst.q
    bases_by_group: dict[tuple[int, int], list[int]] = {}
    for i in inst.indices():
        h = inst.hint_handles[i + L]
        if h is None:
            continue
        s = inst.store.get(h)
        if not s:
            continue
        if len(s) > 1:
            raise ValueError("solve_singleton needs hint sets of size <= 1")
        (w,) = s
        bases_by_group.setdefault((w, i % w), []).append(i)

    if not bases_by_group:
        return sol

    big = _value_spread(inst)
    buckets: list[list] = [[] for _ in range(inst.size)]

    for (w, c), cols in sorted(bases_by_group.items()):
        cols.sort()
        fn = inst.fns[w]
        prefix, cap = fn.prefix, fn.cap
        first_row = -L + ((c + L) % w)
        rows = list(range(first_row, L + 1, w))

        def value(ri, cj, _rows=rows, _cols=cols, _w=w, _prefix=prefix, _cap=cap):
            stats.matrix_evals += 1
            i = _rows[ri - 1]
            j = _cols[cj - 1]
            x = (i - j) // _w
            # steep concave continuation outside [0, cap] keeps the matrix
            # totally monotone; continuation values lose to any real one
            if x < 0:
                return q[j + L] + x * big
            if x > _cap:
                return q[j + L] + _prefix[_cap] + (_cap - x) * big
            return q[j + L] + _prefix[x]

        breakpoints = row_maxima(len(rows), len(cols), value)
        for cj in range(1, len(cols) + 1):
            lo, hi = breakpoints[cj - 1], breakpoints[cj]
            if lo >= hi:
                continue
            j = cols[cj - 1]
            x_lo = (rows[lo - 1] - j) // w
            x_hi = (rows[hi - 2] - j) // w
            x_lo = max(x_lo, 1)
            x_hi = min(x_hi, cap)
            if x_lo > x_hi:
                continue
            stats.ap_count += 1
            stats.bucket_inserts += 1
            buckets[j + x_lo * w + L].append([j, w, x_lo, x_hi])

    r, z, xs = sol.r, sol.z, sol.x
    for slot in range(inst.size):
        cell = buckets[slot]
        if not cell:
            continue
        best = None
        best_val = None
        for ap in cell:
            val = q[ap[0] + L] + inst.fns[ap[1]].prefix[ap[2]]
            if best_val is None or val > best_val:
                best_val = val
                best = ap
        if is_bottom(r[slot]) or best_val > r[slot]:
            r[slot] = best_val
            z[slot] = best[0]
            xs[slot] = {best[1]: best[2]}
        # only the winning progression moves on; losers stay parked
        if best[2] + 1 <= best[3]:
            best[2] += 1
            buckets[slot + best[1]].append(best)
            stats.bucket_inserts += 1
    return sol


# ---------------------------------------------------------------------------
# composition algebra


def restrict(inst: HintedExtendInstance, subset) -> HintedExtendInstance:
    """Keep only the weights in ``subset``: hints and profit fns shrink."""
    store = inst.store
    vh = store.add(frozenset(subset) & set(inst.universe))
    vset = store.get(vh)
    handles = [
        None if h is None else store.intersect(h, vh) for h in inst.hint_handles
    ]
    fns = {w: fn for w, fn in inst.fns.items() if w in vset}
    return HintedExtendInstance(
        inst.half_size, tuple(sorted(vset)), list(inst.q), handles, fns, store
    )


def apply_update(
    inst: HintedExtendInstance, subset, sol: HintedExtendSolution
) -> HintedExtendInstance:
    """Fold a solution over ``subset`` back in: q := r, hints follow bases.

    The new entry i inherits the hint set of its base minus the consumed
    weights, so later stages can keep extending without reusing them.
    """
    store = inst.store
    vh = store.add(frozenset(subset))
    vset = store.get(vh)
    L = inst.half_size
    q2 = list(sol.r)
    handles = [None] * inst.size
    for k in range(inst.size):
        if is_bottom(q2[k]):
            continue
        src = inst.hint_handles[sol.z[k] + L]
        if src is None:
            raise ValueError("solution base lacks a hint set")
        handles[k] = store.subtract(src, vh)
    universe = tuple(w for w in inst.universe if w not in vset)
    fns = {w: fn for w, fn in inst.fns.items() if w not in vset}
    return HintedExtendInstance(L, universe, q2, handles, fns, store)


def compose(
    outer: HintedExtendSolution, inner: HintedExtendSolution
) -> HintedExtendSolution:
    """Chain outer (solved on inner's updated table) through inner."""
    if outer.half_size != inner.half_size:
        raise ValueError("solutions live on different tables")
    L = outer.half_size
    size = 2 * L + 1
    r = list(outer.r)
    z = [0] * size
    xs: list = [None] * size
    for k in range(size):
        if is_bottom(r[k]):
            z[k] = k - L
            xs[k] = {}
            continue
        mid = outer.z[k] + L
        z[k] = inner.z[mid]
        merged = dict(inner.x[mid])
        for w, cnt in outer.x[k].items():
            merged[w] = merged.get(w, 0) + cnt
        xs[k] = merged
    return HintedExtendSolution(L, r, z, xs, None)


def entrywise_max_instances(
    a: HintedExtendInstance, b: HintedExtendInstance
) -> HintedExtendInstance:
    if a.half_size != b.half_size or a.universe != b.universe:
        raise ValueError("instances disagree on shape")
    if a.store is not b.store:
        raise ValueError("instances must share a set store")
    store = a.store
    q = []
    handles = []
    for k in range(a.size):
        va, vb = a.q[k], b.q[k]
        ha, hb = a.hint_handles[k], b.hint_handles[k]
        if is_bottom(va) and is_bottom(vb):
            q.append(BOTTOM)
            handles.append(None)
        elif is_bottom(vb) or (not is_bottom(va) and va > vb):
            q.append(va)
            handles.append(ha)
        elif is_bottom(va) or vb > va:
            q.append(vb)
            handles.append(hb)
        else:  # equal finite values: either base works, keep both options' floor
            q.append(va)
            handles.append(store.intersect(ha, hb))
    return HintedExtendInstance(
        a.half_size, a.universe, q, handles, dict(a.fns), store
    )


def entrywise_max_solutions(
    a: HintedExtendSolution, b: HintedExtendSolution
) -> HintedExtendSolution:
    if a.half_size != b.half_size:
        raise ValueError("solutions disagree on shape")
    size = 2 * a.half_size + 1
    r = []
    z = []
    xs = []
    for k in range(size):
        va, vb = a.r[k], b.r[k]
        take_a = (not is_bottom(va)) and (is_bottom(vb) or va > vb)
        src = a if take_a else b
        r.append(src.r[k])
        z.append(src.z[k])
        xs.append(dict(src.x[k]))
    return HintedExtendSolution(a.half_size, r, z, xs, None)


# ---------------------------------------------------------------------------
# general budgets


def _hint_sets(inst: HintedExtendInstance) -> list[frozenset]:
    return [
        frozenset() if h is None else inst.store.get(h)
        for h in inst.hint_handles
    ]


def _masked(inst, keep_mask) -> HintedExtendInstance:
    q = [inst.q[k] if keep_mask[k] else BOTTOM for k in range(inst.size)]
    handles = [
        inst.hint_handles[k] if keep_mask[k] else None for k in range(inst.size)
    ]
    return HintedExtendInstance(
        inst.half_size, inst.universe, q, handles, dict(inst.fns), inst.store
    )


def _chain_color_classes(inst, classes, solver):
    """Sequentially restrict to each class, solve, fold back, and compose."""
    current = inst
    acc = None
    for cls in classes:
        if not cls:
            continue
        part = solver(restrict(current, cls), cls)
        current = apply_update(current, cls, part)
        acc = part if acc is None else compose(part, acc)
    return trivial_solution(inst) if acc is None else acc


def solve_small_b(
    inst: HintedExtendInstance, budget: int, stats: ExtendStats | None = None
) -> HintedExtendSolution:
    """Extend with hint sets of size <= budget via isolating colorings.

    Each entry is charged to the first coloring that isolates its hint set;
    within one coloring the color classes cut every relevant hint down to a
    single weight, so the singleton solver applies class by class and the
    per-coloring results are folded with an entrywise maximum.
    """
    sets = _hint_sets(inst)
    for s in sets:
        if len(s) > budget:
            raise ValueError("hint set exceeds the declared budget")
    if all(len(s) <= 1 for s in sets):
        out = solve_singleton(inst)
        if stats is not None:
            stats.absorb(out.stats)
        return out
    colorings = det_isolating_colorings(sets, budget)
    owner = [None] * inst.size
    for k, s in enumerate(sets):
        for idx, coloring in enumerate(colorings):
            if is_isolated(s, coloring):
                owner[k] = idx
                break
    result = None
    for idx, coloring in enumerate(colorings):
        keep = [owner[k] == idx for k in range(inst.size)]
        if not any(keep):
            continue
        masked = _masked(inst, keep)
        classes = {}
        for w in inst.universe:
            # weights in no hint set are uncolored; any class works for them
            classes.setdefault(coloring.get(w, 0), []).append(w)
        ordered = [classes[c] for c in sorted(classes)]

        def per_class(sub, _cls):
            out = solve_singleton(sub)
            if stats is not None:
                stats.absorb(out.stats)
            return out

        part = _chain_color_classes(masked, ordered, per_class)
        result = part if result is None else entrywise_max_solutions(result, part)
    return trivial_solution(inst) if result is None else result


def solve(
    inst: HintedExtendInstance,
    budget: int,
    beta: int = 12,
    stats: ExtendStats | None = None,
) -> HintedExtendSolution:
    """Extend with arbitrary hint budgets.

    Small budgets go straight to the isolating-coloring solver.  Larger
    ones are first split by a balls-and-bins coloring of the weight
    universe into roughly budget / log(table) classes, each of which meets
    every hint set in O(log table) weights, then chained class by class.
    """
    L = inst.half_size
    log_m = math.log2(4 * L + 2)
    if budget <= max(1, 2 * log_m):
        return solve_small_b(inst, budget, stats)
    sets = _hint_sets(inst)
    num_colors = math.ceil(budget / log_m)
    coloring = det_balls_and_bins(sets, num_colors, beta)
    classes: dict = {}
    for w in inst.universe:
        classes.setdefault(coloring.get(w, 0), []).append(w)
    ordered = [classes[c] for c in sorted(classes)]
    inner_budget = 1
    for s in sets:
        per: dict = {}
        for w in s:
            per[coloring[w]] = per.get(coloring[w], 0) + 1
        if per:
            inner_budget = max(inner_budget, max(per.values()))

    def per_class(sub, _cls):
        return solve_small_b(sub, inner_budget, stats)

    return _chain_color_classes(inst, ordered, per_class)


# ---------------------------------------------------------------------------
# verification


def relaxed_check(
    inst: HintedExtendInstance,
    sol: HintedExtendSolution,
    enum_limit: int = 200_000,
) -> list[str]:
    """Exhaustively verify the relaxed-extension contract; [] means pass.

    Checks feasibility, value accounting, support discipline, and the
    relaxed optimality clause: a suboptimal entry is an error only when
    every maximizer of that entry keeps its support inside the hint set of
    the base the maximizer extends.
    """
    errors = []
    L = inst.half_size
    if sol.half_size != L:
        return ["solution half_size mismatch"]
    weights = list(inst.universe)
    combos = 1
    for w in weights:
        combos *= inst.fns[w].cap + 1
    if combos > enum_limit:
        raise ValueError("instance too large for exhaustive checking")

    # all multiplicity vectors, grouped by total added weight
    vectors = [({}, 0, 0)]
    for w in weights:
        fn = inst.fns[w]
        nxt = []
        for mult, tot, val in vectors:
            for x in range(fn.cap + 1):
                m2 = dict(mult)
                if x:
                    m2[w] = x
                nxt.append((m2, tot + x * w, val + fn.prefix[x]))
        vectors = nxt
    by_total = {}
    for mult, tot, val in vectors:
        if tot > 2 * L:
            continue
        supp = frozenset(mult)
        best = by_total.get(tot)
        if best is None or val > best[0]:
            by_total[tot] = (val, [supp])
        elif val == best[0] and supp not in best[1]:
            best[1].append(supp)

    for i in inst.indices():
        k = i + L
        rv, zv, xv = sol.r[k], sol.z[k], sol.x[k]
        if is_bottom(rv):
            if xv:
                errors.append(f"index {i}: bottom entry with nonempty support")
            continue
        if zv < -L or zv > L:
            errors.append(f"index {i}: base {zv} out of range")
            continue
        qz = inst.q[zv + L]
        if is_bottom(qz):
            errors.append(f"index {i}: base {zv} has no value")
            continue
        total = sum(w * c for w, c in xv.items())
        if zv + total != i:
            errors.append(f"index {i}: weight conservation fails")
            continue
        ok = True
        for w, c in xv.items():
            if w not in inst.fns or c < 1 or c > inst.fns[w].cap:
                errors.append(f"index {i}: multiplicity of weight {w} invalid")
                ok = False
                break
        if not ok:
            continue
        hint = inst.hint_set(zv)
        if hint is None or not set(xv) <= hint:
            errors.append(f"index {i}: support escapes the base hint set")
            continue
        value = qz + sum(inst.fns[w].prefix[c] for w, c in xv.items())
        if value != rv:
            errors.append(f"index {i}: claimed value {rv} != recomputed {value}")
            continue
        if not is_bottom(inst.q[k]) and rv < inst.q[k]:
            errors.append(f"index {i}: below the trivial value")

    for i in inst.indices():
        k = i + L
        best = None
        for z in inst.indices():
            if z > i or is_bottom(inst.q[z + L]):
                continue
            got = by_total.get(i - z)
            if got is None:
                continue
            cand = inst.q[z + L] + got[0]
            if best is None or cand > best:
                best = cand
        rv = sol.r[k]
        if best is None:
            if not is_bottom(rv):
                errors.append(f"index {i}: finite value where none is feasible")
            continue
        if is_bottom(rv) or rv < best:
            # relaxed clause: fine if some maximizer escapes its hint set
            escaped = False
            for z in inst.indices():
                if z > i or is_bottom(inst.q[z + L]):
                    continue
                got = by_total.get(i - z)
                if got is None or inst.q[z + L] + got[0] != best:
                    continue
                hint = inst.hint_set(z)
                for supp in got[1]:
                    if not supp <= hint:
                        escaped = True
                        break
                if escaped:
                    break
            if not escaped:
                errors.append(
                    f"index {i}: entry {rv} below optimum {best} with all "
                    "maximizers hint-contained"
                )
        elif rv > best:
            errors.append(f"index {i}: entry {rv} above true optimum {best}")
    return errors
