"""The weight-parameterized solver pipeline.

``solve_fast`` answers a 0-1 knapsack instance in time near-linear in n and
polynomial in the largest item weight, by searching exchange solutions
around the greedy prefix:

1. normalize and perturb profits so all efficiencies are distinct,
2. split weights into layers around the greedy break point,
3. stage one: fold the innermost layer into a difference-indexed DP table,
   phase by dyadic rank phase, growing the table per the phase schedule,
4. stage two: fold the outer layers while shrinking the table, and read the
   best feasible entry off the final table.

Stage one has two interchangeable engines.  The ``hinted`` engine follows
the hint-propagation design: each phase extends the table through the
hint-set solver and prunes hint sets against the next phase's budget; it is
the instrumented reference and can carry witness item sets.  The ``dense``
engine folds the same phase groups with vectorized shift-max passes over
the full scheduled table; it considers a superset of the candidates the
hinted engine keeps, so it reaches the same optimal entries, and it is far
faster under an interpreter.  The dense engine also folds the original
profits rather than the perturbed ones (perturbation still decides every
ordering), which keeps table cells narrow and makes the best window entry
the final answer directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import hinted
from .baselines import BudgetExceededError, solve_bellman
from .core import (
    BOTTOM,
    INT32_VALUE_CAP,
    INT64_VALUE_CAP,
    NEG_SENTINEL,
    NEG_THRESHOLD,
    DpTable,
    GreedySplit,
    Instance,
    break_ties,
    dp_resize,
    greedy_split,
    is_bottom,
    normalize,
    recover_profit,
)
from .hinted import ConcaveProfitFn, ExtendStats, HintedExtendInstance, SetStore
from .partition import (
    PhaseSchedule,
    RankPartition,
    phase_schedule,
    rank_partition,
    weight_partition,
)
from .smawk import batch_update_weight_class

DEFAULT_CONSTANT = 2.0
DEFAULT_BETA = 12
PROXIMITY_CELL_BUDGET = 800_000_000


class VerificationError(RuntimeError):
    """A cross-check against a reference solver disagreed."""


@dataclass
class Stats:
    """Work counters a solve populates when passed in."""

    peak_table_cells: int = 0
    phases_run: int = 0
    engine: str = ""
    fallback: bool = False
    extend: ExtendStats = field(default_factory=ExtendStats)
    best_index: int | None = None
    best_witness: tuple | None = None

    def note_table(self, cells: int) -> None:
        if cells > self.peak_table_cells:
            self.peak_table_cells = cells


@dataclass
class SolverConfig:
    """Tuning knobs; defaults match the analysis constants.

    ``constant`` scales every structural bound (layer windows, phase table
    sizes, hint budgets).  ``engine`` picks the stage-one implementation:
    "auto" resolves to the vectorized dense engine, which wins at every
    practical scale under CPython; "hinted" forces the hint-propagating
    engine.  ``witness`` threads witness item sets through the tables for
    validation and implies the hinted engine.  ``verify`` cross-checks the
    final answer against the capacity DP and raises ``VerificationError``
    on mismatch.
    """

    constant: float = DEFAULT_CONSTANT
    beta: int = DEFAULT_BETA
    engine: str = "auto"
    witness: bool = False
    verify: bool = False
    force_fallback: bool = False
    verify_cell_budget: int = 400_000_000

    def resolved_engine(self) -> str:
        if self.engine not in ("auto", "dense", "hinted"):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.witness:
            return "hinted"
        return "dense" if self.engine == "auto" else self.engine


def _prefix_profits(profits, members, sign: int) -> list[int]:
    """[0, Q(1), ..., Q(cap)] over the rank-ordered members of one class."""
    out = [0]
    for idx in members:
        out.append(out[-1] + sign * profits[idx])
    return out


# headroom before a drifted bottom sentinel could be mistaken for finite
_DRIFT_LIMIT = 1 << 60

# int32 twin of the int64 sentinel scheme, used when the instance's profit
# total fits INT32_VALUE_CAP; halving the cell width halves memory traffic,
# which is what bounds the fold at large table sizes
_NEG_SENTINEL32 = -(1 << 30)
_NEG_THRESHOLD32 = -(1 << 29)
_DRIFT_LIMIT32 = 1 << 27


def _int_limits(dtype):
    if np.dtype(dtype) == np.int32:
        return _NEG_SENTINEL32, _NEG_THRESHOLD32, _DRIFT_LIMIT32
    return NEG_SENTINEL, NEG_THRESHOLD, _DRIFT_LIMIT

# scratch tile (cells); 1 MiB keeps the shift buffer cache resident so a
# pass streams three arrays through memory instead of five
_TILE = 1 << 17


class _DenseFold:
    """Shift-max fold engine over one flat table with a tracked live span.

    Finite values only ever occupy slots [lo, hi); everything outside is
    bottom.  A class update reads and writes within the span plus the reach
    cap * weight of the class, so pass cost follows the occupied region
    instead of the allocated table.  Shifting by x * weight preserves the
    index residue, so residues never need separating; each multiplicity is
    one vectorized compare.  Passes run tile by tile through a small
    scratch block, ordered against the shift direction so a destination
    tile never feeds a source tile within the same pass.

    Bottom sentinels inside the span drift upward by at most one class
    profit sum per positive fold and never drift down (in-place maximum
    only raises cells); a credit counter re-floors the span long before a
    sentinel could climb anywhere near the finite range.

    ``dtype`` may be int64 (default), int32 (for instances whose profit
    total fits INT32_VALUE_CAP, with proportionally scaled sentinels), or
    ``object`` (plain ints and float bottom, for totals past int64 range).
    """

    __slots__ = (
        "arr", "tmp", "half", "lo", "hi", "drift", "is_object",
        "sentinel", "threshold", "drift_limit",
    )

    def __init__(self, half: int, dtype=np.int64):
        size = 2 * half + 1
        self.is_object = dtype == object
        if self.is_object:
            self.sentinel = self.threshold = BOTTOM
            self.drift_limit = 0
            self.arr = np.full(size, BOTTOM, dtype=object)
        else:
            self.sentinel, self.threshold, self.drift_limit = _int_limits(dtype)
            self.arr = np.full(size, self.sentinel, dtype=dtype)
        self.arr[half] = 0
        self.tmp = np.empty(min(size, _TILE), dtype=self.arr.dtype)
        self.half = half
        self.lo = half
        self.hi = half + 1
        self.drift = 0

    @classmethod
    def from_table(cls, table: DpTable) -> "_DenseFold":
        """Adopt a table's backing array in place and locate its live span."""
        eng = cls.__new__(cls)
        arr = table.values
        eng.arr = arr
        eng.tmp = np.empty(min(arr.size, _TILE), dtype=arr.dtype)
        eng.half = table.half_size
        eng.is_object = table.is_object
        eng.drift = 0
        if eng.is_object:
            eng.sentinel = eng.threshold = BOTTOM
            eng.drift_limit = 0
            finite = np.flatnonzero(arr != BOTTOM)
        else:
            eng.sentinel, eng.threshold, eng.drift_limit = _int_limits(arr.dtype)
            # incoming arrays may carry drifted sentinels; floor them once
            np.copyto(arr, eng.sentinel, where=arr < eng.threshold)
            finite = np.flatnonzero(arr > eng.threshold)
        if len(finite):
            eng.lo = int(finite[0])
            eng.hi = int(finite[-1]) + 1
        else:
            eng.lo = eng.hi = eng.half
        return eng

    def resize(self, new_half: int) -> None:
        if new_half == self.half:
            return
        size = 2 * new_half + 1
        if self.is_object:
            arr = np.full(size, BOTTOM, dtype=object)
        else:
            arr = np.full(size, self.sentinel, dtype=self.arr.dtype)
        keep = min(self.half, new_half)
        arr[new_half - keep : new_half + keep + 1] = self.arr[
            self.half - keep : self.half + keep + 1
        ]
        delta = new_half - self.half
        self.arr = arr
        self.tmp = np.empty(min(size, _TILE), dtype=arr.dtype)
        self.lo = min(max(self.lo + delta, 0), size)
        self.hi = min(max(self.hi + delta, 0), size)
        self.half = new_half

    def update(self, weight: int, prefix, direction: int) -> None:
        """Fold one class: q[z] = max over x of q[z - direction*x*weight] + prefix[x].

        Runs cap chained single-shift passes using the marginal increments
        of the concave prefix.  A chain taking m of the shifts earns at most
        the first m increments, which is exactly prefix[m], so multiplicity
        m costs prefix[m] and never exceeds cap; no pre-update snapshot of
        the table is needed.
        """
        cap = len(prefix) - 1
        a, b = self.lo, self.hi
        if cap == 0 or a >= b:
            return
        arr, tmp = self.arr, self.tmp
        size = arr.size
        if direction > 0:
            if a + weight >= size:
                return
            for x in range(1, cap + 1):
                delta = prefix[x] - prefix[x - 1]
                hi_x = min(size, b + (x - 1) * weight)
                ell = min(hi_x - a, size - (a + weight))
                # dst sits above src: walk tiles downward so every source
                # cell is read before any overlapping destination is written
                for off in range(((ell - 1) // _TILE) * _TILE, -1, -_TILE):
                    blk = min(_TILE, ell - off)
                    np.add(arr[a + off : a + off + blk], delta, out=tmp[:blk])
                    np.maximum(
                        arr[a + weight + off : a + weight + off + blk],
                        tmp[:blk],
                        out=arr[a + weight + off : a + weight + off + blk],
                    )
            self.hi = min(size, b + cap * weight)
        else:
            if b - weight <= 0:
                return
            for x in range(1, cap + 1):
                delta = prefix[x] - prefix[x - 1]
                lo_x = max(0, a - (x - 1) * weight)
                t0 = max(lo_x - weight, 0)
                ell = (b - weight) - t0
                if ell <= 0:
                    break
                # dst sits below src: walk tiles upward for the same reason
                for off in range(0, ell, _TILE):
                    blk = min(_TILE, ell - off)
                    np.add(
                        arr[t0 + weight + off : t0 + weight + off + blk],
                        delta,
                        out=tmp[:blk],
                    )
                    np.maximum(
                        arr[t0 + off : t0 + off + blk],
                        tmp[:blk],
                        out=arr[t0 + off : t0 + off + blk],
                    )
            self.lo = max(0, a - cap * weight)
        if not self.is_object and prefix[-1] > 0:
            self.drift += prefix[-1]
            if self.drift >= self.drift_limit:
                win = arr[self.lo : self.hi]
                np.copyto(win, self.sentinel, where=win < self.threshold)
                self.drift = 0

    def window_best(self, slack: int):
        """Best finite value over indices z <= slack, lowest index on ties."""
        end = self.half + slack + 1
        if self.is_object:
            best, best_z = BOTTOM, None
            for k in range(end):
                v = self.arr[k]
                if not is_bottom(v) and (is_bottom(best) or v > best):
                    best, best_z = v, k - self.half
            return best, best_z
        window = self.arr[:end]
        pos = int(window.argmax())
        m = int(window[pos])
        if m < self.threshold:
            return BOTTOM, None
        return m, pos - self.half


def first_stage_dense(
    profits,
    rank_part: RankPartition,
    schedule: PhaseSchedule,
    stats: Stats | None = None,
    dtype=np.int64,
) -> _DenseFold:
    """Fold all dyadic phases of the innermost layer, vectorized.

    ``profits`` maps item index to the profit value being folded; returns
    the live engine so stage two can keep folding without a table copy.
    """
    eng = _DenseFold(schedule.table_half_sizes[0], dtype)
    last_phase = 0
    for j in range(1, schedule.phase_count + 1):
        if rank_part.phase_items(+1, j) or rank_part.phase_items(-1, j):
            last_phase = j
    for j in range(1, last_phase + 1):
        eng.resize(schedule.table_half_sizes[j])
        if stats is not None:
            stats.note_table(2 * eng.half + 1)
            stats.phases_run += 1
        for direction in (+1, -1):
            groups = rank_part.phase_items(direction, j)
            # ascending weights keep the live span growing as slowly as possible
            for w in sorted(groups):
                prefix = _prefix_profits(profits, groups[w], direction)
                eng.update(w, prefix, direction)
    return eng


def _group(rank_part: RankPartition, direction: int, phase: int, w: int) -> list[int]:
    if phase > rank_part.phase_count:
        return []
    return rank_part.group(direction, phase, w)


def first_stage_hinted(
    primed: Instance,
    rank_part: RankPartition,
    schedule: PhaseSchedule,
    config: SolverConfig,
    inner_weights,
    stats: Stats | None = None,
) -> DpTable:
    """Fold the dyadic phases through the hint-set extension solver.

    Each table entry carries one hint set per side naming the weight classes
    it may still extend with.  A weight survives a phase on its side only
    when the entry consumed the whole phase group and the class continues
    into the next phase (optimal exchanges use rank prefixes, so a partial
    or skipped group ends the class for that entry).  Entries whose new
    hint set exceeds the next budget are deleted.
    """
    profits = [it.profit for it in primed.items]
    universe = tuple(sorted(inner_weights))
    store = SetStore()
    half = schedule.table_half_sizes[0]
    size = 2 * half + 1
    q: list = [BOTTOM] * size
    q[half] = 0
    pos_hints: list = [None] * size
    neg_hints: list = [None] * size
    pos_hints[half] = store.add(
        w for w in universe if _group(rank_part, +1, 1, w)
    )
    neg_hints[half] = store.add(
        w for w in universe if _group(rank_part, -1, 1, w)
    )
    track_wit = config.witness
    wit: list = [None] * size
    wit[half] = ((), ())

    ext_stats = stats.extend if stats is not None else None
    for phase in range(1, schedule.phase_count + 1):
        for direction in (+1, -1):
            new_half = schedule.table_half_sizes[phase]
            pad = new_half - half
            if pad:
                q = [BOTTOM] * pad + q + [BOTTOM] * pad
                pos_hints = [None] * pad + pos_hints + [None] * pad
                neg_hints = [None] * pad + neg_hints + [None] * pad
                wit = [None] * pad + wit + [None] * pad
                half = new_half
                size = 2 * half + 1

            active = pos_hints if direction > 0 else neg_hints
            if direction > 0:
                mq, mhints = q, active
            else:
                mq, mhints = list(reversed(q)), list(reversed(active))
            fns = {
                w: ConcaveProfitFn(
                    _prefix_profits(profits, _group(rank_part, direction, phase, w), direction)
                )
                for w in universe
            }
            inst = HintedExtendInstance(half, universe, mq, mhints, fns, store)
            sol = hinted.solve(
                inst, schedule.hint_budgets[phase], beta=config.beta, stats=ext_stats
            )
            if direction > 0:
                r, z, xs = sol.r, sol.z, sol.x
            else:
                r = list(reversed(sol.r))
                z = [-v for v in reversed(sol.z)]
                xs = list(reversed(sol.x))

            next_budget = schedule.hint_budgets[phase + 1]
            new_q: list = [BOTTOM] * size
            new_pos: list = [None] * size
            new_neg: list = [None] * size
            new_wit: list = [None] * size
            for k in range(size):
                if is_bottom(r[k]):
                    continue
                zk = z[k] + half
                survivors = {
                    w
                    for w, cnt in xs[k].items()
                    if cnt == len(_group(rank_part, direction, phase, w))
                    and _group(rank_part, direction, phase + 1, w)
                }
                if len(survivors) > next_budget:
                    continue  # over-budget hint sets are dropped entirely
                new_q[k] = r[k]
                handle = store.add(survivors)
                passthrough = (neg_hints if direction > 0 else pos_hints)[zk]
                assert passthrough is not None, "finite base lost its hint set"
                if direction > 0:
                    new_pos[k], new_neg[k] = handle, passthrough
                else:
                    new_pos[k], new_neg[k] = passthrough, handle
                if track_wit:
                    base_wit = wit[zk]
                    picked: list[int] = []
                    for w in sorted(xs[k]):
                        picked.extend(_group(rank_part, direction, phase, w)[: xs[k][w]])
                    if direction > 0:
                        new_wit[k] = (base_wit[0] + tuple(picked), base_wit[1])
                    else:
                        new_wit[k] = (base_wit[0], base_wit[1] + tuple(picked))
            q, pos_hints, neg_hints, wit = new_q, new_pos, new_neg, new_wit
            if stats is not None:
                stats.note_table(size)
        if stats is not None:
            stats.phases_run += 1

    table = DpTable(half, dtype=object, witness=track_wit)
    for k in range(size):
        if not is_bottom(q[k]):
            table.set(k - half, q[k], witness=wit[k] if track_wit else None)
    return table


def second_stage(
    table,
    primed: Instance,
    split: GreedySplit,
    schedule: PhaseSchedule,
    layers: list[set[int]],
    config: SolverConfig,
    profits,
    base_profit,
    stats: Stats | None = None,
):
    """Fold the outer weight layers while shrinking the table.

    Layer j is folded at half-size L'_{j-1}, after which the table shrinks
    to L'_j: outer layers interact with optimal exchanges only near the
    break point, so the index range can drop as coarser weights join.
    ``table`` is either the hinted stage's DpTable or the dense stage's
    live fold engine; ``profits`` must be the same per-item values stage
    one folded, and ``base_profit`` the greedy solution's total under them.
    Returns base_profit plus the best table entry within the leftover
    capacity.
    """
    if isinstance(table, _DenseFold):
        cur, eng = None, table
        eng.resize(schedule.stage_two_size(1))
        if stats is not None:
            stats.note_table(2 * eng.half + 1)
    else:
        cur = dp_resize(table, schedule.stage_two_size(1))
        if stats is not None:
            stats.note_table(2 * cur.half_size + 1)
        use_ops = config.witness or table.witness is not None
        eng = None if use_ops else _DenseFold.from_table(cur)
    for layer in range(2, len(layers) + 1):
        new_half = schedule.stage_two_size(layer)
        for w in sorted(layers[layer - 1]):
            for direction, cands in (
                (+1, split.add_candidates.get(w, [])),
                (-1, split.remove_candidates.get(w, [])),
            ):
                if not cands:
                    continue
                prefix = _prefix_profits(profits, cands, direction)
                if eng is None:
                    cur = batch_update_weight_class(
                        cur, w, prefix, cur.half_size, direction, class_items=cands
                    )
                else:
                    eng.update(w, prefix, direction)
        if eng is None:
            cur = dp_resize(cur, new_half)
        else:
            eng.resize(new_half)
        if stats is not None:
            stats.note_table(2 * new_half + 1)

    slack = primed.capacity - split.greedy_weight
    assert 0 <= slack < primed.w_max <= (cur.half_size if eng is None else eng.half)
    if eng is None:
        best, best_z = _best_in_window(cur, slack)
    else:
        best, best_z = eng.window_best(slack)
    if is_bottom(best):
        raise VerificationError("no feasible table entry survived the fold")
    if stats is not None:
        stats.best_index = best_z
        stats.best_witness = cur.get_witness(best_z) if eng is None else None
    return base_profit + best


def _best_in_window(table: DpTable, slack: int):
    """Best finite value over indices z <= slack, first index on ties."""
    half = table.half_size
    arr = table.values
    if arr.dtype != object:
        window = arr[: half + slack + 1]
        pos = int(window.argmax())
        m = int(window[pos])
        return (BOTTOM, None) if m < NEG_THRESHOLD else (m, pos - half)
    best = BOTTOM
    best_z = None
    for zval in range(-half, slack + 1):
        v = table.get(zval)
        if not is_bottom(v) and (is_bottom(best) or v > best):
            best = v
            best_z = zval
    return best, best_z


def solve_fast(raw_items, capacity, config: SolverConfig | None = None, stats: Stats | None = None) -> int:
    """Optimal total profit, parameterized by the largest item weight.

    Falls back to the capacity DP when the largest weight exceeds n^2 (the
    table there is smaller than any exchange structure would be).  With
    ``config.verify`` the answer is recomputed by the capacity DP and must
    agree.
    """
    config = config or SolverConfig()
    inst = normalize(raw_items, capacity)
    if inst.all_fit:
        if stats is not None:
            stats.engine = "trivial"
        return inst.total_profit
    if config.force_fallback or inst.w_max > inst.n * inst.n:
        if stats is not None:
            stats.engine = "bellman-fallback"
            stats.fallback = True
            stats.note_table(inst.capacity + 1)
        answer = solve_bellman(
            [(it.weight, it.profit) for it in inst.items], inst.capacity, cell_budget=None
        )
    else:
        answer = _solve_structured(inst, config, stats)
    if config.verify:
        ref = solve_bellman(raw_items, capacity, cell_budget=config.verify_cell_budget)
        if ref != answer:
            raise VerificationError(
                f"fast answer {answer} disagrees with capacity DP {ref}"
            )
    return answer


def _solve_structured(inst: Instance, config: SolverConfig, stats: Stats | None) -> int:
    primed = break_ties(inst)
    split = greedy_split(primed)
    wpart = weight_partition(primed, split, config.constant)
    schedule = phase_schedule(primed.w_max, config.constant, len(wpart.innermost))
    rank_part = rank_partition(primed, split, wpart.innermost)
    engine = config.resolved_engine()
    if stats is not None:
        stats.engine = engine
    if engine == "hinted":
        table = first_stage_hinted(
            primed, rank_part, schedule, config, wpart.innermost, stats
        )
        profits = [it.profit for it in primed.items]
        total = second_stage(
            table, primed, split, schedule, wpart.layers, config,
            profits, split.greedy_profit, stats,
        )
        return recover_profit(total, primed.tie_break_m, primed.w_max)
    # The dense fold needs only concave class prefixes, and within a weight
    # class the rank order sorts by profit on both sides, so the original
    # profits are concave along it too.  Folding them directly keeps cells
    # narrow (int32 for most instances, half the memory traffic) and makes
    # the best window entry the answer with no recovery step.  The perturbed
    # profits still decide the greedy split, layers, and rank orders.
    profits = [it.profit for it in inst.items]
    total_profit = sum(profits)
    if total_profit > INT64_VALUE_CAP:
        dtype = object
    elif total_profit <= INT32_VALUE_CAP:
        dtype = np.int32
    else:
        dtype = np.int64
    base = sum(p for i, p in enumerate(profits) if split.in_greedy[i])
    eng = first_stage_dense(profits, rank_part, schedule, stats, dtype)
    return second_stage(
        eng, primed, split, schedule, wpart.layers, config, profits, base, stats
    )


def solve_proximity_smawk(
    raw_items, capacity, config: SolverConfig | None = None, stats: Stats | None = None
) -> int:
    """Reference solver: greedy proximity plus one batched fold per class.

    Uses a fixed difference table of half-size 2 * w_max^2 (optimal
    exchanges never move the index further) and folds every weight class
    once per side, without layering or phases.  Simpler object to audit
    than the full pipeline, quadratically bigger table.
    """
    config = config or SolverConfig()
    inst = normalize(raw_items, capacity)
    if inst.all_fit:
        return inst.total_profit
    primed = break_ties(inst)
    split = greedy_split(primed)
    half = 2 * primed.w_max * primed.w_max
    cells = 2 * half + 1
    if cells > PROXIMITY_CELL_BUDGET:
        raise BudgetExceededError(
            f"proximity table needs {cells} cells, over {PROXIMITY_CELL_BUDGET}"
        )
    if stats is not None:
        stats.engine = "proximity"
        stats.note_table(cells)
    use_object = sum(it.profit for it in primed.items) > INT64_VALUE_CAP
    profits = [it.profit for it in primed.items]
    if config.witness:
        cur = DpTable(half, dtype=object, witness=True)
        cur.set(0, 0, witness=((), ()))
        eng = None
        for w in sorted(set(split.add_candidates) | set(split.remove_candidates)):
            for direction, cands in (
                (+1, split.add_candidates.get(w, [])),
                (-1, split.remove_candidates.get(w, [])),
            ):
                if not cands:
                    continue
                prefix = _prefix_profits(profits, cands, direction)
                cur = batch_update_weight_class(
                    cur, w, prefix, half, direction, class_items=cands
                )
    else:
        cur = None
        eng = _DenseFold(half, object if use_object else np.int64)
        for w in sorted(set(split.add_candidates) | set(split.remove_candidates)):
            for direction, cands in (
                (+1, split.add_candidates.get(w, [])),
                (-1, split.remove_candidates.get(w, [])),
            ):
                if not cands:
                    continue
                prefix = _prefix_profits(profits, cands, direction)
                eng.update(w, prefix, direction)

    slack = primed.capacity - split.greedy_weight
    if eng is None:
        best, best_z = _best_in_window(cur, slack)
    else:
        best, best_z = eng.window_best(slack)
    if is_bottom(best):
        raise VerificationError("no feasible table entry in proximity fold")
    if stats is not None:
        stats.best_index = best_z
        stats.best_witness = cur.get_witness(best_z) if eng is None else None
    total = split.greedy_profit + best
    return recover_profit(total, primed.tie_break_m, primed.w_max)


def check_table_witnesses(table: DpTable, primed: Instance, split: GreedySplit) -> list[str]:
    """Validate every finite entry's witness pair; [] means pass.

    Checks membership sides (added items outside the greedy set, removed
    items inside), distinctness, weight conservation against the index, and
    profit accounting against the stored value.
    """
    errors = []
    if table.witness is None:
        return ["table carries no witnesses"]
    items = primed.items
    for z, value in table.finite_items():
        w = table.get_witness(z)
        if w is None:
            errors.append(f"index {z}: finite entry without witness")
            continue
        added, removed = w
        if len(set(added)) != len(added) or len(set(removed)) != len(removed):
            errors.append(f"index {z}: repeated items in witness")
            continue
        if any(split.in_greedy[i] for i in added):
            errors.append(f"index {z}: added item already in the greedy set")
            continue
        if any(not split.in_greedy[i] for i in removed):
            errors.append(f"index {z}: removed item not in the greedy set")
            continue
        dw = sum(items[i].weight for i in added) - sum(items[i].weight for i in removed)
        dp = sum(items[i].profit for i in added) - sum(items[i].profit for i in removed)
        if dw != z:
            errors.append(f"index {z}: witness weight delta {dw}")
        elif dp != value:
            errors.append(f"index {z}: witness profit delta {dp} != {value}")
    return errors
