"""Three-stage pipeline: greedy construction, redundancy pruning, local search."""

from __future__ import annotations

import enum
import math
import random
import time
from bisect import bisect_right, insort
from dataclasses import dataclass, field
from heapq import heapify, heappop, heappush
from typing import Iterable, Sequence

from .graph import Instance, TriGraph, induced_subgraph
from .reductions import DEFAULT_DEGREE_BOUND, SchedulerState, reduce_to_fixpoint


class Cause(enum.Enum):
    FORCED = "forced"
    CHOSEN = "chosen"


@dataclass
class SolverConfig:
    seed: int = 0
    time_budget: float | None = None
    iterations: int | None = None
    trigger_fraction: float = 0.10
    restore_fraction: float = 0.30
    degree_bound: int = DEFAULT_DEGREE_BOUND
    scoring_mode: str = "alternate"

    def __post_init__(self) -> None:
        if not 0.05 <= self.trigger_fraction <= 0.25:
            raise ValueError("trigger_fraction must be in [0.05, 0.25]")
        if not 0.0 < self.restore_fraction < 1.0:
            raise ValueError("restore_fraction must be in (0, 1)")
        if self.degree_bound < 0:
            raise ValueError("degree_bound must be non-negative")
        if self.scoring_mode not in ("product", "lexicographic", "alternate"):
            raise ValueError(f"unknown scoring_mode {self.scoring_mode!r}")


@dataclass
class SolveStats:
    stage1_size: int = 0
    stage2_size: int = 0
    iterations: int = 0
    size_history: list[int] = field(default_factory=list)
    freed_log: list[tuple[int, int]] = field(default_factory=list)  # (size before, freed)
    pass_events: list[tuple[int | None, int]] = field(default_factory=list)
    pruned_away: int = 0
    last_prune_seconds: float = 0.0


class RunControl:
    """Merges an external cancellation flag with a wall-clock deadline."""

    __slots__ = ("cancel", "deadline")

    def __init__(self, cancel=None, deadline: float | None = None):
        self.cancel = cancel
        self.deadline = deadline

    def stop_requested(self) -> bool:
        if self.cancel is not None and self.cancel.is_set():
            return True
        return self.deadline is not None and time.monotonic() > self.deadline


_NO_CONTROL = RunControl()


def _remainder_is_acyclic(inst: Instance, excluded: frozenset[int] | set[int]) -> bool:
    """Kahn's check of the instance minus a vertex set, without building a graph."""
    out_adj = inst.out_adj
    indeg = {v: 0 for v in inst.vertices() if v not in excluded}
    for u in indeg:
        for w in out_adj[u]:
            if w == u:
                return False
            if w in indeg:
                indeg[w] += 1
    queue = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while queue:
        nxt: list[int] = []
        for u in queue:
            seen += 1
            for w in out_adj[u]:
                if w in indeg and w != u:
                    indeg[w] -= 1
                    if indeg[w] == 0:
                        nxt.append(w)
        queue = nxt
    return seen == len(indeg)


@dataclass(frozen=True)
class BestSolution:
    vertices: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.vertices)

    @classmethod
    def checked(cls, inst: Instance, vertices: Iterable[int]) -> BestSolution:
        vs = frozenset(vertices)
        if not _remainder_is_acyclic(inst, vs):
            raise RuntimeError("proposed solution leaves a cyclic remainder")
        return cls(vs)


class SolverState:
    """Working graph plus the ordered solution stack and rule scheduler."""

    def __init__(
        self,
        graph: TriGraph,
        config: SolverConfig,
        control: RunControl | None = None,
        stats: SolveStats | None = None,
    ):
        self.graph = graph
        self.config = config
        self.degree_bound = config.degree_bound
        self.control = control or _NO_CONTROL
        self.stats = stats
        self.stack: list[tuple[int, Cause]] = []
        self.scheduler = SchedulerState(trigger_fraction=config.trigger_fraction)
        if stats is not None:
            self.scheduler.pass_log = stats.pass_events
        graph.touched.clear()
        self.scheduler.pending.extend(sorted(graph.live))
        self.score_heap: list | None = None
        self.score_key = None

    @classmethod
    def from_instance(
        cls,
        inst: Instance,
        config: SolverConfig,
        control: RunControl | None = None,
        stats: SolveStats | None = None,
    ) -> SolverState:
        return cls(induced_subgraph(inst, set(inst.vertices())), config, control, stats)

    def stop_requested(self) -> bool:
        return self.control.stop_requested()

    def record_outcome(self, outcome) -> None:
        for v in outcome.forced:
            self.stack.append((v, Cause.FORCED))

    def drain_touched(self) -> None:
        t = self.graph.take_touched()
        if not t:
            return
        unique = dict.fromkeys(t)  # dedupe, keeping first-occurrence order
        sched = self.scheduler
        sched.pending.extend(unique)
        if sched.pass_dirty is not None:
            sched.pass_dirty.update(unique)
        heap = self.score_heap
        if heap is not None:
            live = self.graph.in_only
            key = self.score_key
            g = self.graph
            for x in unique:
                if x in live:
                    heappush(heap, (key(g, x), x))

    def flush_live_to_stack(self) -> None:
        """Emergency stop: move every live vertex into the solution.

        The merged-away vertices always induce an acyclic subgraph, so the
        stack stays a valid solution."""
        g = self.graph
        if g.in_only:
            self.stack.extend((v, Cause.CHOSEN) for v in sorted(g.in_only))
            g.clear()
        g.touched.clear()
        self.scheduler.pending.clear()


def score_product(g: TriGraph, v: int) -> int:
    """Out-side times in-side degree, mutual neighbors counted on both."""
    b = len(g.bidir[v])
    return (len(g.out_only[v]) + b) * (len(g.in_only[v]) + b)


def score_lexicographic(g: TriGraph, v: int) -> tuple[int, int]:
    """Mutual degree first (it dominates), then in-only times out-only."""
    return (len(g.bidir[v]), len(g.in_only[v]) * len(g.out_only[v]))


def _product_heap_key(g: TriGraph, v: int) -> int:
    b = len(g.bidir[v])
    return -((len(g.out_only[v]) + b) * (len(g.in_only[v]) + b))


def _lex_heap_key(g: TriGraph, v: int) -> tuple[int, int]:
    return (-len(g.bidir[v]), -(len(g.in_only[v]) * len(g.out_only[v])))


_HEAP_KEYS = {"product": _product_heap_key, "lexicographic": _lex_heap_key}


def construct_solution(state: SolverState, scoring_mode: str = "product") -> None:
    """Alternate reduction to fixpoint with best-scoring vertex removal until
    the graph is empty. Min-heap with lazy invalidation keeps selection cheap;
    ties break toward the smallest vertex id."""
    g = state.graph
    key = _HEAP_KEYS[scoring_mode]
    state.score_key = key
    live = g.in_only
    while True:
        reduce_to_fixpoint(state)
        if state.stop_requested():
            state.flush_live_to_stack()
            break
        if not live:
            break
        heap = state.score_heap
        if heap is None:
            heap = [(key(g, v), v) for v in live]
            heapify(heap)
            state.score_heap = heap
        v = None
        while heap:
            k, cand = heappop(heap)
            if cand in live and key(g, cand) == k:
                v = cand
                break
        if v is None:
            heap = [(key(g, u), u) for u in live]
            heapify(heap)
            state.score_heap = heap
            continue
        if len(heap) > 4 * len(live) + 1024:  # mostly stale entries
            heap = [(key(g, u), u) for u in live]
            heapify(heap)
            state.score_heap = heap
        g.remove_vertex(v)
        state.stack.append((v, Cause.CHOSEN))
        state.drain_touched()
    state.score_heap = None
    state.score_key = None


_GAP = 1 << 20


class _RestoreIndex:
    """Incremental acyclic-insertion oracle over the solution's remainder.

    Keeps the remainder's adjacency plus an integer position per vertex
    that is strictly increasing along edges. A vertex restore first tries
    the position fast path (every live successor sits after every live
    predecessor), then a position-bounded bidirectional search; on success
    the order is repaired by permuting the affected window, never touching
    positions outside it. Everything is index-addressed for speed; dead
    slots hold None.
    """

    def __init__(self, inst: Instance, excluded: Iterable[int]):
        n = inst.n
        self.inst = inst
        live = bytearray(n + 1)
        for v in inst.vertices():
            live[v] = 1
        for v in excluded:
            live[v] = 0
        self.live = live
        out_adj: list[list[int] | None] = [None] * (n + 1)
        in_adj: list[list[int] | None] = [None] * (n + 1)
        indeg = [0] * (n + 1)
        live_count = 0
        for v in inst.vertices():
            if not live[v]:
                continue
            live_count += 1
            outs = [w for w in inst.out_adj[v] if live[w]]
            out_adj[v] = outs
            in_adj[v] = [w for w in inst.in_adj[v] if live[w]]
            for w in outs:
                indeg[w] += 1
        self.out_adj = out_adj
        self.in_adj = in_adj
        pos = [0] * (n + 1)
        heap = [v for v in inst.vertices() if live[v] and indeg[v] == 0]
        heapify(heap)
        rank = 0
        while heap:
            v = heappop(heap)
            rank += 1
            pos[v] = rank * _GAP
            for w in out_adj[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heappush(heap, w)
        if rank != live_count:
            raise RuntimeError("stack does not cover all cycles: remainder not acyclic")
        self.pos = pos
        self.used = [i * _GAP for i in range(1, rank + 1)]
        self.fstamp = [0] * (n + 1)
        self.bstamp = [0] * (n + 1)
        self.qid = 0

    def try_restore(self, v: int) -> bool:
        """Restore v into the remainder if that keeps it acyclic.

        Returns True when v was restored (it was redundant in the solution).
        """
        inst = self.inst
        live = self.live
        outs = inst.out_adj[v]
        ins = inst.in_adj[v]
        if v in outs:
            return False
        succs = [w for w in outs if live[w]]
        preds = [w for w in ins if live[w]]
        pset = set(preds)
        for s in succs:
            if s in pset:
                return False
        pos = self.pos
        left = right = None
        if preds and succs:
            lo = min(pos[s] for s in succs)
            hi = max(pos[p] for p in preds)
            if hi < lo:
                left = max(preds, key=pos.__getitem__)
                right = min(succs, key=pos.__getitem__)
            else:
                found = self._window_search(preds, succs, lo, hi)
                if found is None:
                    return False
                left, right = self._reorder(*found)
        elif preds:
            left = max(preds, key=pos.__getitem__)
        elif succs:
            right = min(succs, key=pos.__getitem__)
        self._place(v, left, right)
        live[v] = 1
        self.out_adj[v] = succs
        self.in_adj[v] = preds
        for p in preds:
            self.out_adj[p].append(v)
        for s in succs:
            self.in_adj[s].append(v)
        return True

    def _window_search(self, preds, succs, lo, hi):
        """Bidirectional reachability probe restricted to positions [lo, hi].

        Returns None when some successor reaches some predecessor (restoring
        would close a cycle); otherwise the completed backward and forward
        closures, which are exactly the sets the reorder step needs.
        """
        pos = self.pos
        out_adj = self.out_adj
        in_adj = self.in_adj
        self.qid += 1
        q = self.qid
        fstamp = self.fstamp
        bstamp = self.bstamp
        fall = [s for s in succs if pos[s] <= hi]
        ball = [p for p in preds if pos[p] >= lo]
        for x in fall:
            fstamp[x] = q
        for x in ball:
            bstamp[x] = q
        ffront = fall[:]
        bfront = ball[:]
        while ffront and bfront:
            if len(ffront) <= len(bfront):
                nxt = []
                for x in ffront:
                    for y in out_adj[x]:
                        if fstamp[y] == q or pos[y] > hi:
                            continue
                        if bstamp[y] == q:
                            return None
                        fstamp[y] = q
                        fall.append(y)
                        if out_adj[y]:  # dead ends join the closure, not the frontier
                            nxt.append(y)
                ffront = nxt
            else:
                nxt = []
                for x in bfront:
                    for y in in_adj[x]:
                        if bstamp[y] == q or pos[y] < lo:
                            continue
                        if fstamp[y] == q:
                            return None
                        bstamp[y] = q
                        ball.append(y)
                        if in_adj[y]:
                            nxt.append(y)
                bfront = nxt
        while ffront:  # backward side exhausted: finish the forward closure
            nxt = []
            for x in ffront:
                for y in out_adj[x]:
                    if fstamp[y] != q and pos[y] <= hi:
                        fstamp[y] = q
                        fall.append(y)
                        if out_adj[y]:
                            nxt.append(y)
            ffront = nxt
        while bfront:
            nxt = []
            for x in bfront:
                for y in in_adj[x]:
                    if bstamp[y] != q and pos[y] >= lo:
                        bstamp[y] = q
                        ball.append(y)
                        if in_adj[y]:
                            nxt.append(y)
            bfront = nxt
        return ball, fall

    def _reorder(self, backward: list[int], forward: list[int]) -> tuple[int, int]:
        """Permute window positions so everything reaching the predecessors
        precedes everything reachable from the successors. Returns the
        boundary vertices the restored vertex must sit between."""
        pos = self.pos
        backward.sort(key=pos.__getitem__)
        forward.sort(key=pos.__getitem__)
        pool = [pos[x] for x in backward]
        pool.extend(pos[x] for x in forward)
        pool.sort()
        for node, val in zip(backward, pool):
            pos[node] = val
        nb = len(backward)
        for i, node in enumerate(forward):
            pos[node] = pool[nb + i]
        return backward[-1], forward[0]

    def _place(self, v: int, left: int | None, right: int | None) -> None:
        """Assign v a fresh position strictly between its anchors."""
        pos = self.pos
        used = self.used
        if left is None and right is None:
            val = (used[-1] + _GAP) if used else _GAP
        elif right is None:
            val = used[-1] + _GAP
        elif left is None:
            val = used[0] - _GAP
        else:
            val = self._free_slot(pos[left], pos[right])
            if val is None:
                self._renumber()
                val = self._free_slot(pos[left], pos[right])
                assert val is not None
        pos[v] = val
        insort(used, val)

    def _free_slot(self, a: int, b: int) -> int | None:
        used = self.used
        i = bisect_right(used, a)
        prev = a
        while i < len(used) and used[i] < b:
            if used[i] - prev >= 2:
                return prev + (used[i] - prev) // 2
            prev = used[i]
            i += 1
        if b - prev >= 2:
            return prev + (b - prev) // 2
        return None

    def _renumber(self) -> None:
        pos = self.pos
        live = self.live
        order = sorted((v for v in range(1, len(live)) if live[v]), key=pos.__getitem__)
        for i, v in enumerate(order):
            pos[v] = (i + 1) * _GAP
        self.used = [(i + 1) * _GAP for i in range(len(order))]


def prune_redundant(
    stack: Sequence[tuple[int, Cause]],
    inst: Instance,
    control: RunControl | None = None,
    stats: SolveStats | None = None,
) -> BestSolution:
    """Drop solution vertices whose restoration keeps the remainder acyclic,
    newest insertions first.

    Forced entries are never redundant: each carries a cycle through
    merged-away vertices, and merged vertices stay in the remainder forever.
    They are kept without a search; the equivalence is covered by tests.
    """
    control = control or _NO_CONTROL
    entries = list(stack)
    vertices = [v for v, _ in entries]
    if len(set(vertices)) != len(vertices):
        raise RuntimeError("solution stack contains duplicates")
    index = _RestoreIndex(inst, vertices)
    kept: list[int] = []
    for i in range(len(entries) - 1, -1, -1):
        v, cause = entries[i]
        if cause is Cause.FORCED:
            kept.append(v)
            continue
        if control.stop_requested():
            kept.extend(u for u, _ in entries[: i + 1])
            break
        if index.try_restore(v):
            if stats is not None:
                stats.pruned_away += 1
        else:
            kept.append(v)
    return BestSolution.checked(inst, kept)


def _mode_for_iteration(config: SolverConfig, iteration: int) -> str:
    if config.scoring_mode == "alternate":
        return "product" if iteration % 2 == 0 else "lexicographic"
    return config.scoring_mode


def local_search_iteration(
    best: BestSolution,
    inst: Instance,
    config: SolverConfig,
    rng: random.Random,
    scoring_mode: str = "product",
    allow_prune: bool = True,
    control: RunControl | None = None,
    stats: SolveStats | None = None,
) -> BestSolution:
    """Free a random fraction of the best solution, re-solve the subproblem
    on everything outside the kept part, and accept any non-worse result."""
    control = control or _NO_CONTROL
    if best.size == 0:
        return best
    freed_count = max(1, math.ceil(config.restore_fraction * best.size))
    freed = set(rng.sample(sorted(best.vertices), freed_count))
    if stats is not None:
        stats.freed_log.append((best.size, freed_count))
    kept = best.vertices - freed
    sub_keep = set(inst.vertices()) - kept
    substate = SolverState(induced_subgraph(inst, sub_keep), config, control, None)
    construct_solution(substate, scoring_mode)
    if allow_prune and not control.stop_requested():
        merged_stack = [(v, Cause.CHOSEN) for v in sorted(kept, reverse=True)]
        merged_stack.extend(substate.stack)
        t0 = time.monotonic()
        candidate = prune_redundant(merged_stack, inst, control, stats)
        if stats is not None:
            stats.last_prune_seconds = time.monotonic() - t0
    else:
        candidate = BestSolution.checked(inst, kept | {v for v, _ in substate.stack})
    return candidate if candidate.size <= best.size else best


def solve(
    inst: Instance,
    config: SolverConfig | None = None,
    cancel=None,
    stats: SolveStats | None = None,
) -> BestSolution:
    """Run all three stages under the configured budget.

    The iteration cap takes precedence over the wall-clock budget so runs
    can be made deterministic. The cancellation flag is polled throughout;
    a valid solution is returned on any exit path.
    """
    config = config or SolverConfig()
    deadline = None
    iteration_cap = config.iterations
    if iteration_cap is None:
        if config.time_budget is not None:
            deadline = time.monotonic() + config.time_budget
        else:
            iteration_cap = 0  # no budget at all: stages one and two only
    control = RunControl(cancel, deadline)
    rng = random.Random(config.seed)

    state = SolverState.from_instance(inst, config, control, stats)
    stage1_mode = "lexicographic" if config.scoring_mode == "lexicographic" else "product"
    construct_solution(state, stage1_mode)
    if stats is not None:
        stats.stage1_size = len(state.stack)

    if control.stop_requested():
        best = BestSolution.checked(inst, (v for v, _ in state.stack))
    else:
        t0 = time.monotonic()
        best = prune_redundant(state.stack, inst, control, stats)
        if stats is not None:
            stats.last_prune_seconds = time.monotonic() - t0
    if stats is not None:
        stats.stage2_size = best.size
        stats.size_history.append(best.size)

    iteration = 0
    while not control.stop_requested():
        if iteration_cap is not None and iteration >= iteration_cap:
            break
        if best.size == 0:
            break
        if deadline is not None and stats is not None:
            remaining = deadline - time.monotonic()
            allow_prune = remaining > 2.0 * stats.last_prune_seconds
        else:
            allow_prune = True
        mode = _mode_for_iteration(config, iteration)
        best = local_search_iteration(
            best, inst, config, rng, mode, allow_prune, control, stats
        )
        iteration += 1
        if stats is not None:
            stats.iterations = iteration
            stats.size_history.append(best.size)
    return best
