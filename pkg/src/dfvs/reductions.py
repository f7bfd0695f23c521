"""Optimum-preserving reduction rules and their scheduling.

Each rule either forces vertices into the solution (removing them) or
merges vertices into the acyclic remainder. Rules 1 and 2 are cheap and
run eagerly through a pending queue after every graph change; rules 3-8
run as full passes, triggered only after the graph has lost a configured
fraction of its edges since the previous pass.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .graph import TriGraph, _tarjan

DEFAULT_DEGREE_BOUND = 12


@dataclass
class ReductionOutcome:
    forced: list[int] = field(default_factory=list)
    merged: list[int] = field(default_factory=list)
    edges_erased: int = 0

    @property
    def changed(self) -> bool:
        return bool(self.forced or self.merged or self.edges_erased)

    def absorb(self, other: ReductionOutcome) -> None:
        self.forced.extend(other.forced)
        self.merged.extend(other.merged)
        self.edges_erased += other.edges_erased


def is_diclique(g: TriGraph, vertices: Iterable[int]) -> bool:
    """True iff every pair in the set is mutually adjacent; size <= 1 counts."""
    vs = sorted(vertices)
    k = len(vs)
    if k <= 1:
        return True
    bidir = g.bidir
    for x in vs:
        if len(bidir[x]) < k - 1:
            return False
    for i, x in enumerate(vs):
        bx = bidir[x]
        for y in vs[i + 1 :]:
            if y not in bx:
                return False
    return True


def _merge_with_cascade(g: TriGraph, v: int, out: ReductionOutcome) -> None:
    # merging can self-loop the mutual neighbors of v; those are then forced
    loops = g.merge_vertex(v)
    out.merged.append(v)
    for w in sorted(loops):
        g.remove_vertex(w)
        out.forced.append(w)


def rule1_self_loop(g: TriGraph, v: int) -> ReductionOutcome:
    """A vertex with a self-loop lies on that cycle alone: force it."""
    out = ReductionOutcome()
    if v in g.self_loop:
        g.remove_vertex(v)
        out.forced.append(v)
    return out


def rule2_low_degree(g: TriGraph, v: int) -> ReductionOutcome:
    """Merge a loop-free vertex whose in-side or out-side has at most one neighbor.

    With a side of size 0 the vertex is on no cycle; with size 1 every cycle
    through it also passes the unique side neighbor, so contracting is safe.
    """
    out = ReductionOutcome()
    if v in g.self_loop:
        return out
    b = len(g.bidir[v])
    if len(g.in_only[v]) + b <= 1 or len(g.out_only[v]) + b <= 1:
        _merge_with_cascade(g, v, out)
    return out


def rule3_zero_side_diclique(g: TriGraph, v: int) -> ReductionOutcome:
    """If one strict side of v is empty and its mutual neighbors form a
    diclique, force the whole diclique and merge v.

    Any two mutual neighbors of v pair into a 2-cycle, so at most one of
    them can stay out of a solution; with one side of v empty, an optimal
    solution can always be rearranged to take all of them and spare v.
    """
    out = ReductionOutcome()
    if v in g.self_loop:
        return out
    if g.in_only[v] and g.out_only[v]:
        return out
    bid = g.bidir[v]
    if not is_diclique(g, bid):
        return out
    for u in sorted(bid):
        g.remove_vertex(u)
        out.forced.append(u)
    _merge_with_cascade(g, v, out)
    return out


def rule4_cross_component_edges(g: TriGraph) -> ReductionOutcome:
    """Erase one-directional edges joining different strongly connected
    components of the graph with all mutual pairs ignored.

    Minimal cycles of length three or more never use a mutual pair, so a
    one-directional edge on no cycle of the pair-free view is on no minimal
    cycle at all.
    """
    out = ReductionOutcome()
    order = sorted(g.in_only)
    idx = {v: i for i, v in enumerate(order)}
    adj = [[idx[w] for w in g.out_only[v]] for v in order]
    comp = _tarjan(adj)
    doomed: list[tuple[int, int]] = []
    for i, v in enumerate(order):
        ci = comp[i]
        for w in g.out_only[v]:
            if comp[idx[w]] != ci:
                doomed.append((v, w))
    doomed.sort()
    for v, w in doomed:
        g.erase_edge(v, w)
    out.edges_erased = len(doomed)
    return out


def rule5_dominated_edge(g: TriGraph, u: int, v: int) -> ReductionOutcome:
    """Erase a one-directional edge (u, v) that no minimal cycle can use.

    That holds when every in-only neighbor of u already points at v, or
    every out-only neighbor of v is already reached from u: the cycle could
    shortcut past the edge.
    """
    if v not in g.out_only[u]:
        raise ValueError(f"({u}, {v}) is not a one-directional edge")
    out = ReductionOutcome()
    probe = g.in_only[u]
    c1 = g.in_only[v]
    c2 = g.bidir[v]
    fire = len(probe) <= len(c1) + len(c2)
    if fire:
        for x in probe:
            if x not in c1 and x not in c2:
                fire = False
                break
    if not fire:
        probe = g.out_only[v]
        c1 = g.out_only[u]
        c2 = g.bidir[u]
        fire = len(probe) <= len(c1) + len(c2)
        if fire:
            for x in probe:
                if x not in c1 and x not in c2:
                    fire = False
                    break
    if fire:
        g.erase_edge(u, v)
        out.edges_erased = 1
    return out


def rule6_one_sided_diclique(g: TriGraph, v: int) -> ReductionOutcome:
    """Merge v if one full side (out or in, mutual neighbors included) is a diclique."""
    out = ReductionOutcome()
    if v in g.self_loop:
        return out
    bid = g.bidir[v]
    if is_diclique(g, g.out_only[v] | bid) or is_diclique(g, g.in_only[v] | bid):
        _merge_with_cascade(g, v, out)
    return out


def _fits(g: TriGraph, x: int, members: list[int]) -> bool:
    bx = g.bidir[x]
    for m in members:
        if m not in bx:
            return False
    return True


def _lonely_count(g: TriGraph, group: list[int]) -> int:
    """Members of the group with no mutual adjacency inside it.

    Each such member can only occupy a diclique part alone, which bounds
    how many parts any split can use; counting them rejects most candidates
    before the partition enumeration runs.
    """
    gset = set(group)
    count = 0
    bidir = g.bidir
    for x in group:
        bx = bidir[x]
        if bx and not bx.isdisjoint(gset):
            continue
        count += 1
    return count


def _splits_with_pinned(g: TriGraph, pinned: list[int], rest: list[int]) -> bool:
    """Can pinned+rest be 2-partitioned into dicliques with pinned kept together?"""
    if not is_diclique(g, pinned):
        return False
    parts: list[list[int]] = [list(pinned), []]

    def assign(i: int) -> bool:
        if i == len(rest):
            return True
        x = rest[i]
        for part in parts:
            if _fits(g, x, part):
                part.append(x)
                if assign(i + 1):
                    return True
                part.pop()
        return False

    return assign(0)


def _splits_into_dicliques(g: TriGraph, items: list[int], max_parts: int) -> bool:
    parts: list[list[int]] = []

    def assign(i: int) -> bool:
        if i == len(items):
            return True
        x = items[i]
        for part in parts:
            if _fits(g, x, part):
                part.append(x)
                if assign(i + 1):
                    return True
                part.pop()
        if len(parts) < max_parts:
            parts.append([x])
            if assign(i + 1):
                return True
            parts.pop()
        return False

    return assign(0)


def rule7_two_diclique_split(
    g: TriGraph, v: int, degree_bound: int = DEFAULT_DEGREE_BOUND
) -> ReductionOutcome:
    """Merge v when its whole neighborhood splits into two dicliques, the
    mutual neighbors all landing in the same one."""
    out = ReductionOutcome()
    if v in g.self_loop or g.total_degree(v) > degree_bound:
        return out
    group = list(g.bidir[v])
    group.extend(g.in_only[v])
    group.extend(g.out_only[v])
    lonely = _lonely_count(g, group)
    if lonely > 2 or (lonely == 2 and len(group) > 2):
        return out
    pinned = sorted(g.bidir[v])
    rest = sorted(g.in_only[v] | g.out_only[v])
    if _splits_with_pinned(g, pinned, rest):
        _merge_with_cascade(g, v, out)
    return out


def rule8_three_diclique_split(
    g: TriGraph, v: int, degree_bound: int = DEFAULT_DEGREE_BOUND
) -> ReductionOutcome:
    """Merge v (no mutual neighbors) when in+out neighbors split into at
    most three dicliques."""
    out = ReductionOutcome()
    if v in g.self_loop or g.bidir[v] or g.total_degree(v) > degree_bound:
        return out
    group = list(g.in_only[v])
    group.extend(g.out_only[v])
    lonely = _lonely_count(g, group)
    if lonely > 3 or (lonely == 3 and len(group) > 3):
        return out
    nbrs = sorted(g.in_only[v] | g.out_only[v])
    if _splits_into_dicliques(g, nbrs, 3):
        _merge_with_cascade(g, v, out)
    return out


@dataclass
class SchedulerState:
    """When to run which rule family.

    Rules 1-2 candidates queue in ``pending``. A rules 3-8 full pass runs
    at the start and then again only once the edge count has dropped below
    (1 - trigger_fraction) of its value at the previous pass. ``pass_dirty``
    collects vertices whose neighborhoods changed since that pass (None
    means "everything", for the first pass).
    """

    trigger_fraction: float = 0.10
    edges_at_last_full_pass: int | None = None
    pending: deque[int] = field(default_factory=deque)
    pass_dirty: set[int] | None = None
    pass_log: list[tuple[int | None, int]] = field(default_factory=list)

    def should_run_full_pass(self, edge_count: int) -> bool:
        base = self.edges_at_last_full_pass
        if base is None:
            return True
        return edge_count <= (1.0 - self.trigger_fraction) * base

    def record_full_pass(self, edge_count: int) -> None:
        self.pass_log.append((self.edges_at_last_full_pass, edge_count))
        self.edges_at_last_full_pass = edge_count


_POLL_MASK = 0x3FF


def _drain_rule12(state, out: ReductionOutcome) -> None:
    """Apply rules 1-2 until the pending queue is empty."""
    g = state.graph
    sched = state.scheduler
    pending = sched.pending
    live = g.in_only
    loops = g.self_loop
    ticks = 0
    while pending:
        ticks += 1
        if not (ticks & _POLL_MASK) and state.stop_requested():
            return
        v = pending.popleft()
        if v not in live:
            continue
        if v in loops:
            o = rule1_self_loop(g, v)
        else:
            b = len(g.bidir[v])
            if len(g.in_only[v]) + b > 1 and len(g.out_only[v]) + b > 1:
                continue
            o = rule2_low_degree(g, v)
        if o.changed:
            state.record_outcome(o)
            out.absorb(o)
            state.drain_touched()


def _scan_candidates(g: TriGraph, dirty: set[int] | None) -> list[int]:
    """Vertices whose rule 3/6/7/8 answer may have changed since last pass."""
    if dirty is None:
        return sorted(g.in_only)
    cands: set[int] = set()
    live = g.in_only
    for x in dirty:
        if x in live:
            cands.add(x)
            cands.update(g.in_only[x])
            cands.update(g.out_only[x])
            cands.update(g.bidir[x])
    return sorted(cands)


def _full_pass(state, out: ReductionOutcome) -> bool:
    """One sweep of rules 4, 5, 3, 6, 7, 8: global pruning first, local
    diclique checks last. Rules 1-2 drain after every change."""
    g = state.graph
    sched = state.scheduler
    bound = state.degree_bound
    sched.record_full_pass(g.edge_count)
    dirty = sched.pass_dirty
    sched.pass_dirty = set()
    live = g.in_only
    changed = False

    o4 = rule4_cross_component_edges(g)
    if o4.changed:
        changed = True
        out.absorb(o4)
        state.drain_touched()
        _drain_rule12(state, out)
    if state.stop_requested():
        return changed

    if dirty is None:
        edge_cands = sorted(live)
    else:
        edge_cands = sorted(x for x in dirty if x in live)
    cand_set = set(edge_cands)
    in_only = g.in_only
    out_only = g.out_only
    bidir = g.bidir
    ticks = 0
    for u in edge_cands:
        ticks += 1
        if not (ticks & 0xFF) and state.stop_requested():
            return changed
        if u not in live:
            continue
        if len(in_only[u]) + len(out_only[u]) + len(bidir[u]) > bound:
            continue
        for w in sorted(out_only[u]):
            if u not in live:
                break
            if w not in out_only[u]:
                continue
            o = rule5_dominated_edge(g, u, w)
            if o.changed:
                changed = True
                out.absorb(o)
                state.drain_touched()
                _drain_rule12(state, out)
        if u not in live:
            continue
        # edges whose head changed: test from here unless the tail vertex
        # is scanned on its own this pass
        for w in sorted(in_only[u]):
            if u not in live:
                break
            if w in cand_set or w not in live or u not in out_only.get(w, ()):
                continue
            if len(in_only[w]) + len(out_only[w]) + len(bidir[w]) > bound:
                continue
            o = rule5_dominated_edge(g, w, u)
            if o.changed:
                changed = True
                out.absorb(o)
                state.drain_touched()
                _drain_rule12(state, out)

    cands = _scan_candidates(g, dirty)
    ticks = 0
    for v in cands:
        ticks += 1
        if not (ticks & 0xFF) and state.stop_requested():
            return changed
        if v not in live or v in g.self_loop:
            continue
        if in_only[v] and out_only[v]:
            continue
        o = rule3_zero_side_diclique(g, v)
        if o.changed:
            changed = True
            state.record_outcome(o)
            out.absorb(o)
            state.drain_touched()
            _drain_rule12(state, out)

    # rules 6-8 share gates and neighbor groups, so they run vertex-major;
    # with no mutual neighbors the two-part split is subsumed by the
    # three-part one, leaving a single partition enumeration per vertex
    ticks = 0
    loops = g.self_loop
    for v in cands:
        ticks += 1
        if not (ticks & 0xFF) and state.stop_requested():
            return changed
        if v not in live or v in loops:
            continue
        ino = in_only[v]
        outo = out_only[v]
        bid = bidir[v]
        if len(ino) + len(outo) + len(bid) > bound:
            continue
        if bid:
            if is_diclique(g, outo | bid) or is_diclique(g, ino | bid):
                o = ReductionOutcome()
                _merge_with_cascade(g, v, o)
            else:
                o = rule7_two_diclique_split(g, v, bound)
        else:
            if is_diclique(g, outo) or is_diclique(g, ino):
                o = ReductionOutcome()
                _merge_with_cascade(g, v, o)
            else:
                o = rule8_three_diclique_split(g, v, bound)
        if o.changed:
            changed = True
            state.record_outcome(o)
            out.absorb(o)
            state.drain_touched()
            _drain_rule12(state, out)
    return changed


def reduce_to_fixpoint(state) -> ReductionOutcome:
    """Drive rules 1-2 and triggered full passes until nothing eligible fires.

    ``state`` is any object with graph, scheduler, degree_bound,
    drain_touched(), record_outcome(outcome), and stop_requested().
    """
    out = ReductionOutcome()
    g = state.graph
    sched = state.scheduler
    state.drain_touched()
    while True:
        _drain_rule12(state, out)
        if state.stop_requested() or not g.in_only:
            break
        if not sched.should_run_full_pass(g.edge_count):
            break
        changed = _full_pass(state, out)
        if not changed and not sched.pending:
            break
    return out
