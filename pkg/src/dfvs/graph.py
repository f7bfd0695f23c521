"""Directed-graph core with tri-partitioned neighborhoods.

Every live vertex keeps three disjoint neighbor sets: in-only (edges into
the vertex only), out-only (edges out of it only), and bidirectional
(edges both ways). Self-loops are a per-vertex flag so the sets never
contain the vertex itself.
"""

from __future__ import annotations

import heapq
from collections import deque
from typing import Iterable, Iterator


def _tarjan(adj: list[list[int]]) -> list[int]:
    """Strongly connected components of an index-based adjacency list.

    Iterative so deep graphs cannot hit the recursion limit. Returns a
    component id per vertex; ids are assigned in completion order.
    """
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    comp = [-1] * n
    on_stack = bytearray(n)
    stack: list[int] = []
    work: list[tuple[int, int]] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work.append((root, 0))
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = 1
            nbrs = adj[v]
            recurse = False
            while i < len(nbrs):
                w = nbrs[i]
                i += 1
                if index[w] == -1:
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if recurse:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = 0
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
    return comp


class TriGraph:
    """Mutable directed graph over integer vertex ids.

    ``edge_count`` counts directed edges: a mutual pair contributes 2 and a
    self-loop 1. Every mutation appends the vertices whose neighbor sets
    changed to ``touched``, which lets a reduction scheduler react to local
    changes without rescanning the graph.
    """

    __slots__ = ("in_only", "out_only", "bidir", "self_loop", "edge_count", "touched")

    def __init__(self) -> None:
        self.in_only: dict[int, set[int]] = {}
        self.out_only: dict[int, set[int]] = {}
        self.bidir: dict[int, set[int]] = {}
        self.self_loop: set[int] = set()
        self.edge_count = 0
        self.touched: list[int] = []

    # -- construction --------------------------------------------------

    @classmethod
    def from_edges(cls, vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> TriGraph:
        g = cls()
        for v in vertices:
            g.add_vertex(v)
        for u, v in edges:
            g.add_edge(u, v)
        g.touched.clear()
        return g

    def copy(self) -> TriGraph:
        g = TriGraph()
        g.in_only = {v: set(s) for v, s in self.in_only.items()}
        g.out_only = {v: set(s) for v, s in self.out_only.items()}
        g.bidir = {v: set(s) for v, s in self.bidir.items()}
        g.self_loop = set(self.self_loop)
        g.edge_count = self.edge_count
        return g

    def induced(self, keep: Iterable[int]) -> TriGraph:
        """Subgraph on ``keep``, preserving all edges among kept vertices."""
        keepset = keep if isinstance(keep, (set, frozenset)) else set(keep)
        g = TriGraph()
        for v in sorted(keepset):
            if v not in self.in_only:
                raise ValueError(f"vertex {v} not in graph")
            g.add_vertex(v)
        for v in g.in_only:
            if v in self.self_loop:
                g.self_loop.add(v)
                g.edge_count += 1
            for w in self.out_only[v]:
                if w in keepset:
                    g.out_only[v].add(w)
                    g.in_only[w].add(v)
                    g.edge_count += 1
            for w in self.bidir[v]:
                if w in keepset:
                    g.bidir[v].add(w)
        g.edge_count += sum(len(s) for s in g.bidir.values())
        return g

    # -- basic queries ---------------------------------------------------

    @property
    def live(self):
        return self.in_only.keys()

    def __contains__(self, v: int) -> bool:
        return v in self.in_only

    def __len__(self) -> int:
        return len(self.in_only)

    def total_degree(self, v: int) -> int:
        return len(self.in_only[v]) + len(self.out_only[v]) + len(self.bidir[v])

    def successors(self, v: int) -> Iterator[int]:
        yield from self.out_only[v]
        yield from self.bidir[v]

    def predecessors(self, v: int) -> Iterator[int]:
        yield from self.in_only[v]
        yield from self.bidir[v]

    def edges(self) -> Iterator[tuple[int, int]]:
        """All directed edges; bidirectional pairs appear once per direction."""
        for v in self.in_only:
            if v in self.self_loop:
                yield (v, v)
            for w in self.out_only[v]:
                yield (v, w)
            for w in self.bidir[v]:
                yield (v, w)

    def take_touched(self) -> list[int]:
        t = self.touched
        if t:
            self.touched = []
        return t

    # -- mutation --------------------------------------------------------

    def add_vertex(self, v: int) -> None:
        if v in self.in_only:
            return
        self.in_only[v] = set()
        self.out_only[v] = set()
        self.bidir[v] = set()

    def add_edge(self, u: int, v: int) -> bool:
        """Insert edge (u, v); returns False if it already exists.

        Inserting the reverse of an existing one-directional edge moves both
        endpoints into each other's bidirectional sets.
        """
        if u == v:
            if u in self.self_loop:
                return False
            if u not in self.in_only:
                raise ValueError(f"vertex {u} not in graph")
            self.self_loop.add(u)
            self.edge_count += 1
            self.touched.append(u)
            return True
        out_u = self.out_only[u]
        bid_u = self.bidir[u]
        if v in out_u or v in bid_u:
            return False
        in_u = self.in_only[u]
        if v in in_u:
            in_u.discard(v)
            self.out_only[v].discard(u)
            bid_u.add(v)
            self.bidir[v].add(u)
        else:
            out_u.add(v)
            self.in_only[v].add(u)
        self.edge_count += 1
        self.touched.append(u)
        self.touched.append(v)
        return True

    def erase_edge(self, u: int, v: int) -> None:
        """Remove the one-directional edge (u, v)."""
        try:
            self.out_only[u].remove(v)
        except KeyError:
            raise ValueError(f"no one-directional edge ({u}, {v})") from None
        self.in_only[v].remove(u)
        self.edge_count -= 1
        self.touched.append(u)
        self.touched.append(v)

    def remove_vertex(self, v: int) -> None:
        """Delete v and every edge incident to it."""
        try:
            ins = self.in_only.pop(v)
        except KeyError:
            raise ValueError(f"vertex {v} not live") from None
        outs = self.out_only.pop(v)
        bids = self.bidir.pop(v)
        touched = self.touched
        for u in ins:
            self.out_only[u].discard(v)
            touched.append(u)
        for u in outs:
            self.in_only[u].discard(v)
            touched.append(u)
        for u in bids:
            self.bidir[u].discard(v)
            touched.append(u)
        self.edge_count -= len(ins) + len(outs) + 2 * len(bids)
        if v in self.self_loop:
            self.self_loop.discard(v)
            self.edge_count -= 1

    def merge_vertex(self, v: int) -> set[int]:
        """Contract v: connect all predecessors to all successors, drop v.

        Returns the vertices that gained a self-loop (exactly the
        bidirectional neighbors of v), so a scheduler can queue them for
        the self-loop rule without scanning.
        """
        if v not in self.in_only:
            raise ValueError(f"vertex {v} not live")
        if v in self.self_loop:
            raise ValueError(f"cannot merge {v}: it has a self-loop")
        preds = sorted(self.in_only[v] | self.bidir[v])
        succs = sorted(self.out_only[v] | self.bidir[v])
        self.remove_vertex(v)
        new_loops: set[int] = set()
        add_edge = self.add_edge
        for p in preds:
            for s in succs:
                if p == s:
                    if p not in self.self_loop:
                        self.self_loop.add(p)
                        self.edge_count += 1
                        self.touched.append(p)
                        new_loops.add(p)
                else:
                    add_edge(p, s)
        return new_loops

    def clear(self) -> None:
        self.in_only.clear()
        self.out_only.clear()
        self.bidir.clear()
        self.self_loop.clear()
        self.edge_count = 0

    # -- global queries ----------------------------------------------------

    def scc(self) -> dict[int, int]:
        """Component id per live vertex; equal ids mean mutual reachability."""
        order = sorted(self.in_only)
        idx = {v: i for i, v in enumerate(order)}
        adj: list[list[int]] = []
        for v in order:
            row = [idx[w] for w in self.out_only[v]]
            row.extend(idx[w] for w in self.bidir[v])
            adj.append(row)
        comp = _tarjan(adj)
        return {v: comp[i] for i, v in enumerate(order)}

    def is_acyclic(self) -> bool:
        """True iff no self-loop, no mutual pair, and no longer cycle exists."""
        if self.self_loop:
            return False
        if any(self.bidir.values()):
            return False
        indeg = {v: len(s) for v, s in self.in_only.items()}
        queue = deque(v for v, d in indeg.items() if d == 0)
        seen = 0
        out_only = self.out_only
        while queue:
            v = queue.popleft()
            seen += 1
            for w in out_only[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        return seen == len(indeg)

    def check_invariants(self) -> None:
        """Full-scan structural audit; raises AssertionError on violation."""
        live = self.in_only.keys()
        assert self.out_only.keys() == live and self.bidir.keys() == live
        assert self.self_loop <= set(live), "self-loop flag on dead vertex"
        count = 0
        for v in live:
            ins, outs, bids = self.in_only[v], self.out_only[v], self.bidir[v]
            assert v not in ins and v not in outs and v not in bids, f"{v} adjacent to itself"
            assert not (ins & outs) and not (ins & bids) and not (outs & bids), (
                f"neighbor sets of {v} overlap"
            )
            for u in ins:
                assert u in live and v in self.out_only[u], f"asymmetric in-edge ({u}, {v})"
            for u in outs:
                assert u in live and v in self.in_only[u], f"asymmetric out-edge ({v}, {u})"
            for u in bids:
                assert u in live and v in self.bidir[u], f"asymmetric mutual pair ({v}, {u})"
            count += len(outs) + len(bids) + (1 if v in self.self_loop else 0)
        assert count == self.edge_count, f"edge_count {self.edge_count} != recount {count}"


def creates_cycle_if_restored(
    g: TriGraph, v: int, in_neighbors: Iterable[int], out_neighbors: Iterable[int]
) -> bool:
    """Would adding v (with the given original edges) to acyclic g close a cycle?

    True iff v carries a self-loop (appears in its own neighbor lists), has a
    live mutual neighbor, or some live successor reaches a live predecessor.
    """
    live = g.in_only
    if v in live:
        raise ValueError(f"vertex {v} is live")
    in_neighbors = tuple(in_neighbors)
    out_neighbors = tuple(out_neighbors)
    if v in in_neighbors or v in out_neighbors:
        return True
    preds = {u for u in in_neighbors if u in live}
    succs = {u for u in out_neighbors if u in live}
    if preds & succs:
        return True
    if not preds or not succs:
        return False
    seen = set(succs)
    frontier = deque(seen)
    out_only = g.out_only
    bidir = g.bidir
    while frontier:
        x = frontier.popleft()
        for y in out_only[x]:
            if y in preds:
                return True
            if y not in seen:
                seen.add(y)
                frontier.append(y)
        for y in bidir[x]:
            if y in preds:
                return True
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return False


class Instance:
    """Immutable original digraph with stable 1-based external vertex ids."""

    __slots__ = ("n", "m", "out_adj", "in_adj")

    def __init__(self, n: int, out_adj: Iterable[Iterable[int]]):
        rows = [()] + [tuple(sorted(set(r))) for r in out_adj]
        if len(rows) != n + 1:
            raise ValueError(f"expected {n} adjacency rows, got {len(rows) - 1}")
        self.n = n
        self.out_adj: tuple[tuple[int, ...], ...] = tuple(rows)
        self.m = sum(len(r) for r in rows)
        incoming: list[list[int]] = [[] for _ in range(n + 1)]
        for u in range(1, n + 1):
            for w in self.out_adj[u]:
                if not 1 <= w <= n:
                    raise ValueError(f"neighbor {w} of vertex {u} out of range")
                incoming[w].append(u)
        self.in_adj: tuple[tuple[int, ...], ...] = tuple(tuple(r) for r in incoming)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Instance:
        rows: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            rows[u - 1].append(v)
        return cls(n, rows)

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Instance) and self.out_adj == other.out_adj

    def __hash__(self) -> int:
        return hash(self.out_adj)

    def __repr__(self) -> str:
        return f"Instance(n={self.n}, m={self.m})"


def induced_subgraph(inst: Instance, keep: Iterable[int]) -> TriGraph:
    """TriGraph over ``keep`` with all original edges among kept vertices."""
    keepset = keep if isinstance(keep, (set, frozenset)) else set(keep)
    if keepset and not (1 <= min(keepset) and max(keepset) <= inst.n):
        raise ValueError("keep contains ids outside the instance")
    g = TriGraph()
    for v in sorted(keepset):
        g.add_vertex(v)
    out_adj = inst.out_adj
    in_only = g.in_only
    out_only = g.out_only
    loops = g.self_loop
    count = 0
    for u in g.in_only:
        for w in out_adj[u]:
            if w == u:
                loops.add(u)
                count += 1
            elif w in keepset:
                out_only[u].add(w)
                in_only[w].add(u)
                count += 1
    # second sweep turns reciprocal one-directional pairs into mutual pairs
    for u in g.in_only:
        outs = out_only[u]
        ins = in_only[u]
        both = outs & ins
        if both:
            outs -= both
            ins -= both
            g.bidir[u] |= both
    g.edge_count = count
    return g


def topological_positions(g: TriGraph) -> dict[int, int]:
    """Topological rank per vertex of an acyclic graph, smallest ids first.

    Raises ValueError if g has a cycle.
    """
    if g.self_loop or any(g.bidir.values()):
        raise ValueError("graph is not acyclic")
    indeg = {v: len(s) for v, s in g.in_only.items()}
    heap = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    pos: dict[int, int] = {}
    rank = 0
    out_only = g.out_only
    while heap:
        v = heapq.heappop(heap)
        rank += 1
        pos[v] = rank
        for w in out_only[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if rank != len(indeg):
        raise ValueError("graph is not acyclic")
    return pos
