"""Exact ground truth: brute-force solver, validator, and instance generator."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from .graph import Instance, TriGraph, induced_subgraph

EXACT_SIZE_LIMIT = 20


@dataclass(frozen=True)
class GeneratorParams:
    """Erdos-Renyi style digraph: each ordered pair gets an edge with probability p."""

    n: int
    p: float
    seed: int
    self_loops: bool = False

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")


def random_digraph(params: GeneratorParams) -> Instance:
    """Deterministic random instance for the given parameters.

    Edges are sampled by geometric gap-skipping over the ordered-pair index
    space, which realizes the same independent-Bernoulli distribution as a
    pair-by-pair sweep but runs in time proportional to the edge count.
    """
    n, p = params.n, params.p
    rows: list[list[int]] = [[] for _ in range(n)]
    if n == 0 or p == 0.0:
        return Instance(n, rows)
    row_width = n if params.self_loops else n - 1
    total = n * row_width
    if total <= 0:
        return Instance(n, rows)
    rng = random.Random(params.seed)
    if p >= 1.0:
        picked: Iterable[int] = range(total)
    else:
        log_q = math.log1p(-p)

        def stream() -> Iterable[int]:
            idx = -1
            while True:
                u = 1.0 - rng.random()  # in (0, 1]
                idx += int(math.log(u) / log_q) + 1
                if idx >= total:
                    return
                yield idx

        picked = stream()
    for idx in picked:
        u, off = divmod(idx, row_width)
        if params.self_loops:
            v = off
        else:
            v = off if off < u else off + 1
        rows[u].append(v + 1)
    return Instance(n, rows)


def has_cycle(adj: Mapping[int, Iterable[int]]) -> bool:
    """Independent iterative three-color DFS cycle check on a plain adjacency map.

    Kept free of TriGraph internals so tests can cross-validate the graph
    core against it.
    """
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in adj}
    for root in adj:
        if color[root] != WHITE:
            continue
        stack: list[tuple[int, Iterable[int]]] = [(root, iter(adj[root]))]
        color[root] = GRAY
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if w not in color:
                    continue
                c = color[w]
                if c == GRAY:
                    return True
                if c == WHITE:
                    color[w] = GRAY
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                color[v] = BLACK
                stack.pop()
    return False


def _as_trigraph(g: TriGraph | Instance) -> TriGraph:
    if isinstance(g, Instance):
        return induced_subgraph(g, set(g.vertices()))
    return g


def exact_min_dfvs(g: TriGraph | Instance) -> set[int]:
    """Minimum feedback vertex set by subset enumeration in increasing size.

    The first acyclic hit is minimum by construction. Refuses graphs above
    EXACT_SIZE_LIMIT live vertices.
    """
    tg = _as_trigraph(g)
    vs = sorted(tg.live)
    if len(vs) > EXACT_SIZE_LIMIT:
        raise ValueError(f"exact solver limited to {EXACT_SIZE_LIMIT} vertices, got {len(vs)}")
    allv = set(vs)
    for k in range(len(vs) + 1):
        for subset in combinations(vs, k):
            if tg.induced(allv.difference(subset)).is_acyclic():
                return set(subset)
    raise AssertionError("unreachable: removing all vertices is always acyclic")


def is_valid_dfvs(inst: Instance, solution: Iterable[int]) -> bool:
    """True iff the instance minus the given vertices is acyclic."""
    excluded = set(solution)
    if excluded and not (1 <= min(excluded) and max(excluded) <= inst.n):
        return False
    keep = set(inst.vertices()) - excluded
    return induced_subgraph(inst, keep).is_acyclic()
