"""Graph-core behavior: tri-partitioned sets, removal, merger, queries."""

import random

import networkx as nx
import pytest

from dfvs.graph import (
    Instance,
    TriGraph,
    creates_cycle_if_restored,
    induced_subgraph,
    topological_positions,
)
from dfvs.oracle import GeneratorParams, exact_min_dfvs, has_cycle, random_digraph


def edge_set(g: TriGraph) -> set[tuple[int, int]]:
    return set(g.edges())


def to_networkx(g: TriGraph) -> nx.DiGraph:
    nxg = nx.DiGraph()
    nxg.add_nodes_from(g.live)
    nxg.add_edges_from(g.edges())
    return nxg


def random_trigraph(rng: random.Random, n: int, p: float, self_loops=False) -> TriGraph:
    inst = random_digraph(GeneratorParams(n=n, p=p, seed=rng.randrange(2**32), self_loops=self_loops))
    return induced_subgraph(inst, set(inst.vertices()))


class TestTriGraphBasics:
    def test_add_edge_partitions(self):
        g = TriGraph.from_edges([1, 2, 3], [(1, 2), (2, 1), (2, 3)])
        assert g.bidir[1] == {2} and g.bidir[2] == {1}
        assert g.out_only[2] == {3} and g.in_only[3] == {2}
        assert g.edge_count == 3
        g.check_invariants()

    def test_add_edge_duplicate_ignored(self):
        g = TriGraph.from_edges([1, 2], [(1, 2), (1, 2)])
        assert g.edge_count == 1

    def test_self_loop_flag(self):
        g = TriGraph.from_edges([1], [(1, 1)])
        assert 1 in g.self_loop
        assert g.edge_count == 1
        assert not g.in_only[1] and not g.out_only[1] and not g.bidir[1]

    def test_erase_edge(self):
        g = TriGraph.from_edges([1, 2], [(1, 2)])
        g.erase_edge(1, 2)
        assert g.edge_count == 0
        with pytest.raises(ValueError):
            g.erase_edge(1, 2)


class TestRemoveVertex:
    def test_triangle_remove_middle(self):
        g = TriGraph.from_edges([1, 2, 3], [(1, 2), (2, 3), (3, 1)])
        g.remove_vertex(2)
        assert set(g.live) == {1, 3}
        assert edge_set(g) == {(3, 1)}
        g.check_invariants()

    def test_bidir_pair(self):
        g = TriGraph.from_edges([1, 2], [(1, 2), (2, 1)])
        g.remove_vertex(1)
        assert set(g.live) == {2}
        assert g.edge_count == 0

    def test_self_loop_goes_with_vertex(self):
        g = TriGraph.from_edges([1], [(1, 1)])
        g.remove_vertex(1)
        assert len(g) == 0 and g.edge_count == 0

    def test_remove_dead_vertex_faults(self):
        g = TriGraph.from_edges([1], [])
        g.remove_vertex(1)
        with pytest.raises(ValueError):
            g.remove_vertex(1)


class TestMergeVertex:
    def test_chain(self):
        g = TriGraph.from_edges([1, 2, 3], [(1, 2), (2, 3)])
        loops = g.merge_vertex(2)
        assert loops == set()
        assert edge_set(g) == {(1, 3)}

    def test_bidir_neighbor_gains_loop(self):
        g = TriGraph.from_edges([1, 2, 3], [(1, 2), (2, 1), (2, 3)])
        loops = g.merge_vertex(2)
        assert loops == {1}
        assert 1 in g.self_loop
        assert (1, 3) in edge_set(g)

    def test_new_mutual_pair_from_merge(self):
        g = TriGraph.from_edges([1, 2, 3, 4], [(1, 2), (3, 2), (2, 4), (4, 1)])
        loops = g.merge_vertex(2)
        assert loops == set()
        assert g.bidir[1] == {4} and g.bidir[4] == {1}
        assert edge_set(g) == {(1, 4), (4, 1), (3, 4)}
        g.check_invariants()

    def test_merge_with_self_loop_faults(self):
        g = TriGraph.from_edges([1, 2], [(1, 1), (1, 2)])
        with pytest.raises(ValueError):
            g.merge_vertex(1)

    def test_merge_preserves_optimum_small(self):
        # contracting a vertex with one-sided degree <= 1 never changes the optimum
        rng = random.Random(42)
        checked = 0
        for _ in range(250):
            g = random_trigraph(rng, rng.randint(3, 10), rng.uniform(0.08, 0.5))
            candidates = [
                v
                for v in sorted(g.live)
                if v not in g.self_loop
                and (
                    len(g.in_only[v]) + len(g.bidir[v]) <= 1
                    or len(g.out_only[v]) + len(g.bidir[v]) <= 1
                )
            ]
            if not candidates:
                continue
            v = candidates[0]
            before = len(exact_min_dfvs(g.copy()))
            loops = g.merge_vertex(v)
            for w in sorted(loops):
                g.remove_vertex(w)
            g.check_invariants()
            assert len(exact_min_dfvs(g)) + len(loops) == before
            checked += 1
        assert checked > 150

    def test_invariants_after_random_operations(self):
        rng = random.Random(7)
        for _ in range(60):
            g = random_trigraph(rng, 12, 0.25)
            for _ in range(8):
                live = sorted(g.live)
                if not live:
                    break
                v = rng.choice(live)
                if v in g.self_loop or rng.random() < 0.4:
                    g.remove_vertex(v)
                else:
                    g.merge_vertex(v)
                g.check_invariants()


class TestScc:
    def test_triangle_single_component(self):
        g = TriGraph.from_edges([1, 2, 3], [(1, 2), (2, 3), (3, 1)])
        assert len(set(g.scc().values())) == 1

    def test_path_all_singletons(self):
        g = TriGraph.from_edges([1, 2, 3], [(1, 2), (2, 3)])
        assert len(set(g.scc().values())) == 3

    def test_mutual_pair_plus_tail(self):
        g = TriGraph.from_edges([1, 2, 3], [(1, 2), (2, 1), (3, 1)])
        comp = g.scc()
        assert comp[1] == comp[2] != comp[3]

    def test_matches_reachability_matrix(self):
        rng = random.Random(5)
        for _ in range(120):
            n = rng.randint(2, 8)
            g = random_trigraph(rng, n, rng.uniform(0.1, 0.6))
            vs = sorted(g.live)
            reach = {v: {v} for v in vs}
            for v in vs:
                for w in g.successors(v):
                    reach[v].add(w)
            for _ in vs:  # transitive closure by repeated squaring-ish sweeps
                for v in vs:
                    reach[v] = set().union(*(reach[w] for w in reach[v]))
            comp = g.scc()
            for v in vs:
                for w in vs:
                    same = w in reach[v] and v in reach[w]
                    assert (comp[v] == comp[w]) == same

    def test_matches_networkx(self):
        rng = random.Random(9)
        for _ in range(40):
            g = random_trigraph(rng, rng.randint(5, 40), rng.uniform(0.02, 0.3))
            ours = g.scc()
            for comp in nx.strongly_connected_components(to_networkx(g)):
                ids = {ours[v] for v in comp}
                assert len(ids) == 1
            assert len(set(ours.values())) == nx.number_strongly_connected_components(
                to_networkx(g)
            )


class TestIsAcyclic:
    def test_examples(self):
        assert TriGraph.from_edges([1, 2, 3], [(1, 2), (2, 3)]).is_acyclic()
        assert not TriGraph.from_edges([1, 2], [(1, 2), (2, 1)]).is_acyclic()
        assert not TriGraph.from_edges([1], [(1, 1)]).is_acyclic()

    def test_against_independent_dfs(self):
        rng = random.Random(11)
        for _ in range(200):
            g = random_trigraph(rng, rng.randint(2, 12), rng.uniform(0.02, 0.4),
                                self_loops=rng.random() < 0.3)
            adj = {v: sorted(g.successors(v)) + ([v] if v in g.self_loop else []) for v in g.live}
            assert g.is_acyclic() == (not has_cycle(adj))


class TestCreatesCycleIfRestored:
    def test_successor_reaches_predecessor(self):
        g = TriGraph.from_edges([2, 3], [(2, 3)])
        assert creates_cycle_if_restored(g, 1, in_neighbors=[3], out_neighbors=[2])

    def test_no_predecessors(self):
        g = TriGraph.from_edges([2, 3], [(2, 3)])
        assert not creates_cycle_if_restored(g, 1, in_neighbors=[], out_neighbors=[2, 3])

    def test_mutual_neighbor(self):
        g = TriGraph.from_edges([4, 5], [(4, 5)])
        assert creates_cycle_if_restored(g, 1, in_neighbors=[4], out_neighbors=[4])

    def test_self_loop_in_lists(self):
        g = TriGraph.from_edges([2], [])
        assert creates_cycle_if_restored(g, 1, in_neighbors=[1], out_neighbors=[1, 2])

    def test_live_vertex_faults(self):
        g = TriGraph.from_edges([1, 2], [(1, 2)])
        with pytest.raises(ValueError):
            creates_cycle_if_restored(g, 1, [], [])

    def test_matches_explicit_rebuild(self):
        rng = random.Random(23)
        agreements = 0
        for _ in range(300):
            n = rng.randint(3, 10)
            inst = random_digraph(GeneratorParams(n=n, p=rng.uniform(0.1, 0.5),
                                                  seed=rng.randrange(2**32)))
            v = rng.randint(1, n)
            keep = set(inst.vertices()) - {v}
            # drop vertices until acyclic so the precondition holds
            g = induced_subgraph(inst, keep)
            while not g.is_acyclic():
                victim = next(iter(sorted(g.live, key=lambda u: -g.total_degree(u))))
                keep.discard(victim)
                g = induced_subgraph(inst, keep)
            fast = creates_cycle_if_restored(g, v, inst.in_adj[v], inst.out_adj[v])
            rebuilt = induced_subgraph(inst, keep | {v})
            assert fast == (not rebuilt.is_acyclic())
            agreements += 1
        assert agreements == 300


class TestInducedSubgraph:
    def test_triangle_fragment(self):
        inst = Instance.from_edges(3, [(1, 2), (2, 3), (3, 1)])
        g = induced_subgraph(inst, {1, 2})
        assert edge_set(g) == {(1, 2)}

    def test_identity(self):
        inst = Instance.from_edges(3, [(1, 2), (2, 3), (3, 1)])
        g = induced_subgraph(inst, set(inst.vertices()))
        assert edge_set(g) == {(1, 2), (2, 3), (3, 1)}

    def test_mutual_pair_dropped_with_vertex(self):
        inst = Instance.from_edges(3, [(1, 2), (2, 1), (2, 3)])
        g = induced_subgraph(inst, {2, 3})
        assert edge_set(g) == {(2, 3)}
        assert not any(g.bidir.values())

    def test_out_of_range_rejected(self):
        inst = Instance.from_edges(2, [(1, 2)])
        with pytest.raises(ValueError):
            induced_subgraph(inst, {1, 5})


class TestTopologicalPositions:
    def test_orders_edges_forward(self):
        g = TriGraph.from_edges([1, 2, 3, 4], [(3, 1), (1, 4), (4, 2)])
        pos = topological_positions(g)
        assert pos[3] < pos[1] < pos[4] < pos[2]

    def test_rejects_cycles(self):
        g = TriGraph.from_edges([1, 2], [(1, 2), (2, 1)])
        with pytest.raises(ValueError):
            topological_positions(g)


class TestInstance:
    def test_dedupes_and_sorts(self):
        inst = Instance(3, [[2, 2, 3], [], [1]])
        assert inst.out_adj[1] == (2, 3)
        assert inst.m == 3
        assert inst.in_adj[1] == (3,)

    def test_rejects_bad_ids(self):
        with pytest.raises(ValueError):
            Instance(2, [[3], []])
