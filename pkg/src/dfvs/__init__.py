"""Heuristic solver for the minimum directed feedback vertex set problem."""

from .graph import Instance, TriGraph, creates_cycle_if_restored, induced_subgraph
from .oracle import GeneratorParams, exact_min_dfvs, is_valid_dfvs, random_digraph
from .pace import ParseError, parse_instance, write_solution
from .solver import (
    BestSolution,
    Cause,
    SolveStats,
    SolverConfig,
    SolverState,
    construct_solution,
    local_search_iteration,
    prune_redundant,
    score_lexicographic,
    score_product,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BestSolution",
    "Cause",
    "GeneratorParams",
    "Instance",
    "ParseError",
    "SolveStats",
    "SolverConfig",
    "SolverState",
    "TriGraph",
    "construct_solution",
    "creates_cycle_if_restored",
    "exact_min_dfvs",
    "induced_subgraph",
    "is_valid_dfvs",
    "local_search_iteration",
    "parse_instance",
    "prune_redundant",
    "random_digraph",
    "score_lexicographic",
    "score_product",
    "solve",
    "write_solution",
]
