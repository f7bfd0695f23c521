"""Text instance format and solution emission.

Input grammar: lines starting with '%' are comments and may appear
anywhere. The first non-comment line holds "n m 0"; the i-th following
non-comment line lists the out-neighbors of vertex i (an empty line means
none). Vertex ids are 1-based.
"""

from __future__ import annotations

import warnings
from typing import IO, Iterable

from .graph import Instance
from .solver import BestSolution


class ParseError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class FormatWarning(UserWarning):
    pass


def parse_instance(source: str | IO[str]) -> Instance:
    """Parse an instance, collapsing duplicate edges with a warning.

    A declared edge count that disagrees with the collapsed total is
    reported but not fatal; malformed headers, out-of-range neighbor ids,
    and missing adjacency lines raise ParseError with the line number.
    """
    text = source if isinstance(source, str) else source.read()
    n = -1
    declared_m = 0
    rows: list[list[int]] = []
    duplicates = 0
    trailing = 0
    line_no = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("%"):
            continue
        if n < 0:
            fields = raw.split()
            if not 2 <= len(fields) <= 3:
                raise ParseError(f"header must be 'n m 0', got {raw!r}", line_no)
            try:
                numbers = [int(f) for f in fields]
            except ValueError:
                raise ParseError(f"header must be 'n m 0', got {raw!r}", line_no) from None
            n, declared_m = numbers[0], numbers[1]
            if n < 0 or declared_m < 0:
                raise ParseError("header counts must be non-negative", line_no)
            if len(numbers) == 3 and numbers[2] != 0:
                warnings.warn(
                    f"line {line_no}: ignoring nonzero third header field {numbers[2]}",
                    FormatWarning,
                    stacklevel=2,
                )
            continue
        if len(rows) >= n:
            if raw.strip():
                trailing += 1
            continue
        vertex = len(rows) + 1
        seen: set[int] = set()
        neighbors: list[int] = []
        for token in raw.split():
            try:
                w = int(token)
            except ValueError:
                raise ParseError(
                    f"invalid neighbor token {token!r} for vertex {vertex}", line_no
                ) from None
            if not 1 <= w <= n:
                raise ParseError(
                    f"neighbor {w} of vertex {vertex} outside [1, {n}]", line_no
                )
            if w in seen:
                duplicates += 1
            else:
                seen.add(w)
                neighbors.append(w)
        rows.append(neighbors)
    if n < 0:
        raise ParseError("no header line found", max(line_no, 1))
    if len(rows) < n:
        raise ParseError(
            f"expected {n} adjacency lines, found only {len(rows)}", max(line_no, 1)
        )
    if duplicates:
        warnings.warn(
            f"collapsed {duplicates} duplicate edge(s)", FormatWarning, stacklevel=2
        )
    if trailing:
        warnings.warn(
            f"ignored {trailing} extra non-comment line(s) after the adjacency block",
            FormatWarning,
            stacklevel=2,
        )
    inst = Instance(n, rows)
    if inst.m != declared_m:
        warnings.warn(
            f"header declares {declared_m} edges but {inst.m} remain after collapsing",
            FormatWarning,
            stacklevel=2,
        )
    return inst


def format_instance(inst: Instance) -> str:
    """Serialize back to the input format (used for round-trip checks)."""
    lines = [f"{inst.n} {inst.m} 0"]
    for v in inst.vertices():
        lines.append(" ".join(str(w) for w in inst.out_adj[v]))
    return "\n".join(lines) + "\n"


def write_solution(solution: BestSolution | Iterable[int], sink: IO[str]) -> None:
    """One vertex id per line in ascending order; nothing else."""
    vertices = solution.vertices if isinstance(solution, BestSolution) else solution
    sink.write("".join(f"{v}\n" for v in sorted(vertices)))
