"""Edge-list and partition text formats.

Edge lists hold one edge per line as ``u v w`` (``u v`` means weight 1).
Blank lines and lines starting with ``#`` are ignored, except for an
optional header ``# n=<int>`` fixing the vertex count; without it the count
is the largest id plus one. CRLF line endings are accepted.

Partition files hold one part per line as whitespace-separated vertex ids.
"""

from __future__ import annotations

import math
import re
import sys

from .errors import DomainError, ParseError
from .graph import WeightedGraph

_HEADER = re.compile(r"#\s*n\s*=\s*(\S+)\s*$")


def _vertex(tok: str, lineno: int) -> int:
    try:
        x = int(tok)
    except ValueError:
        raise ParseError(f"vertex id {tok!r} is not an integer", lineno) from None
    if x < 0:
        raise ParseError(f"vertex id {x} is negative", lineno)
    return x


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line:
            yield lineno, line


def parse_edge_list(text: str, *, warn_low_degree: bool = True) -> WeightedGraph:
    """Parse edge-list text into a graph.

    Raises
    ------
    ParseError
        On malformed lines, self-loops, duplicate edges, weights that are
        not finite and positive, or ids at or above a declared ``n``.
    """
    n_header = None
    edges = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, line in _lines(text):
        if line.startswith("#"):
            m = _HEADER.match(line)
            if m:
                if n_header is not None:
                    raise ParseError("repeated '# n=' header", lineno)
                try:
                    n_header = int(m.group(1))
                except ValueError:
                    raise ParseError(f"bad vertex count {m.group(1)!r}", lineno) from None
                if n_header < 0:
                    raise ParseError("vertex count must be nonnegative", lineno)
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'u v w', got {line!r}", lineno)
        u, v = _vertex(parts[0], lineno), _vertex(parts[1], lineno)
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise ParseError(f"weight {parts[2]!r} is not a number", lineno) from None
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", lineno)
        if not (math.isfinite(w) and w > 0):
            raise ParseError(f"weight must be finite and positive, got {parts[2]}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge {{{key[0]}, {key[1]}}} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        edges.append((u, v, w, lineno))
    top = max((max(u, v) for u, v, _, _ in edges), default=-1) + 1
    if n_header is None:
        n = top
    else:
        n = n_header
        for u, v, _, lineno in edges:
            if max(u, v) >= n:
                raise ParseError(f"vertex id {max(u, v)} out of range for n={n}", lineno)
    try:
        return WeightedGraph(n, [(u, v, w) for u, v, w, _ in edges], warn_low_degree=warn_low_degree)
    except DomainError as exc:  # pragma: no cover - all checks above come first
        raise ParseError(str(exc)) from exc


def emit_edge_list(G: WeightedGraph) -> str:
    """Edge-list text with an ``# n=`` header; weights in shortest round-trip form."""
    out = [f"# n={G.n}"]
    out += [f"{u} {v} {w!r}" for u, v, w in G.edges()]
    return "\n".join(out) + "\n"


def parse_partition(text: str, n: int) -> list[list[int]]:
    """Parse a partition file into lists of vertex ids, one per part.

    Raises
    ------
    ParseError
        On non-integer or out-of-range ids, repeated vertices, or no parts.
    """
    parts = []
    owner: dict[int, int] = {}
    for lineno, line in _lines(text):
        if line.startswith("#"):
            continue
        ids = [_vertex(tok, lineno) for tok in line.split()]
        for x in ids:
            if x >= n:
                raise ParseError(f"vertex id {x} out of range for n={n}", lineno)
            if x in owner:
                raise ParseError(f"vertex {x} already listed on line {owner[x]}", lineno)
            owner[x] = lineno
        parts.append(ids)
    if not parts:
        raise ParseError("partition has no parts")
    return parts


def read_text(path: str) -> str:
    """Contents of ``path``, or of standard input when ``path`` is '-'."""
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()
