"""Weighted undirected graphs, vertex sets, and cut arithmetic.

Vertex sets are accepted in three forms throughout the package: a
:class:`VertexSet`, a boolean mask of length ``n``, or an iterable of vertex
ids. Induced cuts ``(L, R)`` are accepted as :class:`InducedCut` or as a pair
of vertex sets.
"""

from __future__ import annotations

import warnings
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, LowDegreeWarning


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class WeightedGraph:
    """Undirected graph on vertices ``0..n-1`` with positive edge weights.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : iterable of (u, v, w)
        Each undirected edge once. Endpoints are stored with ``u < v`` in the
        order given.
    warn_low_degree : bool
        Emit :class:`LowDegreeWarning` when some vertex has degree below 1.

    Raises
    ------
    DomainError
        On self-loops, duplicate edges, ids out of range, or weights that are
        not finite and strictly positive.
    """

    __slots__ = ("n", "u", "v", "w", "degree", "total_volume", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]] = (), *,
                 warn_low_degree: bool = True):
        if int(n) != n or n < 0:
            raise DomainError(f"vertex count must be a nonnegative integer, got {n!r}")
        n = int(n)
        rows = list(edges)
        if rows:
            arr_u = np.array([r[0] for r in rows], dtype=np.int64)
            arr_v = np.array([r[1] for r in rows], dtype=np.int64)
            arr_w = np.array([r[2] for r in rows], dtype=np.float64)
        else:
            arr_u = np.zeros(0, dtype=np.int64)
            arr_v = np.zeros(0, dtype=np.int64)
            arr_w = np.zeros(0, dtype=np.float64)
        self._init_arrays(n, arr_u, arr_v, arr_w, warn_low_degree)

    @classmethod
    def from_arrays(cls, n: int, u, v, w, *, warn_low_degree: bool = True) -> "WeightedGraph":
        """Build from parallel endpoint and weight arrays."""
        g = cls.__new__(cls)
        g._init_arrays(int(n), np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64),
                       np.asarray(w, dtype=np.float64), warn_low_degree)
        return g

    def _init_arrays(self, n, u, v, w, warn_low_degree):
        if not (u.shape == v.shape == w.shape) or u.ndim != 1:
            raise DomainError("endpoint and weight arrays must be 1-d and of equal length")
        if u.size:
            if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
                raise DomainError(f"vertex ids must lie in 0..{n - 1}")
            if np.any(u == v):
                i = int(np.flatnonzero(u == v)[0])
                raise DomainError(f"self-loop at vertex {int(u[i])}")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise DomainError("edge weights must be finite and strictly positive")
            lo = np.minimum(u, v)
            hi = np.maximum(u, v)
            key = lo * n + hi
            uniq, counts = np.unique(key, return_counts=True)
            if uniq.size != key.size:
                dup = int(uniq[np.argmax(counts > 1)])
                raise DomainError(f"duplicate edge {{{dup // n}, {dup % n}}}")
            u, v = lo, hi
        self.n = n
        self.u = _frozen(u.copy())
        self.v = _frozen(v.copy())
        self.w = _frozen(w.copy())
        deg = np.zeros(n)
        np.add.at(deg, self.u, self.w)
        np.add.at(deg, self.v, self.w)
        self.degree = _frozen(deg)
        self.total_volume = float(deg.sum())
        self._adj = None
        if warn_low_degree and n and deg.min() < 1.0:
            warnings.warn(f"{int(np.sum(deg < 1.0))} vertex(es) have weighted degree below 1",
                          LowDegreeWarning, stacklevel=3)

    @property
    def m(self) -> int:
        return int(self.w.size)

    @property
    def total_weight(self) -> float:
        """Sum of edge weights, w(E)."""
        return float(self.w.sum())

    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(a), int(b), float(c)) for a, b, c in zip(self.u, self.v, self.w)]

    def adjacency(self) -> np.ndarray:
        """Dense symmetric adjacency matrix (cached, read-only)."""
        if self._adj is None:
            a = np.zeros((self.n, self.n))
            a[self.u, self.v] = self.w
            a[self.v, self.u] = self.w
            self._adj = _frozen(a)
        return self._adj

    def isolated(self) -> np.ndarray:
        """Boolean mask of degree-0 vertices."""
        return self.degree == 0

    def components(self) -> np.ndarray:
        """Component label per vertex, labels ordered by smallest member."""
        parent = np.arange(self.n)

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in zip(self.u.tolist(), self.v.tolist()):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        roots = np.array([find(x) for x in range(self.n)], dtype=np.int64)
        _, labels = np.unique(roots, return_inverse=True)
        return labels

    def two_coloring(self) -> tuple[np.ndarray, np.ndarray]:
        """Breadth-first 2-coloring per component.

        Returns ``(color, bipartite)`` where ``color[v]`` is +1 or -1 with the
        smallest vertex of each component colored +1, and ``bipartite[c]``
        tells whether component ``c`` (labels from :meth:`components`) admits
        a proper 2-coloring.
        """
        labels = self.components()
        ncomp = int(labels.max()) + 1 if self.n else 0
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in zip(self.u.tolist(), self.v.tolist()):
            nbrs[a].append(b)
            nbrs[b].append(a)
        color = np.zeros(self.n, dtype=np.int64)
        bipartite = np.ones(ncomp, dtype=bool)
        for s in range(self.n):
            if color[s]:
                continue
            color[s] = 1
            queue = [s]
            while queue:
                x = queue.pop()
                for y in nbrs[x]:
                    if color[y] == 0:
                        color[y] = -color[x]
                        queue.append(y)
                    elif color[y] == color[x]:
                        bipartite[labels[x]] = False
        return color, bipartite

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.u, other.u)
                and np.array_equal(self.v, other.v) and np.array_equal(self.w, other.w))

    def __hash__(self):
        return hash((self.n, self.u.tobytes(), self.v.tobytes(), self.w.tobytes()))

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m}, vol={self.total_volume:g})"


def as_mask(G: WeightedGraph, S) -> np.ndarray:
    """Coerce a vertex-set description to a boolean mask of length ``G.n``."""
    if isinstance(S, VertexSet):
        return S.mask
    if isinstance(S, np.ndarray) and S.dtype == bool:
        if S.shape != (G.n,):
            raise DomainError(f"mask has shape {S.shape}, expected ({G.n},)")
        return S
    ids = np.fromiter((int(x) for x in S), dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= G.n):
        raise DomainError(f"vertex ids must lie in 0..{G.n - 1}")
    mask = np.zeros(G.n, dtype=bool)
    mask[ids] = True
    return mask


def volume(G: WeightedGraph, S) -> float:
    """vol(S), the sum of weighted degrees over S."""
    return float(G.degree[as_mask(G, S)].sum())


def cut_weight(G: WeightedGraph, S) -> float:
    """w(E(S, V \\ S))."""
    m = as_mask(G, S)
    return float(G.w[m[G.u] != m[G.v]].sum())


def internal_weight(G: WeightedGraph, S) -> float:
    """w(E(S)), edges with both endpoints in S."""
    m = as_mask(G, S)
    return float(G.w[m[G.u] & m[G.v]].sum())


def crossing_weight(G: WeightedGraph, A, B) -> float:
    """w(E(A, B)) for disjoint A and B."""
    a, b = as_mask(G, A), as_mask(G, B)
    if np.any(a & b):
        raise DomainError("crossing_weight needs disjoint sets")
    sel = (a[G.u] & b[G.v]) | (b[G.u] & a[G.v])
    return float(G.w[sel].sum())


class VertexSet:
    """An immutable subset of a graph's vertices with its volume and boundary."""

    __slots__ = ("graph", "mask", "volume", "boundary_weight")

    def __init__(self, graph: WeightedGraph, members):
        mask = np.array(as_mask(graph, members), dtype=bool)
        self.graph = graph
        self.mask = _frozen(mask)
        self.volume = volume(graph, mask)
        self.boundary_weight = cut_weight(graph, mask)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.flatnonzero(self.mask))

    def complement(self) -> "VertexSet":
        return VertexSet(self.graph, ~self.mask)

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x) -> bool:
        return 0 <= int(x) < self.graph.n and bool(self.mask[int(x)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.graph is other.graph and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash(self.mask.tobytes())

    def __repr__(self) -> str:
        mem = self.members
        shown = ", ".join(map(str, mem[:12])) + (", ..." if len(mem) > 12 else "")
        return f"VertexSet({{{shown}}}, vol={self.volume:g})"


class InducedCut:
    """A pair of disjoint vertex sets ``(L, R)``; other vertices are uncut."""

    __slots__ = ("left", "right")

    def __init__(self, graph: WeightedGraph, left, right):
        lm, rm = as_mask(graph, left), as_mask(graph, right)
        if np.any(lm & rm):
            raise DomainError("the two sides of an induced cut must be disjoint")
        self.left = left if isinstance(left, VertexSet) else VertexSet(graph, lm)
        self.right = right if isinstance(right, VertexSet) else VertexSet(graph, rm)

    @property
    def graph(self) -> WeightedGraph:
        return self.left.graph

    def swapped(self) -> "InducedCut":
        return InducedCut(self.graph, self.right, self.left)

    def __repr__(self) -> str:
        return f"InducedCut(L={self.left.members}, R={self.right.members})"


def _cut_masks(G: WeightedGraph, cut) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(cut, InducedCut):
        return cut.left.mask, cut.right.mask
    left, right = cut
    lm, rm = as_mask(G, left), as_mask(G, right)
    if np.any(lm & rm):
        raise DomainError("the two sides of an induced cut must be disjoint")
    return lm, rm


def conductance(G: WeightedGraph, S) -> float:
    """phi(S) = w(E(S, S-bar)) / min(vol(S), vol(S-bar)).

    The value is computed identically for S and its complement, so the two
    agree bit for bit.

    Raises
    ------
    DomainError
        If S is empty, is all of V, or one side has zero volume.
    """
    mask = as_mask(G, S)
    if not mask.any() or mask.all():
        raise DomainError("conductance needs a nonempty proper subset")
    cut = float(G.w[mask[G.u] != mask[G.v]].sum())
    vin = float(G.degree[mask].sum())
    vout = float(G.degree[~mask].sum())
    denom = min(vin, vout)
    if denom <= 0:
        raise DomainError("conductance undefined: one side has zero volume")
    return cut / denom


def _uncut_parts(G: WeightedGraph, lm: np.ndarray, rm: np.ndarray) -> tuple[float, float]:
    """Return (w(E(L)) + w(E(R)), w(E(L u R, rest)))."""
    inside = lm | rm
    lu, lv, ru, rv = lm[G.u], lm[G.v], rm[G.u], rm[G.v]
    same = float(G.w[(lu & lv) | (ru & rv)].sum())
    leaving = float(G.w[inside[G.u] != inside[G.v]].sum())
    return same, leaving


def bipartiteness_ratio(G: WeightedGraph, cut) -> float:
    """beta(L, R) = (2w(E(L)) + 2w(E(R)) + w(E(L u R, rest))) / vol(L u R)."""
    lm, rm = _cut_masks(G, cut)
    inside = lm | rm
    if not inside.any():
        raise DomainError("bipartiteness ratio needs L u R nonempty")
    vol = float(G.degree[inside].sum())
    if vol <= 0:
        raise DomainError("bipartiteness ratio undefined: L u R has zero volume")
    same, leaving = _uncut_parts(G, lm, rm)
    return (2.0 * same + leaving) / vol


def uncutness(G: WeightedGraph, cut) -> float:
    """gamma(L, R) = w(E(L)) + w(E(R)) + w(E(L u R, rest)); 0 for the empty cut."""
    lm, rm = _cut_masks(G, cut)
    same, leaving = _uncut_parts(G, lm, rm)
    return same + leaving


def induced_subgraph(G: WeightedGraph, U) -> tuple[WeightedGraph, np.ndarray]:
    """Subgraph on U with every edge of G inside U.

    Returns ``(H, vertices)`` where ``vertices[i]`` is the id in G of vertex
    ``i`` of H (ascending order).
    """
    mask = as_mask(G, U)
    if not mask.any():
        raise DomainError("induced subgraph needs a nonempty vertex set")
    vertices = np.flatnonzero(mask)
    index = np.full(G.n, -1, dtype=np.int64)
    index[vertices] = np.arange(vertices.size)
    keep = mask[G.u] & mask[G.v]
    H = WeightedGraph.from_arrays(vertices.size, index[G.u[keep]], index[G.v[keep]], G.w[keep],
                                  warn_low_degree=False)
    return H, _frozen(vertices)


def phi_k_of_partition(G: WeightedGraph, sets: Sequence) -> float:
    """max_i phi(S_i) for pairwise disjoint nonempty sets S_1..S_k.

    A member with no boundary edges (a union of components, possibly all of
    V or only isolated vertices) contributes 0 even when its conductance
    would be 0/0.
    """
    if len(sets) == 0:
        raise DomainError("need at least one set")
    seen = np.zeros(G.n, dtype=bool)
    worst = 0.0
    for S in sets:
        mask = as_mask(G, S)
        if not mask.any():
            raise DomainError("empty member in partition")
        if np.any(seen & mask):
            raise DomainError("partition members overlap")
        seen |= mask
        if cut_weight(G, mask) > 0:
            worst = max(worst, conductance(G, mask))
    return worst
