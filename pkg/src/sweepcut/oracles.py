"""Exhaustive oracles for small graphs.

Each oracle screens every candidate in vectorized floating point, then
re-evaluates all candidates within a narrow window of the float optimum in
exact rational arithmetic (when every weight is a ratio of integers no
larger than 2**53). The reported value is the exact optimum rounded once to
float, and ties go to the lexicographically smallest witness.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import CapacityError, DomainError
from .graph import InducedCut, VertexSet, WeightedGraph, bipartiteness_ratio, conductance

PHI_MAX_N = 24
BETA_MAX_N = 14
_CHUNK = 1 << 15
_LIMIT = 1 << 53


class _Exact:
    """Integer-scaled copy of the edge weights, or None when not representable."""

    def __init__(self, G: WeightedGraph):
        fr = [Fraction(float(x)) for x in G.w]
        self.ok = all(f.numerator <= _LIMIT and f.denominator <= _LIMIT for f in fr)
        if not self.ok:
            return
        scale = 1
        for f in fr:
            scale = scale * f.denominator // math.gcd(scale, f.denominator)
        self.scale = scale
        self.w = [f.numerator * (scale // f.denominator) for f in fr]
        self.u = G.u.tolist()
        self.v = G.v.tolist()
        deg = [0] * G.n
        for a, b, x in zip(self.u, self.v, self.w):
            deg[a] += x
            deg[b] += x
        self.deg = deg
        self.total = sum(deg)

    def conductance(self, members: frozenset) -> Fraction:
        cut = sum(x for a, b, x in zip(self.u, self.v, self.w) if (a in members) != (b in members))
        vin = sum(self.deg[i] for i in members)
        return Fraction(cut, min(vin, self.total - vin))

    def beta(self, left: frozenset, right: frozenset) -> Fraction:
        inside = left | right
        num = 0
        for a, b, x in zip(self.u, self.v, self.w):
            if (a in left and b in left) or (a in right and b in right):
                num += 2 * x
            elif (a in inside) != (b in inside):
                num += x
        return Fraction(num, sum(self.deg[i] for i in inside))

    def cut(self, members: frozenset) -> int:
        return sum(x for a, b, x in zip(self.u, self.v, self.w) if (a in members) != (b in members))


def _bits(codes: np.ndarray, n: int) -> np.ndarray:
    return ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def _subset_scan(G: WeightedGraph, score):
    """Yield (codes, values) chunks over all proper nonempty subsets."""
    n = G.n
    total = (1 << n) - 1
    for start in range(1, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        yield codes, score(_bits(codes, n))


def _window(best: float) -> float:
    return best + 1e-9 * (1.0 + abs(best))


def _members(code: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if code >> i & 1)


def brute_force_phi(G: WeightedGraph) -> tuple[float, VertexSet]:
    """Minimum conductance over all proper subsets, phi(G), with an argmin set.

    Raises
    ------
    CapacityError
        If ``G.n > 24``.
    DomainError
        If G has fewer than two vertices or no subset has positive volume on
        both sides.
    """
    n = G.n
    if n > PHI_MAX_N:
        raise CapacityError(f"brute_force_phi supports n <= {PHI_MAX_N}, got {n}")
    if n < 2:
        raise DomainError("need at least two vertices")
    w, deg, tot = G.w, G.degree, G.total_volume

    def score(bits):
        cut = (bits[:, G.u] != bits[:, G.v]) @ w
        vol = bits @ deg
        den = np.minimum(vol, tot - vol)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(den > 0, cut / np.where(den > 0, den, 1.0), np.inf)
        return val

    chunks = list(_subset_scan(G, score))
    best = min(float(v.min()) for _, v in chunks)
    if not math.isfinite(best):
        raise DomainError("conductance undefined for every subset (no edges)")
    lim = _window(best)
    cands = [int(c) for codes, v in chunks for c in codes[v <= lim]]
    exact = _Exact(G)
    keyed = []
    for c in cands:
        mem = _members(c, n)
        if exact.ok:
            val = exact.conductance(frozenset(mem))
        else:
            val = conductance(G, list(mem))
        keyed.append((val, mem))
    val, mem = min(keyed)
    return float(val), VertexSet(G, list(mem))


def brute_force_beta(G: WeightedGraph) -> tuple[float, InducedCut]:
    """Minimum bipartiteness ratio over all induced cuts, beta(G).

    Enumerates all 3**n assignments of each vertex to L, R, or neither.

    Raises
    ------
    CapacityError
        If ``G.n > 14``.
    """
    n = G.n
    if n > BETA_MAX_N:
        raise CapacityError(f"brute_force_beta supports n <= {BETA_MAX_N}, got {n}")
    if n < 1:
        raise DomainError("empty graph")
    w, deg = G.w, G.degree
    powers = 3 ** np.arange(n, dtype=np.int64)
    total = 3 ** n
    best = math.inf
    chunks = []
    for start in range(1, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (codes[:, None] // powers) % 3
        inl, inr = digits == 1, digits == 2
        ins = inl | inr
        same = (inl[:, G.u] & inl[:, G.v]) | (inr[:, G.u] & inr[:, G.v])
        one = ins[:, G.u] != ins[:, G.v]
        num = (2.0 * same + one) @ w
        vol = ins @ deg
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(vol > 0, num / np.where(vol > 0, vol, 1.0), np.inf)
        chunks.append((codes, val))
        best = min(best, float(val.min()))
    if not math.isfinite(best):
        raise DomainError("bipartiteness ratio undefined (no vertex with positive degree)")
    lim = _window(best)
    exact = _Exact(G)
    keyed = []
    for codes, val in chunks:
        for c in codes[val <= lim]:
            d = [(int(c) // 3 ** i) % 3 for i in range(n)]
            left = tuple(i for i in range(n) if d[i] == 1)
            right = tuple(i for i in range(n) if d[i] == 2)
            if exact.ok:
                x = exact.beta(frozenset(left), frozenset(right))
            else:
                x = bipartiteness_ratio(G, (list(left), list(right)))
            keyed.append((x, left, right))
    x, left, right = min(keyed)
    return float(x), InducedCut(G, list(left), list(right))


def brute_force_maxcut(G: WeightedGraph) -> tuple[float, VertexSet]:
    """Maximum cut weight over all subsets, with a maximizing side.

    Ties go to the lexicographically smallest side; sides S and V \\ S give
    the same cut, so the side containing vertex 0 is reported.
    """
    n = G.n
    if n > PHI_MAX_N:
        raise CapacityError(f"brute_force_maxcut supports n <= {PHI_MAX_N}, got {n}")
    if n < 2 or G.m == 0:
        return 0.0, VertexSet(G, [0] if n else [])
    chunks = list(_subset_scan(G, lambda bits: (bits[:, G.u] != bits[:, G.v]) @ G.w))
    best = max(float(v.max()) for _, v in chunks)
    lim = best - 1e-9 * (1.0 + best)
    exact = _Exact(G)
    keyed = []
    for codes, v in chunks:
        for c in codes[v >= lim]:
            mem = _members(int(c), n)
            if exact.ok:
                val = Fraction(exact.cut(frozenset(mem)), exact.scale)
            else:
                val = float(G.w[np.isin(G.u, mem) != np.isin(G.v, mem)].sum())
            keyed.append((-val, mem))
    val, mem = min(keyed)
    return float(-val), VertexSet(G, list(mem))


def maxcut_deficit(G: WeightedGraph) -> float:
    """epsilon = 1 - (maximum cut weight) / w(E), by exhaustive search."""
    if G.m == 0:
        raise DomainError("max cut undefined for an edgeless graph")
    best, _ = brute_force_maxcut(G)
    return max(0.0, 1.0 - best / G.total_weight)


def brute_force_bisection(G: WeightedGraph) -> tuple[float | None, VertexSet | None]:
    """Minimum conductance over sets with vol(S) exactly vol(V)/2.

    Returns ``(None, None)`` when no set has exactly half the volume. Exact
    volume comparison needs representable weights; otherwise a relative
    tolerance of 1e-12 decides equality.
    """
    n = G.n
    if n > 20:
        raise CapacityError(f"brute_force_bisection supports n <= 20, got {n}")
    exact = _Exact(G)
    tot = G.total_volume
    w, deg = G.w, G.degree
    codes_all, vals_all = [], []
    for start in range(1, (1 << n) - 1, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, (1 << n) - 1), dtype=np.int64)
        bits = _bits(codes, n)
        vol = bits @ deg
        keep = np.abs(2.0 * vol - tot) <= 1e-12 * tot
        if keep.any():
            cut = (bits[keep][:, G.u] != bits[keep][:, G.v]) @ w
            codes_all.append(codes[keep])
            vals_all.append(cut / (tot / 2))
    if not codes_all:
        return None, None
    codes = np.concatenate(codes_all)
    vals = np.concatenate(vals_all)
    order = np.argsort(vals, kind="stable")

    def balanced(mem) -> bool:
        return not exact.ok or 2 * sum(exact.deg[i] for i in mem) == exact.total

    # the float screen decides the window; exact arithmetic decides the winner
    first = next((i for i in order if balanced(_members(int(codes[i]), n))), None)
    if first is None:
        return None, None
    lim = _window(float(vals[first]))
    best_key = None
    for i in order:
        if vals[i] > lim:
            break
        mem = _members(int(codes[i]), n)
        if not balanced(mem):
            continue
        val = exact.conductance(frozenset(mem)) if exact.ok else conductance(G, list(mem))
        key = (val, mem)
        if best_key is None or key < best_key:
            best_key = key
    return float(best_key[0]), VertexSet(G, list(best_key[1]))
