"""Deterministic and seeded graph families, and an exhaustive stability probe.

Randomness comes from SplitMix64. Edge presence in the planted model is a
pure function of ``(seed, pair index)``, so it does not depend on the order
in which pairs are visited: the pair ``i < j`` of an n-vertex graph has
index ``i*n - i*(i+1)/2 + (j - i - 1)`` and its uniform is the
``(index + 1)``-th output of a SplitMix64 stream started at ``seed``.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import CapacityError, DomainError
from .graph import VertexSet, WeightedGraph
from .spectral import dense_spectrum

GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1
STABILITY_MAX_N = 16
_MAX_ATTEMPTS = 10_000


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """The SplitMix64 generator: state += golden gamma, then a fixed mixer."""

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & _MASK
        return _mix(self.state)

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection of the biased tail."""
        if bound <= 0:
            raise DomainError("bound must be positive")
        limit = (1 << 64) - (1 << 64) % bound
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def permutation(self, m: int) -> list[int]:
        """Fisher-Yates shuffle of 0..m-1."""
        p = list(range(m))
        for i in range(m - 1, 0, -1):
            j = self.below(i + 1)
            p[i], p[j] = p[j], p[i]
        return p

    @staticmethod
    def uniforms_at(seed: int, index: np.ndarray) -> np.ndarray:
        """Uniforms of outputs ``index + 1`` of the stream at ``seed``, vectorized."""
        idx = np.asarray(index, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(int(seed) & _MASK) + (idx + np.uint64(1)) * np.uint64(GOLDEN)
        return (_mix_array(z) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def gen_cycle(n: int, weight: float = 1.0) -> WeightedGraph:
    """C_n with uniform edge weight."""
    if n < 3:
        raise DomainError(f"cycle needs n >= 3, got {n}")
    return WeightedGraph(n, [(i, (i + 1) % n, weight) for i in range(n)])


def gen_complete(n: int) -> WeightedGraph:
    """K_n with unit weights."""
    if n < 1:
        raise DomainError(f"complete graph needs n >= 1, got {n}")
    return WeightedGraph(n, [(i, j, 1.0) for i, j in itertools.combinations(range(n), 2)])


def gen_path(n: int) -> WeightedGraph:
    """Path 0-1-...-(n-1) with unit weights."""
    if n < 2:
        raise DomainError(f"path needs n >= 2, got {n}")
    return WeightedGraph(n, [(i, i + 1, 1.0) for i in range(n - 1)])


def gen_hypercube(d: int) -> WeightedGraph:
    """The d-dimensional hypercube on 2^d vertices, u ~ v iff they differ in one bit."""
    if d < 1:
        raise DomainError(f"hypercube needs d >= 1, got {d}")
    return WeightedGraph(1 << d, [(v, v | 1 << b, 1.0) for v in range(1 << d)
                                  for b in range(d) if not v >> b & 1])


def gen_barbell(m: int, weight: float = 1.0) -> WeightedGraph:
    """Two copies of K_m joined by one bridge (m-1, m) of the given weight."""
    if m < 2:
        raise DomainError(f"barbell needs m >= 2, got {m}")
    edges = [(i, j, 1.0) for i, j in itertools.combinations(range(m), 2)]
    edges += [(m + i, m + j, 1.0) for i, j in itertools.combinations(range(m), 2)]
    edges.append((m - 1, m, weight))
    return WeightedGraph(2 * m, edges)


def pair_index(i, j, n: int):
    """Index of the pair i < j in row-major order of the strict upper triangle."""
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def gen_planted_bisection(n: int, p: float, q: float, seed: int) -> tuple[WeightedGraph, tuple[VertexSet, VertexSet]]:
    """Planted bisection X = {0..n/2-1}, Y = the rest.

    Pairs inside a side are joined when their uniform is below p, pairs
    across when it is below q. Returns the graph and the planted sides.
    """
    if n < 2 or n % 2:
        raise DomainError(f"planted bisection needs an even n >= 2, got {n}")
    if not 0 <= q <= p <= 1:
        raise DomainError(f"need 0 <= q <= p <= 1, got p={p}, q={q}")
    i, j = np.triu_indices(n, k=1)
    u = SplitMix64.uniforms_at(seed, pair_index(i, j, n))
    half = n // 2
    same = (i < half) == (j < half)
    keep = u < np.where(same, p, q)
    G = WeightedGraph.from_arrays(n, i[keep], j[keep], np.ones(int(keep.sum())))
    side = np.arange(n) < half
    return G, (VertexSet(G, side), VertexSet(G, ~side))


def _regular_surrogate(m: int, degree: int, rng: SplitMix64) -> list[tuple[int, int]]:
    if m <= degree + 1:
        return list(itertools.combinations(range(m), 2))
    if degree % 2:
        raise DomainError(f"permutation superposition needs an even degree, got {degree}")
    seen: set[tuple[int, int]] = set()
    for _ in range(degree // 2):
        for _ in range(_MAX_ATTEMPTS):
            p = rng.permutation(m)
            pairs = {(min(v, p[v]), max(v, p[v])) for v in range(m)}
            # no fixed points, no 2-cycles, no overlap with earlier permutations
            if len(pairs) == m and all(a != b for a, b in pairs) and not pairs & seen:
                seen |= pairs
                break
        else:
            raise DomainError(f"could not draw a collision-free {degree}-regular graph on {m} vertices")
    return sorted(seen)


def gen_joined_expanders(m: int, d_bridge: int, w_bridge: float = 1.0, seed: int = 1,
                         degree: int = 4) -> WeightedGraph:
    """Two random ``degree``-regular graphs on m vertices joined by a matching.

    Each side is a superposition of degree/2 random permutations, redrawn
    until the result is simple; sides with m <= degree + 1 are K_m. Side A
    is 0..m-1 and side B is m..2m-1. The bridges join d_bridge distinct
    random vertices of A to d_bridge distinct random vertices of B. One
    SplitMix64 stream at ``seed`` drives side A, side B, then the bridges.
    """
    if m < 4:
        raise DomainError(f"joined expanders need m >= 4, got {m}")
    if not 0 <= d_bridge <= m:
        raise DomainError(f"need 0 <= d_bridge <= m, got {d_bridge}")
    if degree < 2:
        raise DomainError(f"degree must be at least 2, got {degree}")
    rng = SplitMix64(seed)
    a = _regular_surrogate(m, degree, rng)
    b = _regular_surrogate(m, degree, rng)
    left = rng.permutation(m)[:d_bridge]
    right = rng.permutation(m)[:d_bridge]
    edges = [(x, y, 1.0) for x, y in a] + [(m + x, m + y, 1.0) for x, y in b]
    edges += [(x, m + y, w_bridge) for x, y in zip(left, right)]
    return WeightedGraph(2 * m, edges)


def gen_stable_gadget(n: int, c: float) -> WeightedGraph:
    """Two n-cycles on the even and odd vertices with n rungs of weight c/n^2.

    Cycle one visits 0, 2, ..., 2n-2 and cycle two visits 1, 3, ..., 2n-1,
    both with unit weights; rung i joins 2i and 2i+1.
    """
    if n < 3:
        raise DomainError(f"gadget needs n >= 3, got {n}")
    if not c > 0:
        raise DomainError(f"rung scale must be positive, got {c}")
    edges = [(2 * i, 2 * ((i + 1) % n), 1.0) for i in range(n)]
    edges += [(2 * i + 1, 2 * ((i + 1) % n) + 1, 1.0) for i in range(n)]
    edges += [(2 * i, 2 * i + 1, c / n ** 2) for i in range(n)]
    return WeightedGraph(2 * n, edges)


def _all_conductances(G: WeightedGraph) -> tuple[np.ndarray, np.ndarray]:
    """Bit matrix and conductance of every S containing vertex 0 except V."""
    n = G.n
    codes = np.arange(0, 1 << (n - 1), dtype=np.int64) * 2 + 1
    codes = codes[codes != (1 << n) - 1]
    bits = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
    cut = (bits[:, G.u] != bits[:, G.v]) @ G.w
    vol = bits @ G.degree
    den = np.minimum(vol, G.total_volume - vol)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(den > 0, cut / np.where(den > 0, den, 1.0), np.inf)
    return bits, phi


def stability_probe(G: WeightedGraph, c: float, *, rtol: float = 1e-12) -> dict:
    """Distance from every c-approximate sparsest cut to the optimal ones.

    Enumerates all cuts, takes those with phi(S) <= c phi(G) as
    c-approximate, and reports delta* = max over approximate S of the
    largest min(d, 1 - d) against an optimal T, where d is the fraction of
    vertices on which S and T disagree. Reported next to c lambda_2 /
    lambda_3^1.5 (None when n < 3 or lambda_3 = 0). Report only: the
    relation between the two carries an unspecified constant.

    Raises
    ------
    CapacityError
        If n > 16.
    """
    n = G.n
    if n > STABILITY_MAX_N:
        raise CapacityError(f"stability_probe supports n <= {STABILITY_MAX_N}, got {n}")
    if n < 2 or G.m == 0:
        raise DomainError("need at least two vertices and an edge")
    if c < 1:
        raise DomainError(f"approximation factor must be at least 1, got {c}")
    bits, phi = _all_conductances(G)
    best = float(phi.min())
    opt = bits[phi <= best * (1 + rtol)]
    approx = bits[phi <= c * best * (1 + rtol)]
    diff = (approx[:, None, :] != opt[None, :, :]).mean(axis=2)
    dist = np.minimum(diff, 1 - diff).max(axis=1)
    delta_star = float(dist.max())
    lam2 = lam3 = bound = None
    if n >= 3 and not G.isolated().any():
        sp = dense_spectrum(G)
        lam2, lam3 = sp.eigenvalue(2), sp.eigenvalue(3)
        if lam3 > 0:
            bound = c * lam2 / lam3 ** 1.5
    return {
        "c": float(c),
        "phi": best,
        "optimal_cuts": int(opt.shape[0]),
        "approximate_cuts": int(approx.shape[0]),
        "delta_star": delta_star,
        "lambda_2": lam2,
        "lambda_3": lam3,
        "bound": bound,
    }


GENERATORS = {
    "cycle": gen_cycle,
    "complete": gen_complete,
    "path": gen_path,
    "hypercube": gen_hypercube,
    "barbell": gen_barbell,
    "planted": gen_planted_bisection,
    "expanders": gen_joined_expanders,
    "gadget": gen_stable_gadget,
}
