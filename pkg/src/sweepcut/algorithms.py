"""Balanced separator, iterative spectral max cut, and recursive k-way partitioning."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .certificates import Certificate
from .errors import DomainError
from .graph import (InducedCut, VertexSet, WeightedGraph, as_mask, conductance, crossing_weight,
                    cut_weight, induced_subgraph, internal_weight, phi_k_of_partition, uncutness)
from .oracles import BETA_MAX_N, brute_force_bisection, maxcut_deficit
from .regions import main_func_dichotomy
from .spectral import LAPLACIAN, SIGNLESS, VertexFunction, dense_spectrum, nonneg_split, rayleigh, signless_rayleigh
from .steps import band_functions, smallest_band_functions, symmetric_step_approximation
from .sweep import sweep_bipartiteness, sweep_conductance

BISECTION_ORACLE_MAX_N = 20
MAXCUT_CONSTANT = 600


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


# ----------------------------------------------------------------------------
# enlargement checks


def _restricted(G: WeightedGraph, U, f: VertexFunction) -> tuple[WeightedGraph, np.ndarray, np.ndarray]:
    if f.graph is not G:
        raise DomainError("function must live on G")
    um = as_mask(G, U)
    if np.any(f.values[~um] != 0):
        raise DomainError("function must vanish outside U")
    if not np.any(f.values):
        raise DomainError("function must be nonzero")
    H, verts = induced_subgraph(G, um)
    return H, verts, um


def _h_rayleigh(H: WeightedGraph, x: np.ndarray, signless: bool) -> float | None:
    """Rayleigh quotient in H with H's degrees, or None when undefined."""
    den = float(np.sum(H.degree * x * x))
    if den == 0:
        return None
    d = x[H.u] + x[H.v] if signless else x[H.u] - x[H.v]
    return float(np.sum(H.w * d * d)) / den


def rayleigh_enlargement_check(G: WeightedGraph, U, f: VertexFunction) -> Certificate:
    """R_G(f) <= sqrt(8 R_H(f)) when no threshold set of f leaks more outside U than inside.

    The hypothesis ``w(E(S, V - U)) <= w(E(S, U - S))`` is checked for every
    threshold set S of f; when it fails for some S the certificate is
    marked not applicable. R_H uses the degrees of the induced subgraph H.
    Both sides are invariant under scaling f, so no normalization is needed.

    Raises
    ------
    DomainError
        If f is negative, zero, or nonzero outside U.
    """
    H, verts, um = _restricted(G, U, f)
    if np.any(f.values < 0):
        raise DomainError("function must be non-negative")
    x = f.values
    ok = True
    for t in np.unique(x[x > 0]):
        S = x >= t
        if crossing_weight(G, S, ~um) > crossing_weight(G, S, um & ~S):
            ok = False
            break
    RG = rayleigh(f)
    RH = _h_rayleigh(H, x[verts], signless=False)
    applicable = ok and RH is not None
    rhs = math.sqrt(8 * RH) if RH is not None else math.nan
    return Certificate("rayleigh_enlargement", RG, rhs,
                       constants={"hypothesis": ok, "rayleigh_H": RH}, applicable=applicable)


def _threshold_cuts(x: np.ndarray):
    for t in np.unique(np.abs(x[x != 0])):
        yield float(t), x <= -t, x >= t


def maxcut_enlargement_check(G: WeightedGraph, U, partial: InducedCut | tuple, f: VertexFunction) -> Certificate:
    """R_G(f) <= sqrt(72 R_H(f)) (signless) under the weaker leak condition.

    For every threshold cut (L_t, R_t) of f the condition is
    ``w(E(X, V - U)) / 2 <= 2w(E(L_t)) + 2w(E(R_t)) + w(E(X, U - X))`` with
    ``X = L_t u R_t``. When it fails for some t the certificate is not
    applicable. The constants also record whether every threshold cut
    would strictly increase the uncutness of ``partial`` in both
    orientations.

    Raises
    ------
    DomainError
        If f is zero or nonzero outside U, or ``partial`` does not
        partition V - U.
    """
    H, verts, um = _restricted(G, U, f)
    cut = partial if isinstance(partial, InducedCut) else InducedCut(G, *partial)
    lm, rm = cut.left.mask, cut.right.mask
    if np.any((lm | rm) & um) or not np.all(lm | rm | um):
        raise DomainError("partial cut must partition the complement of U")
    g0 = uncutness(G, cut)
    weak = True
    strict = True
    for _, lt, rt in _threshold_cuts(f.values):
        X = lt | rt
        leak = crossing_weight(G, X, ~um)
        inside = 2 * internal_weight(G, lt) + 2 * internal_weight(G, rt) + crossing_weight(G, X, um & ~X)
        if leak / 2 > inside:
            weak = False
        if min(uncutness(G, (lm | lt, rm | rt)), uncutness(G, (lm | rt, rm | lt))) <= g0:
            strict = False
    RG = signless_rayleigh(f)
    RH = _h_rayleigh(H, f.values[verts], signless=True)
    applicable = weak and RH is not None
    rhs = math.sqrt(72 * RH) if RH is not None else math.nan
    return Certificate("maxcut_enlargement", RG, rhs,
                       constants={"weak_condition": weak, "invariant": strict, "rayleigh_H": RH},
                       applicable=applicable)


# ----------------------------------------------------------------------------
# balanced separator


@dataclass(frozen=True)
class SeparatorStep:
    branch: str  # "isolated", "enlarge", "sweep" or "degenerate"
    lambda2_H: float | None
    removed: tuple[int, ...]
    step_ratio: float
    union_ratio: float


@dataclass(frozen=True)
class SeparatorResult:
    """Removed set S with vol(V)/5 <= vol(S) <= 4vol(V)/5 and its conductance.

    ``epsilon`` is the minimum conductance over exact bisections when the
    graph is small enough for exhaustive search (None otherwise, or when
    no exact bisection exists).
    """

    set: VertexSet
    conductance: float
    iterations: int
    trace: tuple[SeparatorStep, ...] = field(repr=False)
    epsilon: float | None = None

    @property
    def balanced(self) -> bool:
        vol, tot = self.set.volume, self.set.graph.total_volume
        return tot / 5 <= vol <= 4 * tot / 5


def _enlarging_set(G: WeightedGraph, um: np.ndarray, verts: np.ndarray, fs) -> np.ndarray | None:
    """First threshold set S of some f_i with w(E(S, U-S)) <= w(E(S, V-U))."""
    for h in fs:
        for t in np.unique(h.values[h.values > 0]):
            S = np.zeros(G.n, dtype=bool)
            S[verts[h.values >= t]] = True
            if crossing_weight(G, S, um & ~S) <= crossing_weight(G, S, ~um):
                return S
    return None


def balanced_separator(G: WeightedGraph, k: int) -> SeparatorResult:
    """Peel sparse sets off the graph until the removed part is balanced.

    Each round works on the subgraph H induced by the remaining vertices U.
    Vertices isolated in H are removed first. Otherwise the lambda_2
    eigenfunction of H is split into a non-negative small-support f; when f
    admits k disjoint small-Rayleigh functions, a threshold set S of one of
    them with ``w(E(S, U-S)) <= w(E(S, V-U))`` is removed if one exists,
    and otherwise the best sweep set of f is removed. Every round keeps
    ``vol(U) > 3vol(V)/10``, so the result is balanced.

    Raises
    ------
    DomainError
        If k is outside 2..n or G has fewer than two vertices or no edges.
    """
    if G.n < 2 or G.m == 0:
        raise DomainError("need a graph with at least two vertices and an edge")
    if not 2 <= k <= G.n:
        raise DomainError(f"k must lie in 2..{G.n}, got {k}")
    tot = G.total_volume
    um = np.ones(G.n, dtype=bool)
    trace = []
    while float(G.degree[um].sum()) > 0.8 * tot:
        H, verts = induced_subgraph(G, um)
        iso = H.isolated()
        lam2 = None
        if iso.any():
            S = np.zeros(G.n, dtype=bool)
            S[verts[iso]] = True
            branch, step = "isolated", 0.0
        else:
            sp = dense_spectrum(H, LAPLACIAN)
            lam2 = sp.eigenvalue(2)
            f = nonneg_split(sp.eigenfunction(2), lam2)
            dich = main_func_dichotomy(f, k)
            S = _enlarging_set(G, um, verts, dich.functions) if dich.case == 2 else None
            if S is not None:
                branch, step = "enlarge", 0.0
            else:
                sw = sweep_conductance(f)
                S = np.zeros(G.n, dtype=bool)
                S[verts[sw.set.mask]] = True
                branch = "sweep"
                if not S.any() or np.array_equal(S, um):
                    S = np.zeros(G.n, dtype=bool)
                    S[verts[int(np.argmax(f.values))]] = True
                    branch = "degenerate"
                hmask = S[verts]
                step = _ratio(crossing_weight(H, hmask, ~hmask), float(H.degree[hmask].sum()))
        um = um & ~S
        removed = ~um
        union = _ratio(cut_weight(G, removed), float(G.degree[removed].sum()))
        trace.append(SeparatorStep(branch, lam2, tuple(int(v) for v in np.flatnonzero(S)), step, union))
    out = VertexSet(G, ~um)
    eps = None
    if G.n <= BISECTION_ORACLE_MAX_N:
        eps, _ = brute_force_bisection(G)
    return SeparatorResult(out, conductance(G, out.mask), len(trace), tuple(trace), eps)


# ----------------------------------------------------------------------------
# max cut


@dataclass(frozen=True)
class MaxCutStep:
    rho: float
    branch: str  # "enlarge" or "sweep"
    alpha1_H: float
    beta: float
    removed: int
    uncutness: float


@dataclass(frozen=True)
class MaxCutResult:
    """Final cut with L u R = V, its cut fraction, and the evaluated guarantee.

    ``epsilon`` is 1 - (max cut)/w(E) when known (0 for bipartite graphs,
    exhaustive search for small graphs, None otherwise). ``guarantee`` is
    1 when epsilon = 0, the closed-form bound when 600k eps < alpha_k, 0
    when the bound is vacuous, and None when epsilon is unknown.
    """

    cut: InducedCut
    cut_fraction: float
    guarantee: float | None
    epsilon: float | None
    alpha_k: float | None
    trace: tuple[MaxCutStep, ...] = field(repr=False)


def maxcut_guarantee(k: int, eps: float | None, alpha_k: float | None) -> float | None:
    """1 - (600 k eps / alpha_k)(1 + ln(alpha_k / (600 k eps))), clipped to the trivial bound."""
    if eps is None:
        return None
    if eps == 0:
        return 1.0
    if alpha_k is None or not MAXCUT_CONSTANT * k * eps < alpha_k:
        return 0.0
    r = MAXCUT_CONSTANT * k * eps / alpha_k
    return max(0.0, 1.0 - r * (1.0 + math.log(1.0 / r)))


def _non_isolated(G: WeightedGraph) -> tuple[WeightedGraph, np.ndarray]:
    return induced_subgraph(G, ~G.isolated())


def _enlarging_cut(G, lm, rm, verts, fs):
    g0 = uncutness(G, (lm, rm))
    for h in fs:
        for _, lt, rt in _threshold_cuts(h.values):
            L2 = np.zeros(G.n, dtype=bool)
            R2 = np.zeros(G.n, dtype=bool)
            L2[verts[lt]] = True
            R2[verts[rt]] = True
            a = uncutness(G, (lm | L2, rm | R2))
            b = uncutness(G, (lm | R2, rm | L2))
            if min(a, b) <= g0:
                return (L2, R2) if a <= b else (R2, L2)
    return None


def spectral_maxcut(G: WeightedGraph, k: int) -> MaxCutResult:
    """Iteratively remove near-bipartite induced cuts and merge them.

    Each round works on H, the subgraph induced by the unassigned vertices
    minus those isolated in it, and takes the alpha_1 eigenfunction f of
    its signless operator. When the symmetric step construction for f
    fails, a threshold cut of one of the k best band functions that does
    not increase the uncutness of (L, R) is merged in its better
    orientation if one exists. Otherwise the best bipartiteness threshold
    cut of f is merged. Vertices left over once no edges remain are placed
    on the side opposite to most of their weight.

    Raises
    ------
    DomainError
        If k is outside 2..n or G has no edges.
    """
    if G.m == 0:
        raise DomainError("max cut needs at least one edge")
    if not 2 <= k <= G.n:
        raise DomainError(f"k must lie in 2..{G.n}, got {k}")
    total = G.total_weight
    lm = np.zeros(G.n, dtype=bool)
    rm = np.zeros(G.n, dtype=bool)
    trace = []
    while True:
        um = ~(lm | rm)
        inner = internal_weight(G, um)
        if inner == 0:
            break
        H0, v0 = induced_subgraph(G, um)
        H, vh = _non_isolated(H0)
        verts = v0[vh]
        sp = dense_spectrum(H, SIGNLESS)
        f = sp.eigenfunction(1)
        sw = sweep_bipartiteness(f)
        found = None
        approx = symmetric_step_approximation(f, k, sw.value)
        if not approx.succeeded:
            fs = smallest_band_functions(band_functions(f, approx), k, signless=True)
            found = _enlarging_cut(G, lm, rm, verts, fs)
        if found is not None:
            L2, R2 = found
            branch = "enlarge"
            beta = float("nan")
        else:
            L2 = np.zeros(G.n, dtype=bool)
            R2 = np.zeros(G.n, dtype=bool)
            L2[verts[sw.cut.left.mask]] = True
            R2[verts[sw.cut.right.mask]] = True
            branch = "sweep"
            beta = sw.value
        lm, rm = lm | L2, rm | R2
        trace.append(MaxCutStep(inner / total, branch, sp.eigenvalue(1), beta,
                                int((L2 | R2).sum()), uncutness(G, (lm, rm))))
    for v in np.flatnonzero(~(lm | rm)):
        nb = (G.u == v) | (G.v == v)
        other = np.where(G.u[nb] == v, G.v[nb], G.u[nb])
        to_r = float(G.w[nb][rm[other]].sum())
        to_l = float(G.w[nb][lm[other]].sum())
        if to_r >= to_l:
            lm[v] = True
        else:
            rm[v] = True
    cut = InducedCut(G, lm, rm)
    frac = crossing_weight(G, lm, rm) / total
    color, bip = G.two_coloring()
    if bip.all():
        eps = 0.0
    elif G.n <= BETA_MAX_N:
        eps = maxcut_deficit(G)
    else:
        eps = None
    G2, _ = _non_isolated(G)
    alpha_k = dense_spectrum(G2, SIGNLESS).eigenvalue(k) if k <= G2.n else None
    return MaxCutResult(cut, frac, maxcut_guarantee(k, eps, alpha_k), eps, alpha_k, tuple(trace))


# ----------------------------------------------------------------------------
# recursive k-way


def recursive_kway(G: WeightedGraph, k: int) -> tuple[list[VertexSet], float]:
    """Split the largest-volume part by a spectral sweep until there are k parts.

    A part containing a vertex isolated in its induced subgraph splits off
    its lowest such vertex; otherwise it splits along the best sweep set of
    the lambda_2 eigenfunction of its induced subgraph. Returns the parts
    ordered by smallest member and max_i phi(S_i).

    Raises
    ------
    DomainError
        If k is outside 1..n.
    """
    if not 1 <= k <= G.n:
        raise DomainError(f"k must lie in 1..{G.n}, got {k}")
    parts = [np.ones(G.n, dtype=bool)]
    while len(parts) < k:
        cand = [i for i, p in enumerate(parts) if p.sum() >= 2]
        i = max(cand, key=lambda j: (float(G.degree[parts[j]].sum()), -j))
        H, verts = induced_subgraph(G, parts[i])
        iso = H.isolated()
        side = np.zeros(G.n, dtype=bool)
        if iso.any():
            side[verts[int(np.argmax(iso))]] = True
        else:
            sp = dense_spectrum(H, LAPLACIAN)
            side[verts[sweep_conductance(sp.eigenfunction(2)).set.mask]] = True
        parts[i:i + 1] = [side, parts[i] & ~side]
    parts.sort(key=lambda p: int(np.argmax(p)))
    sets = [VertexSet(G, p) for p in parts]
    value = phi_k_of_partition(G, sets)
    return sets, value
