"""Threshold sweeps, the Dirichlet-Cheeger ratio, and restricted energies.

Threshold sets are ``V_f(t) = {v : f(v) >= t}``. Threshold cuts for
bipartiteness are ``L_f(t) = {f <= -t}``, ``R_f(t) = {f >= t}``. Intervals
are half-open, ``(lo, hi]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .graph import InducedCut, VertexSet, WeightedGraph, bipartiteness_ratio, conductance
from .spectral import VertexFunction

# Candidates whose approximate value is within this relative window of the
# approximate optimum are re-evaluated exactly; the incremental sums can
# differ from a direct evaluation in the last few bits.
_WINDOW = 1e-9


@dataclass(frozen=True)
class SweepResult:
    """Best threshold of a sweep.

    For conductance sweeps ``set`` is the smaller-volume side of the optimal
    threshold set (``V_f(t)`` itself on a volume tie) and ``cut`` is None.
    For bipartiteness sweeps ``cut`` is ``(L_f(t), R_f(t))`` and ``set`` is
    None. ``trace`` lists ``(t, value)`` for every candidate when requested.
    """

    threshold: float
    value: float
    set: VertexSet | None = None
    cut: InducedCut | None = None
    trace: tuple[tuple[float, float], ...] | None = field(default=None, repr=False)


@dataclass(frozen=True)
class Interval:
    """Half-open interval ``(lo, hi]``; endpoints may be given in either order."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise DomainError("interval endpoints must be finite")
        if lo > hi:
            lo, hi = hi, lo
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return (x > self.lo) & (x <= self.hi)

    def disjoint(self, other: "Interval") -> bool:
        return self.hi <= other.lo or other.hi <= self.lo


def _pick(approx: np.ndarray, exact_value) -> int:
    """Index of the exact minimum among candidates near the approximate one.

    Ties go to the lowest index, which is the smallest threshold.
    """
    best = float(np.min(approx))
    if not np.isfinite(best):
        raise DomainError("no threshold gives a well-defined value")
    lim = best + _WINDOW * (1.0 + abs(best))
    cands = np.flatnonzero(approx <= lim)
    vals = [exact_value(int(i)) for i in cands]
    return int(cands[int(np.argmin(vals))])


def _range_add(size: int, lo: np.ndarray, hi: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Sum of w over index ranges [lo, hi), via a difference array."""
    diff = np.zeros(size + 1)
    np.add.at(diff, lo, w)
    np.add.at(diff, hi, -w)
    return np.cumsum(diff[:-1])


def threshold_set(f: VertexFunction, t: float) -> np.ndarray:
    """Boolean mask of V_f(t) = {v : f(v) >= t}."""
    return f.values >= t


def sweep_conductance(f: VertexFunction, *, trace: bool = False) -> SweepResult:
    """Minimum conductance over the threshold sets of f.

    Candidate thresholds are the distinct values of f except the smallest
    (which gives all of V). The minimizer with the smallest threshold is
    reported, as the smaller-volume side of ``V_f(t)``.

    Raises
    ------
    DomainError
        If f is constant, or every threshold set has a zero-volume side.
    """
    G, x = f.graph, f.values
    cand = np.unique(x)[1:]
    if cand.size == 0:
        raise DomainError("sweep needs a non-constant function")
    K = cand.size
    hi_val = np.maximum(x[G.u], x[G.v])
    lo_val = np.minimum(x[G.u], x[G.v])
    # edge crosses V_f(t) iff lo < t <= hi
    cut = _range_add(K, np.searchsorted(cand, lo_val, "right"),
                     np.searchsorted(cand, hi_val, "right"), G.w)
    vol = _range_add(K, np.zeros(G.n, dtype=np.int64), np.searchsorted(cand, x, "right"), G.degree)
    den = np.minimum(vol, G.total_volume - vol)
    with np.errstate(divide="ignore", invalid="ignore"):
        approx = np.where(den > 0, cut / np.where(den > 0, den, 1.0), np.inf)

    def exact(i: int) -> float:
        if den[i] <= 0:
            return float("inf")
        return conductance(G, x >= cand[i])

    i = _pick(approx, exact)
    t = float(cand[i])
    mask = x >= t
    vin = float(G.degree[mask].sum())
    if vin > G.total_volume - vin:
        mask = ~mask
    S = VertexSet(G, mask)
    tr = tuple((float(c), exact(j)) for j, c in enumerate(cand)) if trace else None
    return SweepResult(t, conductance(G, mask), set=S, trace=tr)


def threshold_cut(f: VertexFunction, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Masks of L_f(t) = {f <= -t} and R_f(t) = {f >= t}."""
    return f.values <= -t, f.values >= t


def sweep_bipartiteness(f: VertexFunction, *, trace: bool = False) -> SweepResult:
    """Minimum bipartiteness ratio over the threshold cuts of f.

    Candidates are the distinct nonzero values of ``|f|``; ties go to the
    smaller threshold.

    Raises
    ------
    DomainError
        If f is identically zero or no candidate cut has positive volume.
    """
    G, x = f.graph, f.values
    ax = np.abs(x)
    cand = np.unique(ax[ax > 0])
    if cand.size == 0:
        raise DomainError("bipartiteness sweep needs a nonzero function")
    K = cand.size
    a, b = ax[G.u], ax[G.v]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    # both endpoints are inside iff t <= lo, exactly one iff lo < t <= hi
    ilo = np.searchsorted(cand, lo, "right")
    ihi = np.searchsorted(cand, hi, "right")
    same = (np.sign(x[G.u]) * np.sign(x[G.v])) > 0
    num = _range_add(K, np.zeros(G.m, dtype=np.int64), np.where(same, ilo, 0), 2.0 * G.w)
    num += _range_add(K, ilo, ihi, G.w)
    vol = _range_add(K, np.zeros(G.n, dtype=np.int64), np.searchsorted(cand, ax, "right"), G.degree)
    with np.errstate(divide="ignore", invalid="ignore"):
        approx = np.where(vol > 0, num / np.where(vol > 0, vol, 1.0), np.inf)

    def exact(i: int) -> float:
        lm, rm = threshold_cut(f, cand[i])
        if float(G.degree[lm | rm].sum()) <= 0:
            return float("inf")
        return bipartiteness_ratio(G, (lm, rm))

    i = _pick(approx, exact)
    t = float(cand[i])
    lm, rm = threshold_cut(f, t)
    tr = tuple((float(c), exact(j)) for j, c in enumerate(cand)) if trace else None
    return SweepResult(t, bipartiteness_ratio(G, (lm, rm)), cut=InducedCut(G, lm, rm), trace=tr)


def _check_small_support(h: VertexFunction) -> None:
    if np.any(h.values < 0):
        raise DomainError("function must be non-negative")
    if not np.any(h.values > 0):
        raise DomainError("function must be nonzero")
    if h.support_volume() > h.graph.total_volume / 2:
        raise DomainError("support volume exceeds vol(V)/2")


def dirichlet_bound(h: VertexFunction) -> float:
    """sum w(u,v)|h(u)-h(v)| / sum w(v)h(v), an upper bound on phi(h).

    Raises
    ------
    DomainError
        If h has a negative entry, is zero, or has support volume above
        vol(V)/2.
    """
    _check_small_support(h)
    G, x = h.graph, h.values
    return float(np.sum(G.w * np.abs(x[G.u] - x[G.v])) / np.sum(G.degree * x))


def vol_at_least(f: VertexFunction, t: float) -> float:
    """vol_f(t) = vol(V_f(t))."""
    return float(f.graph.degree[f.values >= t].sum())


def vol_in(f: VertexFunction, I: Interval) -> float:
    """vol_f(I), the volume of vertices whose value lies in I."""
    return float(f.graph.degree[I.contains(f.values)].sum())


def restricted_energy(f: VertexFunction, I: Interval) -> float:
    """E_f(I) = sum over edges of w(u,v) len(I meet [f(u), f(v)])^2."""
    G, x = f.graph, f.values
    lo = np.maximum(np.minimum(x[G.u], x[G.v]), I.lo)
    hi = np.minimum(np.maximum(x[G.u], x[G.v]), I.hi)
    overlap = np.clip(hi - lo, 0.0, None)
    return float(np.sum(G.w * overlap ** 2))


def energy_drop_lower_bound(f: VertexFunction, I: Interval, phi_f: float) -> float:
    """Lower bound on E_f(I) for I = (b, a] with a > b >= 0.

    Returns phi^2 vol_f(a)^2 len(I)^2 / (phi vol_f(a) + vol_f(I)) where
    ``phi_f`` is the sweep conductance of f; 0 when len(I) = 0.

    Raises
    ------
    DomainError
        If f has a negative entry, is zero, has support volume above
        vol(V)/2, if I reaches below 0, or if ``phi_f`` is negative.
    """
    _check_small_support(f)
    if I.lo < 0:
        raise DomainError("interval must lie in [0, inf)")
    if phi_f < 0 or not np.isfinite(phi_f):
        raise DomainError("phi_f must be a finite non-negative number")
    if I.length == 0:
        return 0.0
    top = phi_f * vol_at_least(f, I.hi)
    den = top + vol_in(f, I)
    if den == 0:
        return 0.0
    return top * top * I.length ** 2 / den
