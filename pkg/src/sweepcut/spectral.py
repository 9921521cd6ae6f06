"""Normalized Laplacian and signless operator spectra, Rayleigh quotients.

Functions on vertices are exposed in the ``f = D^{-1/2} g`` convention, where
``g`` is a unit eigenvector of the symmetric operator. In this convention the
eigenfunctions are orthonormal in the degree-weighted inner product
``<f, h>_w = sum_v w(v) f(v) h(v)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, DomainError
from .graph import WeightedGraph

DEFAULT_SPECTRAL_CAP = 4096
LAPLACIAN = "laplacian"
SIGNLESS = "signless"

# Entries of a unit eigenvector below this (relative to its largest entry)
# are rounding noise; they are ignored for sign normalization and splitting.
_SNAP = 1e-12


def spectral_cap() -> int:
    """Vertex cap for dense spectra; ``SPECTRAL_CAP`` in the environment overrides it."""
    raw = os.environ.get("SPECTRAL_CAP")
    if raw is None or raw.strip() == "":
        return DEFAULT_SPECTRAL_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise DomainError(f"SPECTRAL_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise DomainError("SPECTRAL_CAP must be positive")
    return cap


class VertexFunction:
    """Real values on the vertices of a graph, in the space l2(V, w)."""

    __slots__ = ("graph", "values")

    def __init__(self, graph: WeightedGraph, values):
        vals = np.array(values, dtype=np.float64)
        if vals.shape != (graph.n,):
            raise DomainError(f"function has shape {vals.shape}, expected ({graph.n},)")
        if not np.all(np.isfinite(vals)):
            raise DomainError("function values must be finite")
        vals.setflags(write=False)
        self.graph = graph
        self.values = vals

    def norm_w(self) -> float:
        return float(np.sqrt(np.sum(self.graph.degree * self.values ** 2)))

    def inner(self, other: "VertexFunction") -> float:
        return float(np.sum(self.graph.degree * self.values * other.values))

    def support(self) -> np.ndarray:
        return self.values != 0

    def support_volume(self) -> float:
        return float(self.graph.degree[self.support()].sum())

    def normalized(self) -> "VertexFunction":
        nrm = self.norm_w()
        if nrm == 0:
            raise DomainError("cannot normalize a function of zero w-norm")
        return VertexFunction(self.graph, self.values / nrm)

    def scaled(self, c: float) -> "VertexFunction":
        return VertexFunction(self.graph, self.values * c)

    def __neg__(self) -> "VertexFunction":
        return VertexFunction(self.graph, -self.values)

    def __len__(self) -> int:
        return self.graph.n

    def __repr__(self) -> str:
        return f"VertexFunction(n={self.graph.n}, norm_w={self.norm_w():.6g})"


@dataclass(frozen=True)
class Spectrum:
    """Full ascending spectrum of the normalized Laplacian or signless operator.

    ``eigenvalues[i]`` pairs with column ``i`` of ``functions`` (the
    ``f``-convention eigenfunction) and of ``vectors`` (the unit ``g``).
    Use :meth:`eigenvalue` and :meth:`eigenfunction` for 1-based access
    matching the usual lambda_1 <= lambda_2 <= ... indexing.
    """

    which: str
    graph: WeightedGraph
    eigenvalues: np.ndarray
    vectors: np.ndarray
    functions: np.ndarray

    def eigenvalue(self, k: int) -> float:
        if not 1 <= k <= self.graph.n:
            raise DomainError(f"eigenvalue index {k} outside 1..{self.graph.n}")
        return float(self.eigenvalues[k - 1])

    def eigenfunction(self, k: int) -> VertexFunction:
        if not 1 <= k <= self.graph.n:
            raise DomainError(f"eigenfunction index {k} outside 1..{self.graph.n}")
        return VertexFunction(self.graph, self.functions[:, k - 1])

    def operator(self) -> np.ndarray:
        return operator_matrix(self.graph, self.which)


def _normalized_adjacency(G: WeightedGraph) -> np.ndarray:
    s = 1.0 / np.sqrt(G.degree)
    n_mat = np.zeros((G.n, G.n))
    vals = G.w * s[G.u] * s[G.v]
    n_mat[G.u, G.v] = vals
    n_mat[G.v, G.u] = vals
    return n_mat


def operator_matrix(G: WeightedGraph, which: str = LAPLACIAN) -> np.ndarray:
    """Dense I - D^-1/2 A D^-1/2 (laplacian) or I + D^-1/2 A D^-1/2 (signless)."""
    if which not in (LAPLACIAN, SIGNLESS):
        raise DomainError(f"which must be {LAPLACIAN!r} or {SIGNLESS!r}, got {which!r}")
    if np.any(G.degree == 0):
        raise DomainError("operator undefined: graph has an isolated vertex")
    sign = -1.0 if which == LAPLACIAN else 1.0
    return np.eye(G.n) + sign * _normalized_adjacency(G)


def _null_basis(G: WeightedGraph, which: str) -> np.ndarray:
    """Canonical orthonormal basis (columns, g-convention) of the kernel.

    For the Laplacian the kernel is spanned by sqrt(d) times component
    indicators. The first column is the global one, and column j >= 2 is
    positive on component j-1 and negative on all later components, so a
    kernel eigenfunction always has both signs. For the signless operator
    the kernel is spanned by sqrt(d) times the +-1 bipartition of each
    bipartite component.
    """
    sq = np.sqrt(G.degree)
    labels = G.components()
    ncomp = int(labels.max()) + 1
    if which == LAPLACIAN:
        vols = np.bincount(labels, weights=G.degree, minlength=ncomp)
        cols = [sq / np.sqrt(G.total_volume)]
        for j in range(1, ncomp):
            head = labels == j - 1
            tail = labels >= j
            f = head / vols[j - 1] - tail / vols[j:].sum()
            g = sq * f
            cols.append(g / np.linalg.norm(g))
        return np.column_stack(cols)
    color, bipartite = G.two_coloring()
    cols = []
    for c in np.flatnonzero(bipartite):
        g = np.where(labels == c, sq * color, 0.0)
        cols.append(g / np.linalg.norm(g))
    if not cols:
        return np.zeros((G.n, 0))
    return np.column_stack(cols)


def _normalize_signs(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        big = np.abs(col) > _SNAP * np.abs(col).max()
        if col[np.argmax(big)] < 0:
            out[:, j] = -col
    return out


def dense_spectrum(G: WeightedGraph, which: str = LAPLACIAN) -> Spectrum:
    """Full spectrum of the normalized Laplacian or the signless operator.

    Eigenvalues ascend. Kernel eigenvectors are replaced by a canonical
    basis (see ``_null_basis``) with exactly zero eigenvalues, and every
    eigenvector is sign-normalized so that its first non-negligible
    coordinate is positive.

    Raises
    ------
    CapacityError
        If ``G.n`` exceeds :func:`spectral_cap`.
    DomainError
        If G has no vertices or an isolated vertex.
    """
    cap = spectral_cap()
    if G.n > cap:
        raise CapacityError(f"dense spectrum limited to n <= {cap} (set SPECTRAL_CAP), got {G.n}")
    if G.n < 1:
        raise DomainError("empty graph")
    op = operator_matrix(G, which)
    vals, vecs = np.linalg.eigh(op)
    null = _null_basis(G, which)
    z = null.shape[1]
    if z:
        vals[:z] = 0.0
        vecs[:, :z] = null
    vecs = _normalize_signs(vecs)
    funcs = vecs / np.sqrt(G.degree)[:, None]
    for a in (vals, vecs, funcs):
        a.setflags(write=False)
    return Spectrum(which, G, vals, vecs, funcs)


def energy(f: VertexFunction) -> float:
    """sum over edges of w(u,v) (f(u) - f(v))^2."""
    G, x = f.graph, f.values
    return float(np.sum(G.w * (x[G.u] - x[G.v]) ** 2))


def signless_energy(f: VertexFunction) -> float:
    """sum over edges of w(u,v) (f(u) + f(v))^2."""
    G, x = f.graph, f.values
    return float(np.sum(G.w * (x[G.u] + x[G.v]) ** 2))


def _denominator(f: VertexFunction) -> float:
    d = float(np.sum(f.graph.degree * f.values ** 2))
    if d == 0:
        raise DomainError("Rayleigh quotient undefined for a function of zero w-norm")
    return d


def rayleigh(f: VertexFunction) -> float:
    """R(f) = sum w(u,v)(f(u)-f(v))^2 / sum w(v) f(v)^2."""
    return energy(f) / _denominator(f)


def signless_rayleigh(f: VertexFunction) -> float:
    """Signless R(f) = sum w(u,v)(f(u)+f(v))^2 / sum w(v) f(v)^2."""
    return signless_energy(f) / _denominator(f)


def eigen_residual(f: VertexFunction, mu: float, which: str = LAPLACIAN) -> float:
    """Relative residual ||Op g - mu g|| / ||g|| for g = D^{1/2} f."""
    G = f.graph
    g = np.sqrt(G.degree) * f.values
    ng = np.linalg.norm(g)
    if ng == 0:
        raise DomainError("zero function")
    s = 1.0 / np.sqrt(G.degree)
    coef = G.w * s[G.u] * s[G.v]
    ag = np.zeros(G.n)
    np.add.at(ag, G.u, coef * g[G.v])
    np.add.at(ag, G.v, coef * g[G.u])
    sign = -1.0 if which == LAPLACIAN else 1.0
    return float(np.linalg.norm(g + sign * ag - mu * g) / ng)


def nonneg_split(f2: VertexFunction, lam2: float, *, tol: float = 1e-8) -> VertexFunction:
    """Non-negative function with small support from a lambda_2 eigenfunction.

    ``f2`` is an eigenfunction of the normalized Laplacian for ``lam2`` in
    the ``f = D^{-1/2} g`` convention (any scaling). Its positive and
    negative parts are disjointly supported and each has Rayleigh quotient at
    most ``lam2``. The part with smaller support volume is kept (ties: the
    part containing the lowest-indexed support vertex), made non-negative and
    normalized to unit w-norm.

    Raises
    ------
    DomainError
        If ``f2`` fails the eigen-residual check, or has a single sign with
        support volume above vol(V)/2.
    """
    G = f2.graph
    if np.any(G.degree == 0):
        raise DomainError("graph has an isolated vertex")
    res = eigen_residual(f2, lam2, LAPLACIAN)
    if res > tol:
        raise DomainError(f"not an eigenfunction for {lam2!r}: relative residual {res:.3e}")
    g = np.sqrt(G.degree) * f2.values
    x = np.where(np.abs(g) > _SNAP * np.abs(g).max(), f2.values, 0.0)
    pos, neg = x > 0, x < 0
    vpos = float(G.degree[pos].sum())
    vneg = float(G.degree[neg].sum())
    if not pos.any():
        take_pos = False
    elif not neg.any():
        take_pos = True
    elif vpos != vneg:
        take_pos = vpos < vneg
    else:
        take_pos = int(np.argmax(pos)) < int(np.argmax(neg))
    part = np.where(pos, x, 0.0) if take_pos else np.where(neg, -x, 0.0)
    if float(G.degree[part > 0].sum()) > G.total_volume / 2:
        raise DomainError("eigenfunction has a single sign; no half-volume part exists")
    return VertexFunction(G, part).normalized()


def disjoint_supports(fs: Sequence[VertexFunction]) -> bool:
    """True when no vertex is in the support of two functions."""
    if not fs:
        return True
    count = np.sum([f.values != 0 for f in fs], axis=0)
    return bool(np.all(count <= 1))


def lambda_bound_from_disjoint(fs: Sequence[VertexFunction], which: str = LAPLACIAN) -> float:
    """2 max_i R(f_i) for disjointly supported nonzero f_1..f_j.

    For the Laplacian this upper-bounds lambda_j; for the signless operator
    (signless Rayleigh quotients) it upper-bounds alpha_j.
    """
    if len(fs) == 0:
        raise DomainError("need at least one function")
    if which not in (LAPLACIAN, SIGNLESS):
        raise DomainError(f"which must be {LAPLACIAN!r} or {SIGNLESS!r}")
    G = fs[0].graph
    if any(f.graph is not G for f in fs):
        raise DomainError("functions live on different graphs")
    if not disjoint_supports(fs):
        raise DomainError("functions are not disjointly supported")
    rq = rayleigh if which == LAPLACIAN else signless_rayleigh
    return 2.0 * max(rq(f) for f in fs)
