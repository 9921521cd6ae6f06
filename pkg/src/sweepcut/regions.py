"""Dyadic decomposition of a function's range and dense well-separated regions.

The positive values of f are split into dyadic levels ``I_i = (2^-(i+1), 2^-i]``
and each level into 12k subintervals of equal length, numbered from the
top. A subinterval is heavy when its mass ``sum w(v) f(v)^2`` is at least
``c delta l_{i-1} / k``, where ``l_{i-1}`` is the mass of the level above and
``delta = phi(f)^2 / R(f)``. A level with at least 6k heavy subintervals is
balanced. Picking every third heavy subinterval of each balanced level gives
2k regions whose relative neighborhoods are disjoint; tent functions around
the regions are disjointly supported and have small Rayleigh quotients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .certificates import Certificate
from .errors import DomainError
from .spectral import VertexFunction, rayleigh
from .sweep import Interval, restricted_energy, sweep_conductance

ALPHA = 0.5
C_HEAVY = ALPHA ** 6 * (1 - ALPHA) ** 2 / 96  # 1/24576
CASE_I_FACTOR = 1e4
CASE_II_FACTOR = 1e8
DYADIC_CHEEGER_ALPHA = (math.sqrt(17) - 1) / 4
DYADIC_CHEEGER_CONSTANT = 4.68

_NORM_TOL = 1e-9


def level_of(x: float) -> int:
    """The i with 2^-(i+1) < x <= 2^-i, for x > 0."""
    if not x > 0:
        raise DomainError("level defined only for positive values")
    i = math.floor(-math.log2(x))
    while x > math.ldexp(1.0, -i):
        i -= 1
    while x <= math.ldexp(1.0, -i - 1):
        i += 1
    return i


def level_endpoints(i: int, k: int) -> np.ndarray:
    """Descending endpoints e_0 = 2^-i > e_1 > ... > e_12k = 2^-(i+1).

    Subinterval j is ``(e_{j+1}, e_j]``, of length 2^-i (1 - alpha) / (12k).
    """
    top = math.ldexp(1.0, -i)
    step = top * (1 - ALPHA) / (12 * k)
    e = top - step * np.arange(12 * k + 1)
    e[-1] = math.ldexp(1.0, -i - 1)
    return e


@dataclass(frozen=True)
class DyadicDecomposition:
    """Masses and heavy/balanced flags of every level.

    Row ``r`` of the arrays describes level ``levels[r]``; levels run from
    the one holding ``max f`` down to one level below the one holding the
    smallest positive value, so ``sum(prev_mass) == sum(level_mass)``.
    ``sub_mass[r, j]`` is the mass of subinterval j (j = 0 at the top).
    """

    k: int
    phi: float
    rayleigh: float
    delta: float
    levels: np.ndarray
    level_mass: np.ndarray
    prev_mass: np.ndarray
    sub_mass: np.ndarray
    heavy: np.ndarray
    balanced: np.ndarray
    alpha: float = ALPHA
    c: float = C_HEAVY

    @property
    def epsilon(self) -> float:
        """Separation radius (1 - alpha) / (12k)."""
        return (1 - self.alpha) / (12 * self.k)

    @property
    def Delta(self) -> float:
        """Sum of the masses of the levels directly above balanced levels."""
        return float(np.sum(self.prev_mass[self.balanced]))

    def sub_length(self, row: int) -> float:
        return math.ldexp(1.0, -int(self.levels[row])) * (1 - self.alpha) / (12 * self.k)

    def subinterval(self, row: int, j: int) -> Interval:
        e = level_endpoints(int(self.levels[row]), self.k)
        return Interval(e[j + 1], e[j])

    def level_interval(self, row: int) -> Interval:
        i = int(self.levels[row])
        return Interval(math.ldexp(1.0, -i - 1), math.ldexp(1.0, -i))

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "c": self.c,
            "k": self.k,
            "phi": self.phi,
            "rayleigh": self.rayleigh,
            "delta": self.delta,
            "Delta": self.Delta,
            "levels": [
                {
                    "i": int(self.levels[r]),
                    "mass": float(self.level_mass[r]),
                    "prev_mass": float(self.prev_mass[r]),
                    "heavy": int(self.heavy[r].sum()),
                    "balanced": bool(self.balanced[r]),
                    "sub_mass": self.sub_mass[r].tolist(),
                }
                for r in range(self.levels.size)
            ],
        }


def _check_unit_nonneg(f: VertexFunction) -> None:
    if np.any(f.values < 0):
        raise DomainError("function must be non-negative")
    if not np.any(f.values > 0):
        raise DomainError("function must have a positive value")
    if abs(f.norm_w() - 1.0) > _NORM_TOL:
        raise DomainError(f"function must have unit w-norm, got {f.norm_w():.12g}")


def _check_small_support(f: VertexFunction) -> None:
    if f.support_volume() > f.graph.total_volume / 2:
        raise DomainError("support volume exceeds vol(V)/2")


def _delta(phi: float, R: float) -> float:
    if R > 0:
        return phi * phi / R
    return 0.0 if phi == 0 else math.inf


def locate(values: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Level and subinterval index of each positive value."""
    lv = np.array([level_of(float(x)) for x in values], dtype=np.int64)
    sub = np.empty(values.size, dtype=np.int64)
    for i in np.unique(lv):
        sel = lv == i
        asc = level_endpoints(int(i), k)[::-1]
        pos = np.searchsorted(asc, values[sel], "left")  # asc[pos-1] < x <= asc[pos]
        sub[sel] = 12 * k - pos
    return lv, sub


def dyadic_decompose(f: VertexFunction, k: int, *, phi: float | None = None) -> DyadicDecomposition:
    """Dyadic levels, subinterval masses, and heavy/balanced flags of f.

    ``phi`` defaults to the sweep conductance of f.

    Raises
    ------
    DomainError
        If f is negative somewhere, zero, not of unit w-norm, or k < 1.
    """
    _check_unit_nonneg(f)
    if k < 1:
        raise DomainError("k must be at least 1")
    if phi is None:
        phi = sweep_conductance(f).value
    R = rayleigh(f)
    delta = _delta(phi, R)
    w = f.graph.degree
    pos = f.values > 0
    x, wx = f.values[pos], w[pos]
    lv, sub = locate(x, k)
    top, bottom = int(lv.min()), int(lv.max())
    levels = np.arange(top, bottom + 2, dtype=np.int64)
    L = levels.size
    sub_mass = np.zeros((L, 12 * k))
    np.add.at(sub_mass, (lv - top, sub), wx * x * x)
    level_mass = np.bincount(lv - top, weights=wx * x * x, minlength=L)
    prev_mass = np.concatenate(([0.0], level_mass[:-1]))
    with np.errstate(invalid="ignore"):
        need = np.where(prev_mass > 0, C_HEAVY * delta * prev_mass / k, 0.0)
    heavy = sub_mass >= need[:, None]
    balanced = heavy.sum(axis=1) >= 6 * k
    for a in (levels, level_mass, prev_mass, sub_mass, heavy, balanced):
        a.setflags(write=False)
    return DyadicDecomposition(k, float(phi), R, delta, levels, level_mass, prev_mass,
                               sub_mass, heavy, balanced)


@dataclass(frozen=True)
class Region:
    """A union of closed pieces ``[lo, hi]`` of the positive reals."""

    pieces: tuple[tuple[float, float], ...]
    mass: float
    epsilon: float
    origin: tuple[tuple[int, int], ...] = field(default=(), repr=False)

    def distance(self, x) -> np.ndarray:
        """Relative distance inf_y |x - y| / y to the region (inf if empty)."""
        x = np.asarray(x, dtype=np.float64)
        out = np.full(x.shape, np.inf)
        for lo, hi in self.pieces:
            d = np.where(x < lo, (lo - x) / lo, np.where(x > hi, (x - hi) / hi, 0.0))
            out = np.minimum(out, d)
        return out


def build_regions(dd: DyadicDecomposition) -> list[Region]:
    """2k regions from the heavy subintervals of balanced levels.

    Region a (1-based) receives the (3a-1)-th heavy subinterval, counted
    from the top, of every balanced level whose upper neighbor has positive
    mass. Levels whose upper neighbor is empty contribute nothing to the
    density bound and are skipped.
    """
    k = dd.k
    pieces: list[list] = [[] for _ in range(2 * k)]
    masses = [0.0] * (2 * k)
    origin: list[list] = [[] for _ in range(2 * k)]
    for r in range(dd.levels.size):
        if not dd.balanced[r] or dd.prev_mass[r] <= 0:
            continue
        e = level_endpoints(int(dd.levels[r]), k)
        hv = np.flatnonzero(dd.heavy[r])
        for a in range(2 * k):
            j = int(hv[3 * a + 1])
            pieces[a].append((float(e[j + 1]), float(e[j])))
            masses[a] += float(dd.sub_mass[r, j])
            origin[a].append((int(dd.levels[r]), j))
    return [Region(tuple(sorted(p)), m, dd.epsilon, tuple(o)) for p, m, o in zip(pieces, masses, origin)]


def well_separated(regions: list[Region], eps: float, *, rtol: float = 1e-12) -> bool:
    """True when the eps-neighborhoods of different regions are disjoint.

    Pieces ``[p1, q1]`` below ``[p2, q2]`` have disjoint neighborhoods iff
    ``q1 (1 + eps) <= p2 (1 - eps)``.
    """
    tagged = sorted((lo, hi, a) for a, R in enumerate(regions) for lo, hi in R.pieces)
    for x in range(len(tagged)):
        for y in range(x + 1, len(tagged)):
            lo1, hi1, a = tagged[x]
            lo2, hi2, b = tagged[y]
            if a == b:
                continue
            if hi1 * (1 + eps) > lo2 * (1 - eps) * (1 + rtol):
                return False
    return True


def tent_function(f: VertexFunction, region: Region) -> VertexFunction:
    """f(v) max(0, 1 - dist(f(v), R) / eps)."""
    d = region.distance(f.values)
    return VertexFunction(f.graph, f.values * np.clip(1.0 - d / region.epsilon, 0.0, None))


def region_functions(f: VertexFunction, regions: list[Region], *, select: bool = True) -> list[VertexFunction]:
    """Tent functions of the regions.

    With ``select`` (the default), returns the half of them with the least
    edge energy, ordered by energy (ties by region index); otherwise all of
    them in region order.

    Raises
    ------
    DomainError
        If some region has zero mass.
    """
    if any(R.mass <= 0 for R in regions):
        raise DomainError("every region needs positive mass")
    fs = [tent_function(f, R) for R in regions]
    if not select:
        return fs
    G = f.graph
    energy = [float(np.sum(G.w * (h.values[G.u] - h.values[G.v]) ** 2)) for h in fs]
    order = sorted(range(len(fs)), key=lambda i: (energy[i], i))
    return [fs[i] for i in order[: len(fs) // 2]]


@dataclass(frozen=True)
class Dichotomy:
    """Which alternative holds for f, with its certificates.

    In case 2, ``functions`` are k disjointly supported functions, each
    equal to f on a single heavy subinterval ``supports[i]`` and zero
    elsewhere; ``lengths[i]`` is that subinterval's length.
    """

    case: int
    certificates: tuple[Certificate, ...]
    functions: tuple[VertexFunction, ...] = ()
    supports: tuple[Interval, ...] = ()
    lengths: tuple[float, ...] = ()
    decomposition: DyadicDecomposition | None = None
    regions: tuple[Region, ...] = ()

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.certificates)


def _restrict_best(f: VertexFunction, region: Region) -> tuple[VertexFunction, Interval]:
    best = None
    for lo, hi in region.pieces:
        I = Interval(lo, hi)
        h = VertexFunction(f.graph, np.where(I.contains(f.values), f.values, 0.0))
        if not np.any(h.values):
            continue
        key = rayleigh(h)
        if best is None or key < best[0]:
            best = (key, h, I)
    if best is None:
        raise DomainError("region has no vertex inside any piece")
    return best[1], best[2]


def main_func_dichotomy(f: VertexFunction, k: int) -> Dichotomy:
    """Either phi(f) <= 1e4 k R(f), or k disjoint functions with small R.

    In the second case the dyadic construction is run, the certificates
    check ``Delta >= 1/2``, the tent-function bound
    ``R(f_i) <= 2R(f) / (k eps^2 W)`` and, after restricting each function
    to its best single heavy subinterval,
    ``R(f_i) <= 1e8 k^2 R(f)^2 / phi(f)^2``.

    Raises
    ------
    DomainError
        If f is negative, zero, not of unit w-norm, has support volume above
        vol(V)/2, or k < 1.
    """
    _check_unit_nonneg(f)
    _check_small_support(f)
    if k < 1:
        raise DomainError("k must be at least 1")
    phi = sweep_conductance(f).value
    R = rayleigh(f)
    if phi <= CASE_I_FACTOR * k * R:
        cert = Certificate("mainfunc_case_i", phi, CASE_I_FACTOR * k * R,
                           constants={"k": k, "phi": phi, "rayleigh": R})
        return Dichotomy(1, (cert,))
    dd = dyadic_decompose(f, k, phi=phi)
    regions = build_regions(dd)
    Delta = dd.Delta
    certs = [Certificate("mainfunc_delta", 0.5, Delta, constants={"k": k, "delta": dd.delta})]
    if Delta <= 0 or any(Rg.mass <= 0 for Rg in regions):
        return Dichotomy(2, tuple(certs), decomposition=dd, regions=tuple(regions))
    eps = dd.epsilon
    W = min(Rg.mass for Rg in regions)
    tents = region_functions(f, regions, select=False)
    G = f.graph
    energy = [float(np.sum(G.w * (h.values[G.u] - h.values[G.v]) ** 2)) for h in tents]
    order = sorted(range(len(tents)), key=lambda i: (energy[i], i))[:k]
    chosen = [tents[i] for i in order]
    certs.append(Certificate(
        "densewellsep", max(rayleigh(h) for h in chosen), 2 * R / (k * eps * eps * W),
        constants={"k": k, "epsilon": eps, "W": W, "separated": well_separated(regions, eps)},
        witnesses={f"f{j + 1}": h for j, h in enumerate(chosen)},
    ))
    restricted, supports = [], []
    for i in order:
        h, I = _restrict_best(f, regions[i])
        restricted.append(h)
        supports.append(I)
    bound = CASE_II_FACTOR * k * k * R * R / (phi * phi)
    certs.append(Certificate(
        "mainfunc_case_ii", max(rayleigh(h) for h in restricted), bound,
        constants={"k": k, "phi": phi, "rayleigh": R},
        witnesses={f"f{j + 1}": h for j, h in enumerate(restricted)},
    ))
    return Dichotomy(2, tuple(certs), tuple(restricted), tuple(supports),
                     tuple(I.length for I in supports), dd, tuple(regions))


def light_subinterval_certificates(f: VertexFunction, dd: DyadicDecomposition) -> list[Certificate]:
    """Energy lower bound for every light subinterval with a nonempty level above.

    E_f(I_ij) >= alpha^6 phi^2 l_{i-1} (1-alpha)^2 / (144k (k alpha^4 phi + c delta)).
    """
    _check_small_support(f)
    k, a, phi = dd.k, dd.alpha, dd.phi
    den = 144 * k * (k * a ** 4 * phi + dd.c * dd.delta)
    out = []
    for r in range(dd.levels.size):
        if dd.prev_mass[r] <= 0:
            continue
        coef = a ** 6 * phi ** 2 * dd.prev_mass[r] * (1 - a) ** 2
        for j in np.flatnonzero(~dd.heavy[r]):
            bound = coef / den if den > 0 else 0.0
            E = restricted_energy(f, dd.subinterval(r, int(j)))
            out.append(Certificate("light_subinterval", bound, E,
                                   constants={"level": int(dd.levels[r]), "j": int(j)}))
    return out


def unbalanced_interval_certificates(f: VertexFunction, dd: DyadicDecomposition) -> list[Certificate]:
    """E_f(I_i) >= alpha^6 phi^2 l_{i-1} (1-alpha)^2 / (24 (k alpha^4 phi + c delta)) for unbalanced I_i."""
    _check_small_support(f)
    k, a, phi = dd.k, dd.alpha, dd.phi
    den = 24 * (k * a ** 4 * phi + dd.c * dd.delta)
    out = []
    for r in np.flatnonzero(~dd.balanced):
        coef = a ** 6 * phi ** 2 * dd.prev_mass[r] * (1 - a) ** 2
        bound = coef / den if den > 0 else 0.0
        E = restricted_energy(f, dd.level_interval(int(r)))
        out.append(Certificate("unbalanced_interval", bound, E,
                               constants={"level": int(dd.levels[r])}))
    return out


def dyadic_cheeger_certificates(f: VertexFunction) -> tuple[Certificate, Certificate]:
    """phi(f) <= 4.68 sqrt(R(f)), and the energy chain behind it.

    The second certificate checks
    ``phi(f)^2 alpha^4 (1 - alpha) / (1 + alpha) <= R(f)`` at
    ``alpha = (sqrt(17) - 1) / 4``, from which the first follows.
    """
    _check_unit_nonneg(f)
    _check_small_support(f)
    phi = sweep_conductance(f).value
    R = rayleigh(f)
    a = DYADIC_CHEEGER_ALPHA
    chain = Certificate("dyadic_cheeger_energy", phi * phi * a ** 4 * (1 - a) / (1 + a), R,
                        constants={"alpha": a})
    main = Certificate("dyadic_cheeger", phi, DYADIC_CHEEGER_CONSTANT * math.sqrt(R),
                       constants={"rayleigh": R}, witnesses={"f": f})
    return main, chain
