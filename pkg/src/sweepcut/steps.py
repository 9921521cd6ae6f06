"""Step approximations of a vertex function and the bounds built on them.

A (2k+1)-step approximation of a non-negative f rounds every value to the
nearest of thresholds ``0 = t_0 <= ... <= t_2k``. The thresholds are chosen
greedily so that every band ``[t_{i-1}, t_i]`` carries the same rounding
mass C. The symmetric variant does the same for ``|f|`` and rounds signed
values to the nearest of ``+-t_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certificates import Certificate
from .errors import DomainError
from .spectral import VertexFunction, rayleigh, signless_rayleigh
from .sweep import Interval, restricted_energy, sweep_bipartiteness, sweep_conductance, vol_at_least

_NORM_TOL = 1e-9
_BISECT = 1e-13
_MASS_RTOL = 1e-10


def psi_nearest(x: float, thresholds) -> float:
    """The threshold closest to x; on a tie, the smaller threshold."""
    return float(quantize(np.array([x], dtype=np.float64), thresholds)[0])


def quantize(values, thresholds) -> np.ndarray:
    """Vectorized :func:`psi_nearest`."""
    t = np.sort(np.asarray(thresholds, dtype=np.float64))
    if t.size == 0:
        raise DomainError("need at least one threshold")
    x = np.asarray(values, dtype=np.float64)
    idx = np.searchsorted(t, x, "left")
    above = t[np.minimum(idx, t.size - 1)]
    below = t[np.maximum(idx - 1, 0)]
    take_above = (idx == 0) | ((idx < t.size) & (above - x < x - below))
    return np.where(take_above, above, below)


def band_mass(x: np.ndarray, w: np.ndarray, a: float, t: float) -> float:
    """sum over a <= x <= t of w * (distance from x to the nearer of a and t)^2."""
    sel = (x >= a) & (x <= t)
    d = np.minimum(x[sel] - a, t - x[sel])
    return float(np.sum(w[sel] * d * d))


def _next_threshold(x: np.ndarray, w: np.ndarray, a: float, M: float, C: float) -> float:
    """Smallest t in [a, M] with band_mass(a, t) = C, or M if none exists.

    Each value x > a contributes w (t - x)^2 for x <= t <= 2x - a and
    w (x - a)^2 beyond, so the mass is a continuous nondecreasing piecewise
    quadratic. The segment holding the root is found by bisection over the
    breakpoints and the quadratic is solved in closed form.
    """
    sel = x > a
    x, w = x[sel], w[sel]
    if band_mass(x, w, a, M) < C:
        return M
    mirror = 2.0 * x - a
    bps = np.unique(np.concatenate(([a, M], x, mirror[mirror < M])))
    lo, hi = 0, bps.size - 1  # mass(bps[lo]) < C <= mass(bps[hi])
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if band_mass(x, w, a, bps[mid]) >= C:
            hi = mid
        else:
            lo = mid
    p, q = float(bps[lo]), float(bps[hi])
    active = (x <= p) & (mirror >= q)
    A = float(np.sum(w[active]))
    D = float(np.sum(w[active] * (p - x[active])))
    r = C - band_mass(x, w, a, p)
    if A > 0:
        t = p + r / (D + math.sqrt(D * D + A * r))
        if p <= t <= q and abs(band_mass(x, w, a, t) - C) <= _MASS_RTOL * C:
            return t
    lo_t, hi_t = p, q
    while hi_t - lo_t > _BISECT * M:
        mid = 0.5 * (lo_t + hi_t)
        if band_mass(x, w, a, mid) >= C:
            hi_t = mid
        else:
            lo_t = mid
    return hi_t


def _greedy_thresholds(x: np.ndarray, w: np.ndarray, k: int, C: float) -> list[float]:
    M = float(x.max())
    if C == 0:
        # Every band would close immediately; round to the distinct values
        # instead when they fit, which makes the residual zero.
        vals = np.unique(np.concatenate(([0.0], x)))
        if vals.size <= 2 * k + 1:
            return vals.tolist() + [M] * (2 * k + 1 - vals.size)
        return [0.0] + [M] * (2 * k)
    ts = [0.0]
    for _ in range(2 * k):
        ts.append(_next_threshold(x, w, ts[-1], M, C))
    return ts


@dataclass(frozen=True)
class StepApproximation:
    """Thresholds ``t_0..t_2k``, the rounded function g, and band bookkeeping.

    ``band_mass[i]`` is the rounding mass of band ``i + 1``; ``succeeded``
    means the last threshold reached ``max |f|``. For the symmetric variant
    the thresholds are non-negative and their negatives are implied.
    ``C``, ``lambda_k`` and ``beta_f`` are set only by the greedy
    constructions.
    """

    f: VertexFunction
    k: int
    thresholds: np.ndarray
    g: VertexFunction
    residual: float
    band_mass: np.ndarray
    succeeded: bool
    C: float | None = None
    symmetric: bool = False
    lambda_k: float | None = None
    beta_f: float | None = None

    @classmethod
    def from_thresholds(cls, f: VertexFunction, thresholds, *, symmetric: bool = False,
                        k: int | None = None) -> "StepApproximation":
        """Round f onto given thresholds ``0 = t_0 <= t_1 <= ...``."""
        t = np.array(thresholds, dtype=np.float64)
        if t.ndim != 1 or t.size < 2:
            raise DomainError("need at least two thresholds")
        if t[0] != 0 or np.any(np.diff(t) < 0):
            raise DomainError("thresholds must start at 0 and be nondecreasing")
        if k is None:
            k = t.size // 2
        x = np.abs(f.values) if symmetric else f.values
        if not symmetric and np.any(x < 0):
            raise DomainError("one-sided step approximation needs f >= 0")
        gx = quantize(x, t)
        if symmetric:
            gx = np.sign(f.values) * gx
        w = f.graph.degree
        masses = np.array([band_mass(x, w, t[i - 1], t[i]) for i in range(1, t.size)])
        t.setflags(write=False)
        masses.setflags(write=False)
        g = VertexFunction(f.graph, gx)
        res = float(np.sqrt(np.sum(w * (f.values - gx) ** 2)))
        return cls(f, int(k), t, g, res, masses, bool(t[-1] >= x.max()), symmetric=symmetric)


def _check_unit(f: VertexFunction) -> None:
    if abs(f.norm_w() - 1.0) > _NORM_TOL:
        raise DomainError(f"function must have unit w-norm, got {f.norm_w():.12g}")


def build_step_approximation(f: VertexFunction, k: int, lambda_k: float) -> StepApproximation:
    """Greedy (2k+1)-step approximation with band mass C = 2R(f)/(k lambda_k).

    Each threshold is the smallest value above the previous one at which the
    band reaches mass C, or ``max f`` if it never does. On success the
    squared residual is at most 2kC = 4R(f)/lambda_k. On failure every band
    has mass C and the band functions have Rayleigh quotients summing to at
    most k lambda_k / 2. When R(f) = 0 the thresholds are the distinct
    values of f (padded with ``max f``), which gives a zero residual.

    Raises
    ------
    DomainError
        If f is negative somewhere, not of unit w-norm, k < 1, or
        lambda_k <= 0.
    """
    if np.any(f.values < 0):
        raise DomainError("step approximation needs f >= 0")
    _check_unit(f)
    if k < 1:
        raise DomainError("k must be at least 1")
    if not lambda_k > 0:
        raise DomainError("lambda_k must be positive")
    C = 2.0 * rayleigh(f) / (k * lambda_k)
    ts = _greedy_thresholds(f.values, f.graph.degree, k, C)
    base = StepApproximation.from_thresholds(f, ts, k=k)
    return StepApproximation(f, k, base.thresholds, base.g, base.residual, base.band_mass,
                             base.succeeded, C=C, lambda_k=float(lambda_k))


def symmetric_step_approximation(f: VertexFunction, k: int, beta_f: float) -> StepApproximation:
    """Greedy symmetric (2k+1)-step approximation for signed f.

    Band i counts values with ``t_{i-1} <= |f| <= t_i``; the target mass is
    C = beta(f)^2 / (256 k^3 R(f)) with R the signless Rayleigh quotient.
    g rounds ``|f|`` to the nearest threshold and restores the sign, so
    ties round toward zero. When beta(f) = 0 (or R(f) = 0) there is nothing
    to balance and the construction succeeds immediately.

    Raises
    ------
    DomainError
        If f is not of unit w-norm, k < 1, or beta_f is negative.
    """
    _check_unit(f)
    if k < 1:
        raise DomainError("k must be at least 1")
    if beta_f < 0 or not math.isfinite(beta_f):
        raise DomainError("beta_f must be a finite non-negative number")
    R = signless_rayleigh(f)
    C = 0.0 if (beta_f == 0 or R == 0) else beta_f ** 2 / (256.0 * k ** 3 * R)
    x = np.abs(f.values)
    if C == 0:
        ts = [0.0] + [float(x.max())] * (2 * k)
    else:
        ts = _greedy_thresholds(x, f.graph.degree, k, C)
    base = StepApproximation.from_thresholds(f, ts, symmetric=True, k=k)
    return StepApproximation(f, k, base.thresholds, base.g, base.residual, base.band_mass,
                             base.succeeded, C=C, symmetric=True, beta_f=float(beta_f))


def _check_source(f: VertexFunction, approx: StepApproximation) -> None:
    if approx.f.graph is not f.graph or not np.array_equal(approx.f.values, f.values):
        raise DomainError("step approximation was built from a different function")


def band_functions(f: VertexFunction, approx: StepApproximation) -> list[VertexFunction]:
    """The band functions f_1..f_l, one per band ``(t_{i-1}, t_i]``.

    f_i(v) is the distance from f(v) to the nearer end of band i when f(v)
    lies in the band and 0 otherwise; in the symmetric variant the band is
    taken on ``|f|`` and f_i carries the sign of f. The functions are
    pairwise disjointly supported.
    """
    _check_source(f, approx)
    t = approx.thresholds
    x = np.abs(f.values) if approx.symmetric else f.values
    band = np.searchsorted(t, x, "left")  # t[band-1] < x <= t[band]
    out = []
    for i in range(1, t.size):
        sel = band == i
        d = np.zeros(f.graph.n)
        d[sel] = np.minimum(x[sel] - t[i - 1], t[i] - x[sel])
        if approx.symmetric:
            d *= np.sign(f.values)
        out.append(VertexFunction(f.graph, d))
    return out


def _integral_mu(x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Integral from 0 to x >= 0 of the distance to the nearest threshold."""
    gaps = np.diff(t)
    full = np.concatenate(([0.0], np.cumsum(gaps * gaps / 4.0)))
    band = np.searchsorted(t, x, "left")
    out = np.zeros_like(x)
    inside = (band >= 1) & (band < t.size)
    i = band[inside]
    s = x[inside] - t[i - 1]
    d = gaps[i - 1]
    part = np.where(s <= d / 2, s * s / 2, d * d / 4 - (d - s) ** 2 / 2)
    out[inside] = full[i - 1] + part
    beyond = band >= t.size
    out[beyond] = full[-1] + (x[beyond] - t[-1]) ** 2 / 2
    return out


def smoothed_function(f: VertexFunction, approx: StepApproximation) -> VertexFunction:
    """h(v) = integral from 0 to f(v) of |x - psi(x)| dx, in closed form.

    In the symmetric variant h(v) = sign(f(v)) times the integral up to
    ``|f(v)|``. h orders the vertices exactly as f does.
    """
    _check_source(f, approx)
    if approx.symmetric:
        x = np.abs(f.values)
        return VertexFunction(f.graph, np.sign(f.values) * _integral_mu(x, approx.thresholds))
    if np.any(f.values < 0):
        raise DomainError("smoothed function needs f >= 0")
    return VertexFunction(f.graph, _integral_mu(f.values, approx.thresholds))


def _check_small_support(f: VertexFunction) -> None:
    if np.any(f.values < 0):
        raise DomainError("function must be non-negative")
    if f.support_volume() > f.graph.total_volume / 2:
        raise DomainError("support volume exceeds vol(V)/2")


def jump_bound_certificate(f: VertexFunction, approx: StepApproximation) -> Certificate:
    """phi(f) <= 4kR(f) + 4 sqrt(2) k ||f - g||_w sqrt(R(f)) for any step approximation g."""
    _check_unit(f)
    _check_small_support(f)
    _check_source(f, approx)
    k, R, res = approx.k, rayleigh(f), approx.residual
    phi = sweep_conductance(f).value
    rhs = 4 * k * R + 4 * math.sqrt(2) * k * res * math.sqrt(R)
    return Certificate(
        "jump_bound", phi, rhs,
        constants={"k": k, "rayleigh": R, "residual": res},
        witnesses={"f": f, "g": approx.g, "thresholds": approx.thresholds},
    )


def step_residual_certificate(f: VertexFunction, approx: StepApproximation) -> Certificate:
    """Outcome of the greedy one-sided construction.

    On success ``||f - g||_w^2 <= 4R(f)/lambda_k``; on failure the 2k band
    functions satisfy ``sum R(f_i) <= k lambda_k / 2``.
    """
    if approx.symmetric or approx.lambda_k is None:
        raise DomainError("needs a greedy one-sided step approximation")
    _check_source(f, approx)
    k, lam, R = approx.k, approx.lambda_k, rayleigh(f)
    consts = {"k": k, "lambda_k": lam, "rayleigh": R, "C": approx.C, "succeeded": approx.succeeded}
    if approx.succeeded:
        return Certificate("step_residual", approx.residual ** 2, 4 * R / lam, constants=consts,
                           witnesses={"g": approx.g, "thresholds": approx.thresholds})
    bands = band_functions(f, approx)
    total = sum(rayleigh(b) for b in bands)
    return Certificate("step_band_sum", total, k * lam / 2, constants=consts,
                       witnesses={f"f{i + 1}": b for i, b in enumerate(bands)})


def ellone_bound_certificate(f: VertexFunction, approx: StepApproximation) -> Certificate:
    """beta(f) <= 4kR(f) + 4 sqrt(2) k ||f - g||_w sqrt(R(f)), signless R, symmetric g."""
    _check_unit(f)
    _check_source(f, approx)
    if not approx.symmetric:
        raise DomainError("needs a symmetric step approximation")
    k, R, res = approx.k, signless_rayleigh(f), approx.residual
    beta = sweep_bipartiteness(f).value
    rhs = 4 * k * R + 4 * math.sqrt(2) * k * res * math.sqrt(R)
    return Certificate(
        "ellone_bound", beta, rhs,
        constants={"k": k, "signless_rayleigh": R, "residual": res},
        witnesses={"f": f, "g": approx.g, "thresholds": approx.thresholds},
    )


def smallest_band_functions(bands: list[VertexFunction], k: int, signless: bool) -> list[VertexFunction]:
    """The k nonzero band functions with the smallest Rayleigh quotients (stable order)."""
    rq = signless_rayleigh if signless else rayleigh
    nonzero = [b for b in bands if np.any(b.values != 0)]
    keyed = sorted(range(len(nonzero)), key=lambda i: (rq(nonzero[i]), i))
    return [nonzero[i] for i in keyed[:k]]


def ksteps_certificates(f: VertexFunction, approx: StepApproximation) -> list[Certificate]:
    """Outcome of the greedy symmetric construction.

    On success ``beta(f) <= 8kR(f)``. On failure the band functions satisfy
    ``sum R(f_i) <= 256 k^3 R^2 / beta^2`` and the k best of them each have
    ``R(f_i) <= 256 k^2 R^2 / beta^2`` (signless R throughout).
    """
    if not approx.symmetric or approx.beta_f is None:
        raise DomainError("needs a greedy symmetric step approximation")
    _check_source(f, approx)
    k, beta, R = approx.k, approx.beta_f, signless_rayleigh(f)
    consts = {"k": k, "beta_f": beta, "signless_rayleigh": R, "C": approx.C,
              "succeeded": approx.succeeded}
    if approx.succeeded:
        return [Certificate("ksteps_case_i", beta, 8 * k * R, constants=consts,
                            witnesses={"g": approx.g})]
    bands = band_functions(f, approx)
    total = sum(signless_rayleigh(b) for b in bands)
    best = smallest_band_functions(bands, k, signless=True)
    worst = max(signless_rayleigh(b) for b in best)
    wit = {f"f{i + 1}": b for i, b in enumerate(best)}
    return [
        Certificate("ksteps_band_sum", total, 256 * k ** 3 * R * R / beta ** 2, constants=consts),
        Certificate("ksteps_case_ii", worst, 256 * k ** 2 * R * R / beta ** 2, constants=consts,
                    witnesses=wit),
    ]


def step_energy_diagnostics(f: VertexFunction, approx: StepApproximation) -> tuple[Certificate, Certificate]:
    """Norm of g and the energy lower bound from middle quarter-intervals.

    The first certificate checks ``(1 - 4 sqrt(E_f/lambda_k))^2 <= ||g||_w^2``,
    applicable when the greedy construction succeeded and
    ``4 sqrt(E_f/lambda_k) <= 1``. The second checks
    ``min(phi ||g||^2/(64k), phi^2 ||g||^4/(2048 k^2 ||f-g||^2)) <= E_f``;
    with a zero residual only the first term is used. The variant with
    ``32k`` in place of ``64k`` is reported in its constants for reference.
    """
    _check_unit(f)
    _check_small_support(f)
    _check_source(f, approx)
    if approx.symmetric or approx.lambda_k is None:
        raise DomainError("needs a greedy one-sided step approximation")
    k, lam = approx.k, approx.lambda_k
    E = rayleigh(f)
    g2 = approx.g.norm_w() ** 2
    drop = 4.0 * math.sqrt(E / lam)
    step = Certificate(
        "step_norm", (1.0 - drop) ** 2, g2,
        constants={"k": k, "lambda_k": lam, "energy": E},
        applicable=approx.succeeded and drop <= 1.0,
    )
    phi = sweep_conductance(f).value
    res2 = approx.residual ** 2
    first = phi * g2 / (64 * k)
    first32 = phi * g2 / (32 * k)
    if res2 > 0:
        second = phi * phi * g2 * g2 / (2048 * k * k * res2)
        lhs, lhs32 = min(first, second), min(first32, second)
    else:
        lhs, lhs32 = first, first32
    jump = Certificate(
        "jump_energy", lhs, E,
        constants={"k": k, "phi": phi, "g_norm_sq": g2, "residual_sq": res2,
                   "lhs_32k": lhs32, "holds_32k": lhs32 <= E + 1e-9},
        witnesses={"g": approx.g},
    )
    return step, jump


def quarter_intervals(approx: StepApproximation) -> list[Interval]:
    """Middle quarter ``((3t_{i-1}+t_i)/4, (t_{i-1}+t_i)/2]`` of each band."""
    t = approx.thresholds
    return [Interval((3 * t[i - 1] + t[i]) / 4, (t[i - 1] + t[i]) / 2) for i in range(1, t.size)]


def quarter_energy(f: VertexFunction, approx: StepApproximation) -> float:
    """Total restricted energy of f over the middle quarters of the bands."""
    return sum(restricted_energy(f, I) for I in quarter_intervals(approx))

