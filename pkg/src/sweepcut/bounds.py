"""End-to-end certificates for Cheeger-type inequalities on a graph.

Each function runs the spectral pipeline from scratch (or from a supplied
spectrum of the same graph) and returns certificates comparing the sweep
value against the bound.
"""

from __future__ import annotations

import math

from .certificates import Certificate
from .errors import DomainError
from .graph import WeightedGraph
from .spectral import LAPLACIAN, SIGNLESS, Spectrum, VertexFunction, dense_spectrum, nonneg_split, rayleigh, signless_rayleigh
from .steps import build_step_approximation, jump_bound_certificate
from .sweep import sweep_bipartiteness, sweep_conductance


def _spectrum(G: WeightedGraph, which: str, spectrum: Spectrum | None) -> Spectrum:
    if spectrum is None:
        return dense_spectrum(G, which)
    if spectrum.graph is not G or spectrum.which != which:
        raise DomainError(f"need the {which} spectrum of this graph")
    return spectrum


def split_eigenfunction(G: WeightedGraph, spectrum: Spectrum | None = None) -> VertexFunction:
    """The non-negative, small-support function obtained from the lambda_2 eigenfunction."""
    sp = _spectrum(G, LAPLACIAN, spectrum)
    if G.n < 2:
        raise DomainError("need at least two vertices")
    return nonneg_split(sp.eigenfunction(2), sp.eigenvalue(2))


def cheeger_certificates(G: WeightedGraph, spectrum: Spectrum | None = None) -> tuple[Certificate, Certificate]:
    """lambda_2 / 2 <= phi(f) and phi(f) <= sqrt(2 lambda_2) for the split eigenfunction f."""
    sp = _spectrum(G, LAPLACIAN, spectrum)
    f = split_eigenfunction(G, sp)
    lam2 = sp.eigenvalue(2)
    phi = sweep_conductance(f).value
    consts = {"lambda_2": lam2}
    return (Certificate("cheeger_lower", lam2 / 2, phi, constants=consts),
            Certificate("cheeger_upper", phi, math.sqrt(2 * lam2), constants=consts, witnesses={"f": f}))


def improved_cheeger_certificate(G: WeightedGraph, k: int, spectrum: Spectrum | None = None) -> Certificate:
    """phi(f) <= 12 sqrt(2) k R(f) / sqrt(lambda_k) for the split eigenfunction f.

    The step approximation and jump bound behind the inequality are
    evaluated along the way and reported in the constants. When
    lambda_k = 0 the bound is infinite and the certificate is degenerate.

    Raises
    ------
    DomainError
        If k is outside 2..n.
    """
    if not 2 <= k <= G.n:
        raise DomainError(f"k must lie in 2..{G.n}, got {k}")
    sp = _spectrum(G, LAPLACIAN, spectrum)
    f = split_eigenfunction(G, sp)
    lam_k = sp.eigenvalue(k)
    phi = sweep_conductance(f).value
    R = rayleigh(f)
    consts = {"k": k, "lambda_2": sp.eigenvalue(2), "lambda_k": lam_k, "rayleigh": R}
    if lam_k <= 0:
        return Certificate("improved_cheeger", phi, math.inf, constants=consts,
                           witnesses={"f": f}, degenerate=True)
    approx = build_step_approximation(f, k, lam_k)
    jump = jump_bound_certificate(f, approx)
    consts.update({"residual": approx.residual, "step_succeeded": approx.succeeded,
                   "jump_rhs": jump.rhs, "jump_holds": jump.holds})
    rhs = 12 * math.sqrt(2) * k * R / math.sqrt(lam_k)
    return Certificate("improved_cheeger", phi, rhs, constants=consts,
                       witnesses={"f": f, "g": approx.g, "thresholds": approx.thresholds})


def bottom_signless(G: WeightedGraph, spectrum: Spectrum | None = None) -> VertexFunction:
    """Unit eigenfunction of the smallest signless eigenvalue alpha_1."""
    return _spectrum(G, SIGNLESS, spectrum).eigenfunction(1)


def trevisan_certificates(G: WeightedGraph, spectrum: Spectrum | None = None) -> tuple[Certificate, Certificate]:
    """alpha_1 / 2 <= beta(f) <= sqrt(2 alpha_1) for the alpha_1 eigenfunction f."""
    sp = _spectrum(G, SIGNLESS, spectrum)
    f = sp.eigenfunction(1)
    a1 = sp.eigenvalue(1)
    beta = sweep_bipartiteness(f).value
    consts = {"alpha_1": a1}
    return (Certificate("trevisan_lower", a1 / 2, beta, constants=consts),
            Certificate("trevisan_upper", beta, math.sqrt(2 * a1), constants=consts, witnesses={"f": f}))


def improved_bipartiteness_certificate(G: WeightedGraph, k: int, spectrum: Spectrum | None = None) -> Certificate:
    """beta(f) <= 16 sqrt(2) k R(f) / sqrt(alpha_k), signless R, f the alpha_1 eigenfunction.

    Degenerate (infinite bound) when alpha_k = 0.
    """
    if not 1 <= k <= G.n:
        raise DomainError(f"k must lie in 1..{G.n}, got {k}")
    sp = _spectrum(G, SIGNLESS, spectrum)
    f = sp.eigenfunction(1)
    a_k = sp.eigenvalue(k)
    beta = sweep_bipartiteness(f).value
    R = signless_rayleigh(f)
    consts = {"k": k, "alpha_k": a_k, "signless_rayleigh": R}
    if a_k <= 0:
        return Certificate("improved_bipartiteness", beta, math.inf, constants=consts, degenerate=True)
    return Certificate("improved_bipartiteness", beta, 16 * math.sqrt(2) * k * R / math.sqrt(a_k),
                       constants=consts, witnesses={"f": f})
