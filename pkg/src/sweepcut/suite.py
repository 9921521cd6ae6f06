"""The fixed graph suite and the battery of certified inequalities run on it.

``run_battery`` returns a plain dict that serializes deterministically with
:func:`sweepcut.certificates.dumps`; it records no timings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algorithms import balanced_separator, maxcut_guarantee, spectral_maxcut
from .bounds import (cheeger_certificates, improved_bipartiteness_certificate, improved_cheeger_certificate,
                     trevisan_certificates)
from .certificates import SCHEMA_VERSION, TOLERANCE, dumps
from .graph import WeightedGraph, bipartiteness_ratio, conductance
from .instances import (gen_barbell, gen_complete, gen_cycle, gen_hypercube, gen_joined_expanders, gen_path,
                        gen_planted_bisection, gen_stable_gadget)
from .oracles import BETA_MAX_N, brute_force_beta, brute_force_phi, maxcut_deficit
from .regions import ALPHA, dyadic_cheeger_certificates, level_of, main_func_dichotomy
from .spectral import LAPLACIAN, SIGNLESS, VertexFunction, dense_spectrum, energy, lambda_bound_from_disjoint, nonneg_split
from .steps import (step_energy_diagnostics, band_functions, build_step_approximation, step_residual_certificate,
                    symmetric_step_approximation)
from .sweep import (Interval, energy_drop_lower_bound, restricted_energy, sweep_bipartiteness,
                    sweep_conductance, threshold_cut)

CRITERIA = {
    1: "classical Cheeger sandwich",
    2: "improved Cheeger bound",
    3: "cycle tightness ratio",
    4: "step approximation outcome",
    5: "disjoint-support eigenvalue bound",
    6: "energy additivity and drop",
    7: "main-function dichotomy",
    8: "4.68 and 64k-form sweep bounds",
    9: "balanced separator",
    10: "spectral max cut",
    11: "bipartiteness sandwich",
    12: "oracle agreement",
    13: "determinism",
}

PROBES_PER_GRAPH = 1000
BARBELL_SIZES = (4, 6, 8, 10)
_MAX_FAILURES = 20


def suite_graphs(seed: int = 1) -> list[tuple[str, WeightedGraph]]:
    """The 36 suite instances, in a fixed order.

    Planted bisections use seeds seed..seed+4 and joined expanders use
    seeds seed..seed+2.
    """
    out = [(f"cycle-{n}", gen_cycle(n)) for n in (4, 8, 16, 32, 64, 128, 256)]
    out += [(f"complete-{n}", gen_complete(n)) for n in range(3, 11)]
    out += [(f"path-{n}", gen_path(n)) for n in (3, 8, 16, 31)]
    out.append(("cube-3", gen_hypercube(3)))
    out += [(f"planted-32-s{s}", gen_planted_bisection(32, 0.5, 0.1, s)[0]) for s in range(seed, seed + 5)]
    out += [(f"expanders-16-b{b}-s{s}", gen_joined_expanders(16, b, 1.0, s))
            for b in (1, 2, 4) for s in range(seed, seed + 3)]
    out += [(f"gadget-{n}", gen_stable_gadget(n, 1.0)) for n in (4, 8)]
    return out


@dataclass
class _Tally:
    checks: int = 0
    failures: list = field(default_factory=list)
    skipped: int = 0

    def check(self, ok: bool, label: str) -> None:
        self.checks += 1
        if not ok:
            self.failures.append(label)

    def cert(self, c, label: str) -> None:
        self.check(c.holds, f"{label}: {c.name} lhs={c.lhs!r} rhs={c.rhs!r}")

    def to_dict(self, cid: int) -> dict:
        return {
            "id": cid,
            "title": CRITERIA[cid],
            "holds": not self.failures,
            "checks": self.checks,
            "skipped": self.skipped,
            "failures": self.failures[:_MAX_FAILURES],
        }


def _disjoint_family(t: _Tally, fs, sp, which: str, label: str) -> None:
    fs = [h for h in fs if np.any(h.values != 0)]
    if not fs:
        return
    j = len(fs)
    bound = lambda_bound_from_disjoint(fs, which)
    t.check(sp.eigenvalue(j) <= bound + TOLERANCE, f"{label}: eigenvalue {j} exceeds {bound!r}")


def _random_probe(G: WeightedGraph, rng: np.random.Generator) -> tuple[VertexFunction, list[Interval]]:
    order = rng.permutation(G.n)
    cum = np.cumsum(G.degree[order])
    fits = int(np.searchsorted(cum, G.total_volume / 2, "right"))
    size = int(rng.integers(1, max(fits, 1) + 1))
    vals = 1.0 - rng.random(size)
    if rng.random() < 0.5:
        vals = np.ceil(vals * 4) / 4  # ties
    x = np.zeros(G.n)
    x[order[:size]] = vals
    m = int(rng.integers(1, 6))
    pts = np.sort(rng.random(2 * m) * 1.1 * float(x.max()))
    return VertexFunction(G, x), [Interval(pts[2 * i], pts[2 * i + 1]) for i in range(m)]


def _probe_energy(t: _Tally, G: WeightedGraph, rng: np.random.Generator, probes: int, name: str) -> None:
    for p in range(probes):
        f, family = _random_probe(G, rng)
        if f.support_volume() > G.total_volume / 2:
            t.skipped += 1
            continue
        E = energy(f)
        parts = [restricted_energy(f, I) for I in family]
        t.check(sum(parts) <= E + TOLERANCE, f"{name} probe {p}: additivity")
        phi = sweep_conductance(f).value
        for I, e in zip(family, parts):
            t.check(energy_drop_lower_bound(f, I, phi) <= e + TOLERANCE, f"{name} probe {p}: drop on {I}")


def _exhaustive_sweeps(G: WeightedGraph, f: VertexFunction, h: VertexFunction) -> tuple[bool, bool]:
    """Sweep values against direct re-evaluation of every threshold, compared with ==."""
    x = f.values
    best = min(conductance(G, x >= c) for c in np.unique(x)[1:]
               if 0 < G.degree[x >= c].sum() < G.total_volume)
    ok_phi = sweep_conductance(f).value == best
    vals = []
    for c in np.unique(np.abs(h.values[h.values != 0])):
        lm, rm = threshold_cut(h, c)
        if G.degree[lm | rm].sum() > 0:
            vals.append(bipartiteness_ratio(G, (lm, rm)))
    ok_beta = sweep_bipartiteness(h).value == min(vals)
    return ok_phi, ok_beta


def _basics(name: str, G: WeightedGraph):
    lap = dense_spectrum(G, LAPLACIAN)
    sig = dense_spectrum(G, SIGNLESS)
    f = nonneg_split(lap.eigenfunction(2), lap.eigenvalue(2))
    h = sig.eigenfunction(1)
    summary = {"name": name, "n": G.n, "m": G.m, "lambda_2": lap.eigenvalue(2),
               "phi_f2": sweep_conductance(f).value, "alpha_1": sig.eigenvalue(1),
               "beta_f": sweep_bipartiteness(h).value}
    return lap, sig, f, h, summary


def run_battery(seed: int = 1, *, probes: int = PROBES_PER_GRAPH) -> dict:
    """Run every criterion on the suite and report one entry per criterion.

    Criterion 13 regenerates the suite and recomputes the per-graph summary
    from scratch, requiring byte-identical output. Determinism across
    processes is checked by running the CLI twice.
    """
    T = {i: _Tally() for i in range(1, 13)}
    graphs = []
    for gi, (name, G) in enumerate(suite_graphs(seed)):
        n = G.n
        lap, sig, f, h, summary = _basics(name, G)
        lam2, phi_f, beta_h = summary["lambda_2"], summary["phi_f2"], summary["beta_f"]
        graphs.append(summary)

        for c in cheeger_certificates(G, lap):
            T[1].cert(c, name)
        for k in range(2, min(n, 12) + 1):
            T[2].cert(improved_cheeger_certificate(G, k, lap), f"{name} k={k}")

        if name.startswith("cycle-") and n >= 32:
            for k in range(2, 9):
                ratio = (2.0 / n) * math.sqrt(lap.eigenvalue(k)) / (k * lam2)
                T[3].check(0.05 <= ratio <= 10, f"{name} k={k}: ratio {ratio!r}")

        for k in range(2, min(n, 8) + 1):
            approx = build_step_approximation(f, k, lap.eigenvalue(k))
            T[4].cert(step_residual_certificate(f, approx), f"{name} k={k}")
            _disjoint_family(T[5], band_functions(f, approx), lap, LAPLACIAN, f"{name} bands k={k}")
            if approx.residual > 0:
                T[8].cert(step_energy_diagnostics(f, approx)[1], f"{name} k={k}")

        _probe_energy(T[6], G, np.random.default_rng([seed, gi]), probes, name)

        for k in (2, 4):
            d = main_func_dichotomy(f, k)
            T[7].check(d.case in (1, 2), f"{name} k={k}: case {d.case}")
            for c in d.certificates:
                T[7].cert(c, f"{name} k={k}")
            for I, length in zip(d.supports, d.lengths):
                want = ALPHA ** level_of(I.hi) * (1 - ALPHA) / (12 * k)
                T[7].check(abs(length - want) <= 1e-9 * want, f"{name} k={k}: length {length!r} vs {want!r}")
            if d.functions:
                _disjoint_family(T[5], d.functions, lap, LAPLACIAN, f"{name} mainfunc k={k}")
                for c in d.certificates:
                    if c.name == "densewellsep":
                        _disjoint_family(T[5], list(c.witnesses.values()), lap, LAPLACIAN,
                                         f"{name} regions k={k}")

        for c in dyadic_cheeger_certificates(f):
            T[8].cert(c, name)

        sep = balanced_separator(G, 2)
        T[9].check(sep.balanced, f"{name}: separator volume {sep.set.volume!r} of {G.total_volume!r}")

        mc = spectral_maxcut(G, 2)
        _, bip = G.two_coloring()
        if bip.all():
            T[10].check(mc.cut_fraction == 1.0, f"{name}: bipartite cut fraction {mc.cut_fraction!r}")
        if name == "complete-3":
            T[10].check(mc.cut_fraction >= 2 / 3 - 1e-12, f"{name}: cut fraction {mc.cut_fraction!r}")
        if n <= BETA_MAX_N:
            eps = maxcut_deficit(G)
            if 600 * 2 * eps < sig.eigenvalue(2):
                bound = maxcut_guarantee(2, eps, sig.eigenvalue(2))
                T[10].check(mc.cut_fraction >= bound - TOLERANCE, f"{name}: {mc.cut_fraction!r} < {bound!r}")
            else:
                T[10].skipped += 1
        else:
            T[10].skipped += 1

        for c in trevisan_certificates(G, sig):
            T[11].cert(c, name)
        for k in range(2, min(n, 6) + 1):
            T[11].cert(improved_bipartiteness_certificate(G, k, sig), f"{name} k={k}")
            approx = symmetric_step_approximation(h, k, beta_h)
            _disjoint_family(T[5], band_functions(h, approx), sig, SIGNLESS, f"{name} signless bands k={k}")

        if n <= 10:
            T[12].check(brute_force_phi(G)[0] <= phi_f + TOLERANCE, f"{name}: brute phi above sweep")
            T[12].check(brute_force_beta(G)[0] <= beta_h + TOLERANCE, f"{name}: brute beta above sweep")
            ok_phi, ok_beta = _exhaustive_sweeps(G, f, h)
            T[12].check(ok_phi, f"{name}: conductance sweep differs from re-evaluation")
            T[12].check(ok_beta, f"{name}: bipartiteness sweep differs from re-evaluation")

    for m in BARBELL_SIZES:
        G = gen_barbell(m)
        sep = balanced_separator(G, 2)
        opt = brute_force_phi(G)[0]
        T[9].check(sep.balanced, f"barbell-{m}: unbalanced")
        T[9].check(sep.conductance <= 3 * opt + TOLERANCE, f"barbell-{m}: {sep.conductance!r} vs optimum {opt!r}")

    T[13] = _Tally()
    again = [_basics(name, G)[4] for name, G in suite_graphs(seed)]
    T[13].check(dumps(again) == dumps(graphs), "per-graph summary differs on recomputation")

    criteria = [T[i].to_dict(i) for i in range(1, 14)]
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "probes_per_graph": probes,
        "graphs": graphs,
        "criteria": criteria,
        "holds": all(c["holds"] for c in criteria),
    }
