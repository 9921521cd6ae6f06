import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complete, cycle, graphs
from sweepcut.bounds import improved_cheeger_certificate, split_eigenfunction
from sweepcut.errors import DomainError
from sweepcut.graph import WeightedGraph
from sweepcut.instances import gen_planted_bisection
from sweepcut.spectral import SIGNLESS, VertexFunction, dense_spectrum, rayleigh, signless_rayleigh
from sweepcut.steps import (StepApproximation, step_energy_diagnostics, band_functions, band_mass,
                            build_step_approximation, ellone_bound_certificate, jump_bound_certificate,
                            ksteps_certificates, psi_nearest, quantize, smoothed_function,
                            step_residual_certificate, symmetric_step_approximation)
from sweepcut.sweep import sweep_bipartiteness, sweep_conductance

K2 = WeightedGraph(2, [(0, 1, 1.0)])
K3 = WeightedGraph(3, complete(3))


@st.composite
def unit_functions(draw, signed=False, small_support=False):
    """A random graph with a unit-norm function on it (non-negative unless signed)."""
    G = draw(graphs(min_n=3, max_n=8))
    lo = -1.0 if signed else 0.0
    x = np.array(draw(st.lists(st.floats(lo, 1.0).map(lambda v: round(v, 3)), min_size=G.n, max_size=G.n)))
    if small_support:
        order = np.argsort(G.degree, kind="stable")
        keep = np.zeros(G.n, bool)
        vol = 0.0
        for v in order:
            if vol + G.degree[v] <= G.total_volume / 2:
                keep[v] = True
                vol += G.degree[v]
        x = np.where(keep, x, 0.0)
    if not np.any(x):
        x[int(np.argmin(G.degree))] = 1.0
    return VertexFunction(G, x).normalized()


class TestPsi:
    def test_examples(self):
        assert psi_nearest(1.9, [0, 1, 3]) == 1
        assert psi_nearest(2.1, [0, 1, 3]) == 3
        assert psi_nearest(1.0, [0, 2]) == 0

    def test_outside_range(self):
        assert psi_nearest(-5.0, [0, 1]) == 0
        assert psi_nearest(7.0, [0, 1]) == 1

    def test_empty(self):
        with pytest.raises(DomainError):
            psi_nearest(1.0, [])

    @given(st.lists(st.integers(-40, 40), min_size=1, max_size=6), st.integers(-80, 80))
    def test_nearest(self, ts, x):
        # quarter steps keep every distance exact
        ts = [t / 4 for t in ts]
        x = x / 4
        got = quantize([x], ts)[0]
        assert got in ts
        assert all(abs(x - got) <= abs(x - t) for t in ts)
        assert all(t >= got for t in ts if abs(x - t) == abs(x - got))


class TestBuild:
    def test_indicator(self):
        G = cycle(8)
        f = VertexFunction(G, [1, 0, 0, 0, 0, 0, 0, 0]).normalized()
        a = build_step_approximation(f, 2, 0.5)
        assert a.residual == 0.0 and a.succeeded

    def test_exact_step_function(self):
        G = cycle(8)
        f = VertexFunction(G, [3, 2, 1, 0, 0, 0, 0, 0]).normalized()
        a = StepApproximation.from_thresholds(f, [0.0] + sorted(set(f.values[f.values > 0])) + [f.values.max()])
        assert a.residual == 0.0

    def test_c8_residual_bound(self):
        G = cycle(8)
        sp = dense_spectrum(G)
        f = split_eigenfunction(G, sp)
        for k in (2, 3, 5):
            a = build_step_approximation(f, k, sp.eigenvalue(k))
            c = step_residual_certificate(f, a)
            assert c.holds, c

    @pytest.mark.parametrize("kw", [{"k": 0, "lambda_k": 1.0}, {"k": 2, "lambda_k": 0.0}])
    def test_rejects_parameters(self, kw):
        f = VertexFunction(K2, [1, 0]).normalized()
        with pytest.raises(DomainError):
            build_step_approximation(f, **kw)

    def test_rejects_function(self):
        with pytest.raises(DomainError):
            build_step_approximation(VertexFunction(K2, [2, 0]), 2, 1.0)
        with pytest.raises(DomainError):
            build_step_approximation(VertexFunction(K2, [-1, 0]).normalized(), 2, 1.0)

    def test_reproduced_from_thresholds(self):
        G = cycle(16)
        sp = dense_spectrum(G)
        f = split_eigenfunction(G, sp)
        a = build_step_approximation(f, 3, sp.eigenvalue(3))
        # g takes only threshold values, so rounding it onto the same thresholds is exact
        again = StepApproximation.from_thresholds(a.g, a.thresholds, k=3)
        assert again.residual == 0.0
        assert np.array_equal(again.g.values, a.g.values)

    @settings(max_examples=60)
    @given(unit_functions(), st.integers(2, 4), st.floats(0.05, 2.0))
    def test_invariants(self, f, k, lam):
        a = build_step_approximation(f, k, lam)
        t = a.thresholds
        assert t[0] == 0 and np.all(np.diff(t) >= 0) and t.size == 2 * k + 1
        assert np.all(np.isin(a.g.values, t))
        w = f.graph.degree
        assert a.residual ** 2 == pytest.approx(np.sum(w * (f.values - a.g.values) ** 2), abs=1e-15)
        assert step_residual_certificate(f, a).holds
        C, M = a.C, f.values.max()
        if C > 0:
            # bands below the first one reaching max f carry exactly C
            last = int(np.argmax(t >= M)) if a.succeeded else t.size - 1
            for m in a.band_mass[:last - 1] if a.succeeded else a.band_mass:
                assert m == pytest.approx(C, rel=1e-10, abs=1e-15)
            if a.succeeded:
                assert a.band_mass[last - 1] <= C * (1 + 1e-10)
                assert np.all(a.band_mass[last:] == 0)

    @settings(max_examples=30)
    @given(unit_functions(), st.integers(2, 3), st.floats(0.05, 2.0))
    def test_band_mass_monotone(self, f, k, lam):
        a = build_step_approximation(f, k, lam)
        x, w = f.values, f.graph.degree
        start = a.thresholds[0]
        grid = np.linspace(start, x.max(), 200)
        masses = np.array([band_mass(x, w, start, s) for s in grid])
        assert np.all(np.diff(masses) >= -1e-15)
        # the chosen threshold is the first crossing of C
        t1 = a.thresholds[1]
        below = [m for s, m in zip(grid, masses) if s < t1 - 1e-12]
        assert all(m <= a.C * (1 + 1e-9) for m in below)


class TestBandFunctions:
    def test_zero_when_exact(self):
        f = VertexFunction(K2, [1, 0]).normalized()
        a = StepApproximation.from_thresholds(f, [0.0, 0.5, f.values.max()], k=1)
        assert all(not np.any(b.values) for b in band_functions(f, a))

    def test_mismatch(self):
        f = VertexFunction(K2, [1, 0]).normalized()
        a = build_step_approximation(f, 2, 1.0)
        other = VertexFunction(K2, [0, 1]).normalized()
        with pytest.raises(DomainError):
            band_functions(other, a)

    @settings(max_examples=60)
    @given(unit_functions(), st.integers(2, 4), st.floats(0.05, 2.0))
    def test_lipschitz_per_edge(self, f, k, lam):
        a = build_step_approximation(f, k, lam)
        bands = band_functions(f, a)
        G = f.graph
        supp = np.array([b.values != 0 for b in bands])
        assert np.all(supp.sum(axis=0) <= 1)
        df2 = (f.values[G.u] - f.values[G.v]) ** 2
        total = np.zeros(G.m)
        for b in bands:
            d2 = (b.values[G.u] - b.values[G.v]) ** 2
            assert np.all(d2 <= df2 + 1e-15)
            total += d2
        assert np.all(total <= df2 + 1e-12)
        if not a.succeeded:
            assert step_residual_certificate(f, a).name == "step_band_sum"
            assert sum(rayleigh(b) for b in bands if np.any(b.values)) <= k * lam / 2 + 1e-9

    @settings(max_examples=60)
    @given(unit_functions(signed=True), st.integers(2, 3))
    def test_symmetric_lipschitz_per_edge(self, f, k):
        beta = sweep_bipartiteness(f).value
        a = symmetric_step_approximation(f, k, beta)
        bands = band_functions(f, a)
        G = f.graph
        ds2 = (f.values[G.u] + f.values[G.v]) ** 2
        total = np.zeros(G.m)
        for b in bands:
            total += (b.values[G.u] + b.values[G.v]) ** 2
        assert np.all(total <= ds2 + 1e-12)
        assert all(c.holds for c in ksteps_certificates(f, a))
        assert ellone_bound_certificate(f, a).holds


class TestSmoothed:
    def test_examples(self):
        f = VertexFunction(K2, [0.5, 0.0])
        a = StepApproximation.from_thresholds(f, [0.0, 1.0])
        h = smoothed_function(f, a)
        assert h.values.tolist() == [0.125, 0.0]

    def test_at_threshold(self):
        t = [0.0, 0.2, 0.5, 1.0]
        f = VertexFunction(cycle(4), [0.5, 1.0, 0.2, 0.0])
        h = smoothed_function(f, StepApproximation.from_thresholds(f, t))
        full = [(b - a) ** 2 / 4 for a, b in zip(t, t[1:])]
        assert h.values == pytest.approx([sum(full[:2]), sum(full), full[0], 0.0], abs=1e-15)

    @settings(max_examples=60)
    @given(unit_functions(), st.integers(2, 4), st.floats(0.05, 2.0))
    def test_properties(self, f, k, lam):
        a = build_step_approximation(f, k, lam)
        h = smoothed_function(f, a)
        x, y = f.values, h.values
        order = np.argsort(x, kind="stable")
        assert np.all(np.diff(y[order]) >= -1e-15)
        assert np.all(y >= x ** 2 / (8 * k) - 1e-15)
        G = f.graph
        g = a.g.values
        lhs = np.abs(y[G.u] - y[G.v])
        dx = np.abs(x[G.u] - x[G.v])
        rhs = 0.5 * dx * (np.abs(x[G.u] - g[G.u]) + np.abs(x[G.v] - g[G.v]) + dx)
        assert np.all(lhs <= rhs + 1e-13)


class TestJumpBound:
    def test_c8(self):
        G = cycle(8)
        sp = dense_spectrum(G)
        f = split_eigenfunction(G, sp)
        assert jump_bound_certificate(f, build_step_approximation(f, 2, sp.eigenvalue(2))).holds

    def test_planted(self):
        G, _ = gen_planted_bisection(16, 1.0, 0.02, seed=3)
        sp = dense_spectrum(G)
        f = split_eigenfunction(G, sp)
        assert jump_bound_certificate(f, build_step_approximation(f, 2, sp.eigenvalue(2))).holds

    def test_zero_residual(self):
        G = cycle(8)
        f = VertexFunction(G, [1, 1, 0, 0, 0, 0, 0, 0]).normalized()
        a = StepApproximation.from_thresholds(f, [0.0, f.values.max()], k=1)
        c = jump_bound_certificate(f, a)
        assert a.residual == 0 and c.rhs == 4 * 1 * rayleigh(f) and c.holds

    def test_rejects_large_support(self):
        f = VertexFunction(K2, [1, 1]).normalized()
        with pytest.raises(DomainError):
            jump_bound_certificate(f, StepApproximation.from_thresholds(f, [0.0, f.values.max()]))

    @settings(max_examples=60)
    @given(unit_functions(small_support=True), st.integers(1, 4), st.data())
    def test_any_step_approximation(self, f, k, data):
        cuts = sorted(data.draw(st.lists(st.floats(0, 1.2), min_size=2 * k, max_size=2 * k)))
        a = StepApproximation.from_thresholds(f, [0.0] + cuts, k=k)
        assert jump_bound_certificate(f, a).holds


class TestImprovedCheeger:
    def test_k2_graph(self):
        c = improved_cheeger_certificate(K2, 2)
        assert c.lhs == 1.0 and c.rhs == pytest.approx(24.0) and c.holds

    def test_c8_k3(self):
        G = cycle(8)
        c = improved_cheeger_certificate(G, 3)
        # the lambda_2 eigenspace is two-dimensional, so the split function (and its sweep
        # value, 1/4 or 1/3) depends on the basis; the bound holds either way
        assert c.lhs == sweep_conductance(split_eigenfunction(G)).value
        assert c.lhs in (0.25, 1 / 3) and c.holds
        assert c.rhs <= 12 * math.sqrt(2) * 3 * math.sqrt(1 - math.cos(math.pi / 4)) + 1e-9

    def test_disconnected(self):
        G = WeightedGraph(4, [(0, 1, 1.0), (2, 3, 1.0)])
        c = improved_cheeger_certificate(G, 2)
        assert c.degenerate and c.holds and c.lhs == 0.0 and math.isinf(c.rhs)

    @pytest.mark.parametrize("k", [1, 9])
    def test_k_range(self, k):
        with pytest.raises(DomainError):
            improved_cheeger_certificate(cycle(8), k)

    @settings(max_examples=30)
    @given(graphs(min_n=3, max_n=8))
    def test_holds(self, G):
        sp = dense_spectrum(G)
        for k in range(2, G.n + 1):
            assert improved_cheeger_certificate(G, k, sp).holds


class TestSymmetric:
    def test_bipartite(self):
        G = cycle(6)
        sp = dense_spectrum(G, SIGNLESS)
        f = sp.eigenfunction(1)
        a = symmetric_step_approximation(f, 2, sweep_bipartiteness(f).value)
        assert a.succeeded and a.C == 0.0
        assert np.array_equal(np.sign(a.g.values), np.sign(f.values))

    def test_k3(self):
        sp = dense_spectrum(K3, SIGNLESS)
        f = sp.eigenfunction(1)
        a = symmetric_step_approximation(f, 2, sweep_bipartiteness(f).value)
        assert all(c.holds for c in ksteps_certificates(f, a))
        assert ellone_bound_certificate(f, a).holds

    def test_c5(self):
        sp = dense_spectrum(cycle(5), SIGNLESS)
        f = sp.eigenfunction(1)
        a = symmetric_step_approximation(f, 2, sweep_bipartiteness(f).value)
        assert ellone_bound_certificate(f, a).holds

    def test_exact_step(self):
        f = VertexFunction(cycle(4), [1, -1, 0.5, -0.5]).normalized()
        m = f.values.max()
        a = StepApproximation.from_thresholds(f, [0.0, m / 2, m], symmetric=True, k=1)
        assert a.residual == pytest.approx(0.0, abs=1e-15)

    def test_rejects(self):
        f = VertexFunction(K2, [1, -1]).normalized()
        with pytest.raises(DomainError):
            symmetric_step_approximation(f, 2, -0.1)
        with pytest.raises(DomainError):
            symmetric_step_approximation(VertexFunction(K2, [1, -1]), 2, 0.1)
        with pytest.raises(DomainError):
            ellone_bound_certificate(f, build_step_approximation(VertexFunction(K2, [1, 0]).normalized(), 2, 1.0))

    @settings(max_examples=40)
    @given(unit_functions(signed=True), st.integers(2, 4))
    def test_residual_budget(self, f, k):
        beta = sweep_bipartiteness(f).value
        a = symmetric_step_approximation(f, k, beta)
        if a.succeeded and a.C > 0:
            assert a.residual ** 2 <= 2 * k * a.C * (1 + 1e-9)
        if a.succeeded:
            assert beta <= 8 * k * signless_rayleigh(f) + 1e-9


class TestStepEnergyDiagnostics:
    @pytest.mark.parametrize("n,k", [(8, 2), (16, 3)])
    def test_cycles(self, n, k):
        G = cycle(n)
        sp = dense_spectrum(G)
        f = split_eigenfunction(G, sp)
        step, jump = step_energy_diagnostics(f, build_step_approximation(f, k, sp.eigenvalue(k)))
        assert step.holds and jump.holds

    def test_zero_residual_first_branch(self):
        G = cycle(8)
        f = VertexFunction(G, [1, 0, 0, 0, 0, 0, 0, 0]).normalized()
        a = build_step_approximation(f, 2, 1.0)
        _, jump = step_energy_diagnostics(f, a)
        assert a.residual == 0
        assert jump.lhs == jump.constants["phi"] * jump.constants["g_norm_sq"] / 128

    def test_needs_greedy(self):
        f = VertexFunction(cycle(4), [1, 0, 0, 0]).normalized()
        with pytest.raises(DomainError):
            step_energy_diagnostics(f, StepApproximation.from_thresholds(f, [0.0, 1.0]))
