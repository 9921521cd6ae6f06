import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complete, cycle
from sweepcut.bounds import split_eigenfunction
from sweepcut.errors import DomainError
from sweepcut.graph import WeightedGraph
from sweepcut.instances import gen_path
from sweepcut.regions import (ALPHA, C_HEAVY, Region, dyadic_cheeger_certificates, build_regions, dyadic_decompose,
                              level_endpoints, level_of, light_subinterval_certificates, main_func_dichotomy,
                              region_functions, tent_function, unbalanced_interval_certificates, well_separated)
from sweepcut.spectral import VertexFunction, lambda_bound_from_disjoint, rayleigh
from sweepcut.sweep import Interval


def ramp(m):
    """Path on 2m vertices with f decreasing linearly from one end to zero at the middle."""
    G = gen_path(2 * m)
    x = np.zeros(2 * m)
    x[:m] = np.arange(m, 0, -1, dtype=float)
    return VertexFunction(G, x).normalized()


RAMP = ramp(100_000)


def test_constants():
    assert ALPHA == 0.5
    assert C_HEAVY == 1 / 24576


class TestLevels:
    @pytest.mark.parametrize("x,i", [(1.0, 0), (0.6, 0), (0.5, 1), (0.26, 1), (0.25, 2), (2.0, -1)])
    def test_level_of(self, x, i):
        assert level_of(x) == i

    def test_nonpositive(self):
        with pytest.raises(DomainError):
            level_of(0.0)

    @given(st.integers(-3, 10), st.integers(1, 6))
    def test_endpoints(self, i, k):
        e = level_endpoints(i, k)
        assert e.size == 12 * k + 1
        assert e[0] == 2.0 ** -i and e[-1] == 2.0 ** -(i + 1)
        assert np.allclose(np.diff(e), -(2.0 ** -i) * 0.5 / (12 * k), rtol=1e-12, atol=0)


class TestDecompose:
    def test_two_values_same_level(self):
        # weights chosen so that f = (1, 0.6, 0, 0) already has unit norm
        G = WeightedGraph(4, [(0, 1, 0.5), (1, 2, 0.32 / 0.36), (2, 3, 2.0)], warn_low_degree=False)
        f = VertexFunction(G, [1.0, 0.6, 0.0, 0.0])
        assert f.norm_w() == pytest.approx(1.0, abs=1e-12)
        dd = dyadic_decompose(f, 2)
        assert dd.levels[dd.level_mass > 0].tolist() == [0]

    def test_constant_support(self):
        f = VertexFunction(cycle(8), [1, 1, 1, 0, 0, 0, 0, 0]).normalized()
        dd = dyadic_decompose(f, 2)
        assert np.count_nonzero(dd.level_mass) == 1

    def test_zero(self):
        with pytest.raises(DomainError):
            dyadic_decompose(VertexFunction(cycle(4), [0, 0, 0, 0]), 2)

    def test_c16_rederived(self):
        G = cycle(16)
        f = split_eigenfunction(G)
        k = 2
        dd = dyadic_decompose(f, k)
        w, x = G.degree, f.values
        assert dd.level_mass.sum() == pytest.approx(1.0, rel=1e-12)
        assert dd.prev_mass.sum() == pytest.approx(dd.level_mass.sum(), rel=1e-12)
        for r in range(dd.levels.size):
            I = dd.level_interval(r)
            sel = I.contains(x)
            assert dd.level_mass[r] == pytest.approx(np.sum(w[sel] * x[sel] ** 2), abs=1e-15)
            assert dd.sub_mass[r].sum() == pytest.approx(dd.level_mass[r], abs=1e-15)
            assert dd.sub_length(r) == pytest.approx(I.length / (12 * k), rel=1e-12)
            thr = dd.c * dd.delta * dd.prev_mass[r] / k
            assert np.array_equal(dd.heavy[r], dd.sub_mass[r] >= thr)
            assert dd.balanced[r] == (dd.heavy[r].sum() >= 6 * k)
        assert dd.delta == pytest.approx(dd.phi ** 2 / dd.rayleigh, rel=1e-12)

    @settings(max_examples=40)
    @given(st.lists(st.floats(0.001, 1.0), min_size=2, max_size=10), st.integers(2, 4))
    def test_mass_conserved(self, vals, k):
        n = 2 * len(vals)
        G = cycle(n)
        f = VertexFunction(G, vals + [0.0] * len(vals)).normalized()
        dd = dyadic_decompose(f, k)
        assert dd.level_mass.sum() == pytest.approx(1.0, rel=1e-12)
        assert dd.sub_mass.sum() == pytest.approx(1.0, rel=1e-12)


class TestRegions:
    def test_no_balanced(self):
        f = VertexFunction(cycle(8), [1, 0.5, 0, 0, 0, 0, 0, 0]).normalized()
        dd = dyadic_decompose(f, 2)
        regions = build_regions(dd)
        assert dd.Delta == 0 and len(regions) == 4
        assert all(R.mass == 0 and R.pieces == () for R in regions)
        with pytest.raises(DomainError):
            region_functions(f, regions)

    def test_ramp(self):
        dd = dyadic_decompose(RAMP, 2)
        regions = build_regions(dd)
        assert len(regions) == 4
        assert well_separated(regions, dd.epsilon)
        W = min(R.mass for R in regions)
        assert W >= dd.c * dd.delta * dd.Delta / 2 * (1 - 1e-12)
        fs = region_functions(RAMP, regions, select=False)
        supp = np.array([h.values != 0 for h in fs])
        assert np.all(supp.sum(axis=0) <= 1)
        w = RAMP.graph.degree
        for h, R in zip(fs, regions):
            assert np.sum(w * h.values ** 2) >= R.mass * (1 - 1e-12)
        best = region_functions(RAMP, regions)
        assert len(best) == 2
        assert lambda_bound_from_disjoint(best) >= 0

    def test_tent_inside_and_far(self):
        G = cycle(4)
        R = Region(((0.5, 0.6),), 1.0, 0.1)
        f = VertexFunction(G, [0.55, 0.9, 0.2, 0.62])
        t = tent_function(f, R).values
        assert t[0] == 0.55 and t[1] == 0.0 and t[2] == 0.0
        assert 0 < t[3] < 0.62

    def test_separated(self):
        a = Region(((0.5, 0.6),), 1.0, 0.1)
        b = Region(((0.8, 0.9),), 1.0, 0.1)
        c = Region(((0.62, 0.7),), 1.0, 0.1)
        assert well_separated([a, b], 0.1)
        assert not well_separated([a, c], 0.1)


class TestDichotomy:
    def test_complete_case_i(self):
        G = WeightedGraph(8, complete(8))
        d = main_func_dichotomy(split_eigenfunction(G), 2)
        assert d.case == 1 and d.holds

    def test_c256(self):
        G = cycle(256)
        d = main_func_dichotomy(split_eigenfunction(G), 2)
        assert d.holds

    def test_step_function(self):
        G = cycle(16)
        f = VertexFunction(G, [1] * 4 + [0.5] * 4 + [0] * 8).normalized()
        d = main_func_dichotomy(f, 2)
        assert d.case == 1 and d.holds

    def test_rejects(self):
        G = cycle(4)
        with pytest.raises(DomainError):
            main_func_dichotomy(VertexFunction(G, [1, 1, 1, 0]).normalized(), 2)
        with pytest.raises(DomainError):
            main_func_dichotomy(VertexFunction(G, [1, 0, 0, 0]), 2)
        with pytest.raises(DomainError):
            main_func_dichotomy(VertexFunction(G, [1, 0, 0, 0]).normalized(), 0)

    def test_ramp_case_ii(self):
        d = main_func_dichotomy(RAMP, 2)
        assert d.case == 2 and d.holds
        names = [c.name for c in d.certificates]
        assert names == ["mainfunc_delta", "densewellsep", "mainfunc_case_ii"]
        assert d.decomposition.Delta >= 0.5
        assert len(d.functions) == 2
        supp = np.array([h.values != 0 for h in d.functions])
        assert np.all(supp.sum(axis=0) <= 1)
        x = RAMP.values
        for h, I, length in zip(d.functions, d.supports, d.lengths):
            nz = h.values != 0
            assert np.array_equal(nz, I.contains(x) & (x > 0))
            assert np.array_equal(h.values[nz], x[nz])
            assert length == pytest.approx(I.length)
        lam_cap = lambda_bound_from_disjoint(list(d.functions))
        assert lam_cap == pytest.approx(2 * max(rayleigh(h) for h in d.functions))

    def test_ramp_energy_bounds(self):
        dd = dyadic_decompose(RAMP, 2)
        assert all(c.holds for c in light_subinterval_certificates(RAMP, dd))
        assert all(c.holds for c in unbalanced_interval_certificates(RAMP, dd))


class TestDyadicCheeger:
    @pytest.mark.parametrize("G", [cycle(8), cycle(64), WeightedGraph(6, complete(6)), gen_path(16)],
                             ids=["c8", "c64", "k6", "path16"])
    def test_holds(self, G):
        main, chain = dyadic_cheeger_certificates(split_eigenfunction(G))
        assert main.holds and chain.holds
        assert main.rhs == pytest.approx(4.68 * math.sqrt(main.constants["rayleigh"]))

    def test_ramp(self):
        assert all(c.holds for c in dyadic_cheeger_certificates(RAMP))

    def test_light_and_unbalanced_on_cycle(self):
        f = split_eigenfunction(cycle(64))
        for k in (2, 3):
            dd = dyadic_decompose(f, k)
            assert all(c.holds for c in light_subinterval_certificates(f, dd))
            assert all(c.holds for c in unbalanced_interval_certificates(f, dd))


def test_interval_convention_matches_levels():
    e = level_endpoints(0, 2)
    assert Interval(e[1], e[0]).contains([1.0])[0]
    assert not Interval(e[1], e[0]).contains([e[1]])[0]
