import math

import pytest
from hypothesis import given, settings

from conftest import complete, cycle, graphs
from sweepcut.bounds import (bottom_signless, cheeger_certificates, improved_bipartiteness_certificate,
                             split_eigenfunction, trevisan_certificates)
from sweepcut.certificates import Certificate, digest, dumps
from sweepcut.errors import DomainError
from sweepcut.graph import WeightedGraph
from sweepcut.spectral import SIGNLESS, dense_spectrum
from sweepcut.sweep import sweep_conductance

K3 = WeightedGraph(3, complete(3))


class TestCertificate:
    def test_tolerance(self):
        assert Certificate("x", 1.0 + 5e-10, 1.0).holds
        assert not Certificate("x", 1.0 + 2e-9, 1.0).holds
        assert not Certificate("x", float("nan"), 1.0).holds
        assert Certificate("x", 5.0, 1.0, applicable=False).holds

    def test_json(self):
        c = Certificate("x", 0.1, math.inf, constants={"k": 2}, witnesses={"v": [1, 2]})
        d = c.to_dict()
        assert d["holds"] and d["witness_digests"]["v"] == digest([1, 2])
        assert '"rhs":"inf"' in c.to_json().replace(" ", "")

    def test_dumps_round_trip_precision(self):
        assert dumps(0.1) == "0.10000000000000001"
        assert dumps({"b": 1, "a": [1.5, None, True]}) == dumps({"b": 1, "a": [1.5, None, True]})


class TestCheeger:
    @settings(max_examples=40)
    @given(graphs(min_n=3))
    def test_both_sides(self, G):
        lo, hi = cheeger_certificates(G)
        assert lo.holds and hi.holds

    def test_c8(self):
        G = cycle(8)
        lo, hi = cheeger_certificates(G)
        assert hi.lhs == sweep_conductance(split_eigenfunction(G)).value
        assert lo.holds and hi.holds
        assert hi.rhs == pytest.approx(math.sqrt(2 * (1 - math.cos(math.pi / 4))))

    def test_single_vertex(self):
        with pytest.raises(DomainError):
            split_eigenfunction(WeightedGraph(1, [], warn_low_degree=False))


class TestTrevisan:
    def test_k3(self):
        lo, hi = trevisan_certificates(K3)
        assert lo.holds and hi.holds
        assert hi.constants["alpha_1"] == pytest.approx(0.5)

    def test_bipartite(self):
        lo, hi = trevisan_certificates(cycle(6))
        assert hi.lhs == 0.0 and hi.holds

    @settings(max_examples=40)
    @given(graphs())
    def test_both_sides(self, G):
        assert all(c.holds for c in trevisan_certificates(G))


class TestImprovedBipartiteness:
    def test_bipartite_degenerate(self):
        c = improved_bipartiteness_certificate(cycle(6), 1)
        assert c.degenerate and c.holds

    def test_range(self):
        with pytest.raises(DomainError):
            improved_bipartiteness_certificate(K3, 4)

    @settings(max_examples=30)
    @given(graphs(min_n=3, max_n=8))
    def test_holds(self, G):
        sp = dense_spectrum(G, SIGNLESS)
        for k in range(1, G.n + 1):
            assert improved_bipartiteness_certificate(G, k, sp).holds

    def test_bottom_signless_eigen(self):
        G = cycle(5)
        f = bottom_signless(G)
        assert f.norm_w() == pytest.approx(1.0)
