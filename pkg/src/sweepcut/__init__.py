"""Spectral partitioning with certified Cheeger-type bounds."""

from .algorithms import (MaxCutResult, SeparatorResult, balanced_separator, maxcut_enlargement_check,
                         rayleigh_enlargement_check, recursive_kway, spectral_maxcut)
from .certificates import SCHEMA_VERSION, Certificate
from .errors import CapacityError, DomainError, LowDegreeWarning, ParseError
from .graph import (InducedCut, VertexSet, WeightedGraph, bipartiteness_ratio, conductance, induced_subgraph,
                    phi_k_of_partition, uncutness)
from .io import emit_edge_list, parse_edge_list, parse_partition
from .spectral import LAPLACIAN, SIGNLESS, Spectrum, VertexFunction, dense_spectrum, nonneg_split
from .sweep import Interval, SweepResult, sweep_bipartiteness, sweep_conductance

__all__ = [
    "CapacityError", "Certificate", "DomainError", "InducedCut", "Interval", "LAPLACIAN", "LowDegreeWarning",
    "MaxCutResult", "ParseError", "SCHEMA_VERSION", "SIGNLESS", "SeparatorResult", "Spectrum", "SweepResult",
    "VertexFunction", "VertexSet", "WeightedGraph", "balanced_separator", "bipartiteness_ratio", "conductance",
    "dense_spectrum", "emit_edge_list", "induced_subgraph", "maxcut_enlargement_check", "nonneg_split",
    "parse_edge_list", "parse_partition", "phi_k_of_partition", "rayleigh_enlargement_check", "recursive_kway",
    "spectral_maxcut", "sweep_bipartiteness", "sweep_conductance", "uncutness",
]
