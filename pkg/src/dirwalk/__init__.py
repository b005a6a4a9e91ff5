"""Directed-graph centrality from pseudo-Hermitian quantum walks, compiled to optical element programs."""

from .graph import (CentralityReport, DirectedGraph, GraphParseError, adjacency_matrix, hamiltonian,
                    laplacian, pagerank, parse_graph)
from .spectral import (NotEvolvableError, SpectralDecomposition, ctqw_centrality, eigendecompose,
                       evolve_state)
from .compiler import CompileOptions, compile_evolution, verify_circuit
from .ir import CircuitIR
from .jones import simulate, sweep, transfer_matrix

__version__ = "0.1.0"
