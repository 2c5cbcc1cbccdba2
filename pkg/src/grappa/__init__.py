"""Exact harmonic analysis and non-abelian Kummer maps on metrized reduction graphs."""
from .graph import (ReductionGraph, GraphPoint, GraphError, parse_graph, load_graph,
                    bundled, BUNDLED, subdivide)

__version__ = "0.1.0"
