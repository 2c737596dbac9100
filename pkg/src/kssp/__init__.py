"""k shortest simple paths in weighted directed multigraphs via generalized sidetrack sequences."""

from kssp.graph import EdgeRecord, Graph, build_graph, generate_random, parse_dimacs, write_dimacs
from kssp.solver import KPath, KsspSolver, Query, RunStats, Variant, run_basic, run_sb, solve

__all__ = [
    "EdgeRecord",
    "Graph",
    "KPath",
    "KsspSolver",
    "Query",
    "RunStats",
    "Variant",
    "build_graph",
    "generate_random",
    "parse_dimacs",
    "run_basic",
    "run_sb",
    "solve",
    "write_dimacs",
]
