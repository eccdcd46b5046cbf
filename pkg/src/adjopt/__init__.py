"""Covariate adjustment in DAGs, CPDAGs and maximal PDAGs."""

from adjopt.graph import Pdag, parse_graph, serialize_graph

__version__ = "0.1.0"

__all__ = ["Pdag", "parse_graph", "serialize_graph", "__version__"]
