"""Decremental shortest paths and MWU bounded-cost flow at desk scale."""

from decflow.graph import DynGraph, GraphError, Hypergraph, build

__all__ = ["DynGraph", "GraphError", "Hypergraph", "build"]
__version__ = "0.1.0"
