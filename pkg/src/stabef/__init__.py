"""Extended formulations of stable set polytopes of graphs with ocp <= 1,
with an exact rational verification harness."""

from .graph import Graph, build_graph, parse_graph, read_graph
from .extform import ExtForm, format_extform, parse_extform
from .pipeline import PipelineReport, compile_graph, verify

__all__ = [
    "ExtForm",
    "Graph",
    "PipelineReport",
    "build_graph",
    "compile_graph",
    "format_extform",
    "parse_extform",
    "parse_graph",
    "read_graph",
    "verify",
]
__version__ = "0.1.0"
