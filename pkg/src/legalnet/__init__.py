"""Yearly snapshot multigraphs of cross-referencing legal documents and their analysis."""
from ._accel import backend
from .citekeys import CiteKey
from .corpus import CorpusNode, Snapshot, load_country, parse_snapshot_xml
from .graphcore import LevelSelector, build_graph, quotient

__version__ = "0.1.0"

__all__ = ["backend", "CiteKey", "CorpusNode", "Snapshot", "load_country", "parse_snapshot_xml",
           "LevelSelector", "build_graph", "quotient", "__version__"]
