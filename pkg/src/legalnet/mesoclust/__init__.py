from .alignment import Alignment, align, check_alignment, jaro_winkler
from .clustering import Clustering
from .consensus import coclassification, consensus_cluster, consensus_from_partitions
from .families import (FamilyClassification, FamilyGraph, build_family_graph, classify_families,
                       cluster_similarity, overlaps)
from .mapequation import FlowGraph, codelength, map_equation, map_equation_cluster
from .tfidf import family_tfidf

__all__ = [
    "Alignment", "align", "check_alignment", "jaro_winkler", "Clustering", "coclassification",
    "consensus_cluster", "consensus_from_partitions", "FamilyClassification", "FamilyGraph",
    "build_family_graph", "classify_families", "cluster_similarity", "overlaps", "FlowGraph",
    "codelength", "map_equation", "map_equation_cluster", "family_tfidf",
]
