"""Graph simplification with adaptive community motifs."""

from .alignment import AlignmentMatching, AlignParams, SimilarityMatrix, align, match_nodes
from .assembly import MotifEdge, aggregate_edges, bundle_edges, global_motif_layout
from .clustering import APParams, ClusterAssignment, affinity_propagation, cluster_representatives, cluster_subgraphs
from .community import CommunityPartition, detect_communities, modularity
from .embedding import EmbeddingParams, EmbeddingVector, embed_subgraph, embedding_distance
from .errors import AdaMotifError, ConvergenceError, DomainError, GraphParseError, PackingError, StageError
from .graph import Graph, Subgraph, dump_edge_list, induced_subgraph, load_edge_list
from .layout import DecoratedLayout, LayoutParams, NodeEncoding, difference_layout, force_layout, representative_layouts
from .motif import Motif, MotifParams, Polygon, alpha_shape, buffer_polygon, build_motif
from .pipeline import PipelineConfig, RunReport, run_pipeline
from .scene import MotifScene, load_scene, render
from .supergraph import SuperGraph, synthesize_supergraph

__version__ = "0.1.0"

__all__ = [
    "AdaMotifError",
    "affinity_propagation",
    "aggregate_edges",
    "align",
    "AlignmentMatching",
    "AlignParams",
    "alpha_shape",
    "APParams",
    "buffer_polygon",
    "build_motif",
    "bundle_edges",
    "cluster_representatives",
    "cluster_subgraphs",
    "ClusterAssignment",
    "CommunityPartition",
    "ConvergenceError",
    "DecoratedLayout",
    "detect_communities",
    "difference_layout",
    "DomainError",
    "dump_edge_list",
    "embed_subgraph",
    "embedding_distance",
    "EmbeddingParams",
    "EmbeddingVector",
    "force_layout",
    "global_motif_layout",
    "Graph",
    "GraphParseError",
    "induced_subgraph",
    "LayoutParams",
    "load_edge_list",
    "load_scene",
    "match_nodes",
    "modularity",
    "Motif",
    "MotifEdge",
    "MotifParams",
    "MotifScene",
    "NodeEncoding",
    "PackingError",
    "PipelineConfig",
    "Polygon",
    "render",
    "representative_layouts",
    "run_pipeline",
    "RunReport",
    "SimilarityMatrix",
    "StageError",
    "Subgraph",
    "SuperGraph",
    "synthesize_supergraph",
]
