"""Legal case knowledge graph construction and BM25-based relevant-law retrieval."""

from .bm25 import Bm25Index, Bm25Params, ScoredDoc, build_index, score, tokenize, top_k
from .corpus import (
    CaseRecord,
    GoldLabel,
    LawEntry,
    SectionMarkerConfig,
    SectionSet,
    load_cases,
    load_gold,
    load_laws,
    segment_sections,
)
from .extract import (
    ExtractionRecord,
    LawMatchConfig,
    extract_all,
    extract_citation_sentences,
    extract_meta,
    match_law,
)
from .kgraph import (
    CCC,
    CDC,
    HeteroGraph,
    MetaPath,
    NodeType,
    RelationType,
    build_graph,
    connected_components,
    graph_stats,
    meta_path_neighbors,
)
from .retrieval import AggMode, QuerySection, RUNS, aggregate, evaluate, run_all
from .synth import GeneratorParams, generate_corpus

__version__ = "0.1.0"

__all__ = [
    "AggMode", "Bm25Index", "Bm25Params", "CCC", "CDC", "CaseRecord", "ExtractionRecord",
    "GeneratorParams", "GoldLabel", "HeteroGraph", "LawEntry", "LawMatchConfig", "MetaPath",
    "NodeType", "QuerySection", "RUNS", "RelationType", "ScoredDoc", "SectionMarkerConfig",
    "SectionSet", "aggregate", "build_graph", "build_index", "connected_components", "evaluate",
    "extract_all", "extract_citation_sentences", "extract_meta", "generate_corpus", "graph_stats",
    "load_cases", "load_gold", "load_laws", "match_law", "meta_path_neighbors", "run_all", "score",
    "segment_sections", "tokenize", "top_k",
]
