"""Patronage-network analytics: ingest career records, build the three
networks, and run the rank-prediction, faction, and hub/authority studies."""

from .dataset import Dataset, load_dataset, summarize, write_dataset
from .graphs import (
    GraphKind,
    PatronageGraph,
    build_home_origin,
    build_overlap,
    build_promotion,
    ego_subgraph,
    truncate_before,
    undirect,
)
from .model import (
    Gender,
    JobSpell,
    Politician,
    PromotionEvent,
    YearMonth,
    final_rank,
    overlap_months,
)
from .synth import SynthConfig, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "Gender",
    "GraphKind",
    "JobSpell",
    "PatronageGraph",
    "Politician",
    "PromotionEvent",
    "SynthConfig",
    "YearMonth",
    "build_home_origin",
    "build_overlap",
    "build_promotion",
    "ego_subgraph",
    "final_rank",
    "generate_synthetic",
    "load_dataset",
    "overlap_months",
    "summarize",
    "truncate_before",
    "undirect",
    "write_dataset",
    "__version__",
]
