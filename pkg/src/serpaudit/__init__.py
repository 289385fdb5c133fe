"""serpaudit: an offline-testable audit harness for web search results.

Coordinates fleets of identical synthetic agents issuing the same queries,
extracts ranked organic results from captured pages, quantifies
cross-agent / cross-engine / cross-browser discrepancies with set- and
rank-aware similarity metrics, classifies result sources, and tests effect
significance with grouped permutation tests.
"""

__version__ = "0.1.0"

from .metrics import (
    RboParams,
    SimilarityScore,
    agreement_at_depth,
    jaccard_overall,
    jaccard_topk,
    rbo,
    rbo_oracle,
)
from .rankings import ListOrigin, RankedList

__all__ = [
    "ListOrigin",
    "RankedList",
    "RboParams",
    "SimilarityScore",
    "agreement_at_depth",
    "jaccard_overall",
    "jaccard_topk",
    "rbo",
    "rbo_oracle",
    "__version__",
]
