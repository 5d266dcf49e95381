"""patch_lineage: reconstruct how patches evolved before they were merged.

Clusters patch revisions found in mailing-list archives, links them to their
final commits in a repository, and ships the evaluation harness (pairwise
indices, parameter sweep, baselines) to measure how well that works.
"""

from .model import (
    ClusterSet,
    Corpus,
    Diff,
    FileDiff,
    Hunk,
    Patch,
    PatchId,
    SeriesInfo,
    SimilarityConfig,
    SimilarityScore,
    canonical_order,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterSet",
    "Corpus",
    "Diff",
    "FileDiff",
    "Hunk",
    "Patch",
    "PatchId",
    "SeriesInfo",
    "SimilarityConfig",
    "SimilarityScore",
    "canonical_order",
    "__version__",
]
