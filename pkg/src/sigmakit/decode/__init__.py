"""Beam decoders and next-token scorers."""

from sigmakit.decode.beam import (
    Beam,
    BeamEntry,
    ScorerFailure,
    SearchResult,
    Status,
    StepStats,
    complete_keys,
    isobeam_search,
    iso_filter,
    standard_beam_search,
    step_expand,
)
from sigmakit.decode.scorer import ModelScorer, NGramScorer, Scorer, ngram_fit, ngram_score

__all__ = [
    "Beam",
    "BeamEntry",
    "ModelScorer",
    "NGramScorer",
    "Scorer",
    "ScorerFailure",
    "SearchResult",
    "Status",
    "StepStats",
    "complete_keys",
    "iso_filter",
    "isobeam_search",
    "ngram_fit",
    "ngram_score",
    "standard_beam_search",
    "step_expand",
]
