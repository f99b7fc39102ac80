"""Generation metrics, invariance score, heatmaps and diversity curves."""

from sigmakit.metrics.diversity import CurveRow, diversity_curve, write_curve
from sigmakit.metrics.genset import (
    EmptySetWarning,
    GenSet,
    fcd,
    intdiv,
    novelty,
    scaffold_count,
    train_keys,
    uniqueness,
    validity,
)
from sigmakit.metrics.invariance import HeatmapMatrix, export_embeddings, heatmap, tis

__all__ = [
    "CurveRow",
    "EmptySetWarning",
    "GenSet",
    "HeatmapMatrix",
    "diversity_curve",
    "export_embeddings",
    "fcd",
    "heatmap",
    "intdiv",
    "novelty",
    "scaffold_count",
    "tis",
    "train_keys",
    "uniqueness",
    "validity",
    "write_curve",
]
