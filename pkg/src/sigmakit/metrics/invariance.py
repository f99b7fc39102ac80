"""Trajectory invariance score and hidden-state alignment heatmaps."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sigmakit.model.model import SigmaModel


def tis(model: SigmaModel, pairs: list[tuple[str, str]], batch_size: int = 256) -> float:
    """Mean cosine distance between encoded prefixes of each pair (range [0, 2])."""
    if not pairs:
        raise ValueError("no pairs to score")
    total = 0.0
    for start in range(0, len(pairs), batch_size):
        chunk = pairs[start:start + batch_size]
        a = model.encode_prefixes([p[0] for p in chunk])
        b = model.encode_prefixes([p[1] for p in chunk])
        total += float(np.sum(1.0 - np.clip((a * b).sum(1), -1.0, 1.0)))
    return total / len(pairs)


@dataclass(frozen=True)
class HeatmapMatrix:
    rows: list[str]
    cols: list[str]
    cells: np.ndarray

    def block_mean(self, n_rows: int, n_cols: int) -> float:
        """Mean similarity over the top-left ``n_rows x n_cols`` block."""
        return float(self.cells[:n_rows, :n_cols].mean())

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([""] + self.cols)
            for label, row in zip(self.rows, self.cells):
                w.writerow([label] + [f"{x:.6f}" for x in row])


def heatmap(model: SigmaModel, s1: str, s2: str) -> HeatmapMatrix:
    """Cosine similarity of hidden states at every token position of two strings."""
    t1, h1 = model.hidden_states(s1)
    t2, h2 = model.hidden_states(s2)
    h1 = h1 / np.linalg.norm(h1, axis=1, keepdims=True)
    h2 = h2 / np.linalg.norm(h2, axis=1, keepdims=True)
    return HeatmapMatrix(t1, t2, np.clip(h1 @ h2.T, -1.0, 1.0))


def export_embeddings(model: SigmaModel, texts: list[str], path: str | Path) -> np.ndarray:
    """Write encoded prefixes as CSV rows ``text, e0, e1, ...`` for external plotting."""
    emb = model.encode_prefixes(texts)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["text"] + [f"e{i}" for i in range(emb.shape[1])])
        for t, row in zip(texts, emb):
            w.writerow([t] + [repr(float(x)) for x in row])
    return emb
