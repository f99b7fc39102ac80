"""Valid-yield and scaffold-diversity curves of the two beam decoders."""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from sigmakit.decode.beam import isobeam_search, standard_beam_search
from sigmakit.decode.scorer import Scorer
from sigmakit.metrics.genset import GenSet, scaffold_count

CURVE_HEADER = ("K", "valid_count_std", "valid_count_iso", "scaf_std", "scaf_iso")


@dataclass(frozen=True)
class CurveRow:
    K: int
    valid_count_std: int
    valid_count_iso: int
    scaf_std: int
    scaf_iso: int


def diversity_curve(
    scorer: Scorer,
    K_list: Sequence[int],
    T_max: int,
    branch_k: int | None = None,
    finished_blocks_live: bool = True,
) -> list[CurveRow]:
    """Run both decoders at each beam width and count valid outputs and scaffolds."""
    if list(K_list) != sorted(K_list):
        raise ValueError("K_list must be sorted ascending")
    rows = []
    for K in K_list:
        std = GenSet.of(standard_beam_search(scorer, K, T_max, branch_k).texts)
        iso = GenSet.of(isobeam_search(scorer, K, T_max, branch_k, finished_blocks_live=finished_blocks_live).texts)
        rows.append(CurveRow(K, len(std.valid), len(iso.valid), scaffold_count(std), scaffold_count(iso)))
    return rows


def write_curve(path: str | Path, rows: Sequence[CurveRow]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CURVE_HEADER)
        for r in rows:
            w.writerow([r.K, r.valid_count_std, r.valid_count_iso, r.scaf_std, r.scaf_iso])
