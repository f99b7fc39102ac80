"""Corpus-level pair mining with a manifest of what was kept and skipped."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

import sigmakit
from sigmakit.smiles.io import read_smi
from sigmakit.smiles.parser import parse_smiles
from sigmakit.views.pairs import RETRY_BUDGET, ViewError, ViewPair, make_views, verify_pair
from sigmakit.views.partition import cuttable_bonds

log = logging.getLogger(__name__)


@dataclass
class MiningConfig:
    epochs: int = 1
    enumerate_all_cuts: bool = False
    retries: int = RETRY_BUDGET
    prefix_side: str = "smaller"


@dataclass
class MiningResult:
    pairs: list[ViewPair]
    manifest: dict = field(default_factory=dict)


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def mine_dataset(corpus_path: str | Path, config: MiningConfig, rng: np.random.Generator) -> MiningResult:
    """Build verified view pairs for every molecule of a ``.smi`` corpus.

    Each epoch pass samples one cut per molecule (or every cut when
    ``enumerate_all_cuts`` is set). Malformed lines are logged with their line
    number and counted; mining continues past them.
    """
    records = list(read_smi(corpus_path))
    counts = {
        "molecules": 0,
        "malformed": 0,
        "attempts": 0,
        "pairs": 0,
        "skipped_no_cuttable_bond": 0,
        "skipped_exhausted_retries": 0,
        "skipped_verification": 0,
    }
    malformed_lines: list[int] = []
    graphs = []
    for rec in records:
        result = parse_smiles(rec.smiles)
        if not result.complete:
            log.warning("line %d: cannot parse %r (%s)", rec.line_no, rec.smiles, result.reason or "incomplete")
            counts["malformed"] += 1
            malformed_lines.append(rec.line_no)
            continue
        counts["molecules"] += 1
        graphs.append((rec, result.graph))

    pairs: list[ViewPair] = []
    for _ in range(config.epochs):
        for rec, g in graphs:
            bonds = cuttable_bonds(g)
            if not bonds:
                counts["attempts"] += 1
                counts["skipped_no_cuttable_bond"] += 1
                continue
            chosen = bonds if config.enumerate_all_cuts else [int(bonds[rng.integers(len(bonds))])]
            for bond in chosen:
                counts["attempts"] += 1
                try:
                    pair = make_views(g, rng, bond=bond, retries=config.retries, prefix_side=config.prefix_side)
                except ViewError as exc:
                    key = "skipped_exhausted_retries" if exc.code == "exhausted-retries" else "skipped_verification"
                    counts[key] += 1
                    continue
                source = rec.ident or f"line{rec.line_no}"
                pairs.append(dataclasses.replace(pair, source_id=source))
                counts["pairs"] += 1
    manifest = {
        "counts": counts,
        "acceptance_rate": counts["pairs"] / counts["attempts"] if counts["attempts"] else 0.0,
        "malformed_lines": malformed_lines,
        "config": asdict(config),
        "input": {"path": str(corpus_path), "sha256": file_digest(corpus_path)},
        "version": sigmakit.__version__,
    }
    return MiningResult(pairs, manifest)


def write_pairs(path: str | Path, pairs: list[ViewPair]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps(p.to_record(), sort_keys=True) + "\n")


def read_pairs(path: str | Path) -> list[ViewPair]:
    with open(path, encoding="utf-8") as fh:
        return [ViewPair.from_record(json.loads(line)) for line in fh if line.strip()]


def write_dataset(out_stem: str | Path, result: MiningResult) -> tuple[Path, Path]:
    """Write ``<stem>.pairs.jsonl`` and ``<stem>.manifest.json``."""
    stem = Path(out_stem)
    pairs_path = stem.with_name(stem.name + ".pairs.jsonl")
    manifest_path = stem.with_name(stem.name + ".manifest.json")
    write_pairs(pairs_path, result.pairs)
    manifest_path.write_text(json.dumps(result.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return pairs_path, manifest_path


def reverify(pairs: list[ViewPair]) -> list[int]:
    """Indices of pairs that fail re-verification from their raw strings."""
    return [i for i, p in enumerate(pairs) if not verify_pair(p)]
