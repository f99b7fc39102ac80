"""Verified positive view pairs and in-batch structural negatives."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from sigmakit.smiles.canon import CanonicalKey, canonical_key, minimal_serialization
from sigmakit.smiles.graph import MolGraph
from sigmakit.smiles.parser import parse_smiles
from sigmakit.smiles.writer import write_ordered, write_random
from sigmakit.views.partition import (
    PartitionedMol,
    cuttable_bonds,
    partition,
    strip_anchor,
)
from sigmakit.views.probe import ProbeError, probe_suffix

RETRY_BUDGET = 16


class ViewError(ValueError):
    """No verified pair could be built for a molecule."""

    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class ViewPair:
    prefix_u: str
    prefix_v: str
    suffix: str
    parent_key: CanonicalKey
    probe: str | None = None
    source_id: str | None = None
    probe_v: str | None = None

    @property
    def text_u(self) -> str:
        return self.prefix_u + self.suffix

    @property
    def text_v(self) -> str:
        return self.prefix_v + self.suffix

    def to_record(self) -> dict:
        return {
            "prefix_u": self.prefix_u,
            "prefix_v": self.prefix_v,
            "suffix": self.suffix,
            "parent_key": self.parent_key.key,
            "probe": self.probe,
            "probe_v": self.probe_v,
            "source_id": self.source_id,
        }

    @classmethod
    def from_record(cls, rec: dict) -> ViewPair:
        return cls(
            prefix_u=rec["prefix_u"],
            prefix_v=rec["prefix_v"],
            suffix=rec["suffix"],
            parent_key=CanonicalKey(rec["parent_key"]),
            probe=rec.get("probe"),
            source_id=rec.get("source_id"),
            probe_v=rec.get("probe_v"),
        )


class PairCheck(str, Enum):
    OK = "ok"
    SAME_PREFIX = "same-prefix"
    INCOMPLETE_U = "incomplete-u"
    INCOMPLETE_V = "incomplete-v"
    KEY_MISMATCH_U = "key-mismatch-u"
    KEY_MISMATCH_V = "key-mismatch-v"


def check_pair(p: ViewPair) -> PairCheck:
    """Reason code for the Dual Consistency check (``OK`` when it holds)."""
    if p.prefix_u == p.prefix_v:
        return PairCheck.SAME_PREFIX
    ru = parse_smiles(p.text_u)
    if not ru.complete:
        return PairCheck.INCOMPLETE_U
    rv = parse_smiles(p.text_v)
    if not rv.complete:
        return PairCheck.INCOMPLETE_V
    if canonical_key(ru.graph) != p.parent_key:
        return PairCheck.KEY_MISMATCH_U
    if canonical_key(rv.graph) != p.parent_key:
        return PairCheck.KEY_MISMATCH_V
    return PairCheck.OK


def verify_pair(p: ViewPair) -> bool:
    """Both concatenations rebuild the parent graph and the prefixes differ."""
    return check_pair(p) is PairCheck.OK


def random_prefix(part: PartitionedMol, rng: np.random.Generator) -> str:
    return strip_anchor(write_random(part.prefix_graph, rng, anchor_last=True), part.join_text)


def _probe_or_none(prefix: str) -> str | None:
    try:
        return probe_suffix(prefix)
    except ProbeError:
        return None


def make_views(
    g: MolGraph,
    rng: np.random.Generator,
    bond: int | None = None,
    retries: int = RETRY_BUDGET,
    prefix_side: str = "smaller",
) -> ViewPair:
    """Canonical and randomized serializations of one prefix fragment.

    Both prefixes end where the anchor was, so the suffix string is shared
    byte for byte.

    Raises:
        ViewError: ``no-cuttable-bond``, ``exhausted-retries`` or
            ``verification-failed``.
    """
    if bond is None:
        bonds = cuttable_bonds(g)
        if not bonds:
            raise ViewError("no-cuttable-bond", "molecule has no cuttable bond")
        bond = int(bonds[rng.integers(len(bonds))])
    part = partition(g, bond, prefix_side=prefix_side)
    prefix_u = part.canonical_prefix_text()
    suffix = part.suffix_text()
    for _ in range(retries):
        prefix_v = random_prefix(part, rng)
        if prefix_v != prefix_u:
            break
    else:
        raise ViewError("exhausted-retries", f"no divergent traversal of {prefix_u!r} in {retries} draws")
    pair = ViewPair(prefix_u, prefix_v, suffix, part.parent_key, probe=_probe_or_none(prefix_u), probe_v=_probe_or_none(prefix_v))
    code = check_pair(pair)
    if code is not PairCheck.OK:
        raise ViewError("verification-failed", f"{pair}: {code.value}")
    return pair


@dataclass(frozen=True)
class NegativeSet:
    prefixes: tuple[str, ...]
    mask: tuple[bool, ...]

    @property
    def usable(self) -> list[str]:
        return [p for p, m in zip(self.prefixes, self.mask) if m]


def negative_ok(prefix: str, suffix: str, parent_key: CanonicalKey) -> bool:
    r = parse_smiles(prefix + suffix)
    return r.complete and canonical_key(r.graph) != parent_key


def sample_negatives(batch: list[ViewPair], anchor_index: int, count: int) -> NegativeSet:
    """In-batch prefixes that turn the anchor's suffix into a different molecule.

    Candidates are scanned cyclically from the anchor; incompatible ones are
    kept but masked, and the set is padded with masked blanks up to ``count``.
    """
    if not batch:
        raise ValueError("empty batch")
    anchor = batch[anchor_index]
    usable: list[str] = []
    rejected: list[str] = []
    n = len(batch)
    for step in range(1, n):
        if len(usable) == count:
            break
        cand = batch[(anchor_index + step) % n].prefix_u
        if negative_ok(cand, anchor.suffix, anchor.parent_key):
            usable.append(cand)
        else:
            rejected.append(cand)
    prefixes = usable + rejected[: count - len(usable)]
    prefixes += [""] * (count - len(prefixes))
    mask = [True] * len(usable) + [False] * (count - len(usable))
    return NegativeSet(tuple(prefixes), tuple(mask))


def anchored_rooted_text(g: MolGraph, root: int) -> str:
    """Canonical serialization of ``g`` with the DFS forced to start at ``root``."""
    return minimal_serialization(g, lambda graph, ranks: write_ordered(graph, ranks, root))
