"""Canonical ranking and the structural identity key.

Ranks come from iterative neighbourhood refinement over atom labels. Ties that
survive refinement are resolved exhaustively: every atom of the first tied
class is individualized in turn, refined again, and the search recurses. The
canonical string is the lexicographically smallest serialization over all
leaves, which makes it independent of the input atom order.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

from sigmakit.smiles.graph import MolGraph
from sigmakit.smiles.writer import write_ordered

Serializer = Callable[[MolGraph, list[int]], str]


def _initial_invariants(g: MolGraph) -> list[tuple]:
    inv = []
    for i, atom in enumerate(g.atoms):
        orders = tuple(sorted(g.bonds[k].order for _, k in g.neighbors(i)))
        inv.append((g.degree(i), atom.label, orders))
    return inv


def _to_ranks(keys: list) -> list[int]:
    distinct = sorted(set(keys))
    index = {k: r for r, k in enumerate(distinct)}
    return [index[k] for k in keys]


def refine(g: MolGraph, ranks: list[int]) -> list[int]:
    """Refine ranks until the partition is equitable.

    A class never merges with another and the relative order of existing
    classes is kept, so the result is a refinement of ``ranks``.
    """
    while True:
        keys = [
            (ranks[i], tuple(sorted((g.bonds[k].order, ranks[n]) for n, k in g.neighbors(i))))
            for i in range(len(g.atoms))
        ]
        new = _to_ranks(keys)
        if len(set(new)) == len(set(ranks)):
            return new
        ranks = new


def invariant_ranks(g: MolGraph) -> list[int]:
    """Ranks after neighbourhood refinement alone (ties possible)."""
    return refine(g, _to_ranks(_initial_invariants(g)))


def _individualize(ranks: list[int], atom: int) -> list[int]:
    # split ``atom`` just ahead of its tied class; doubling keeps room for it
    doubled = [2 * r + 1 for r in ranks]
    doubled[atom] -= 1
    return _to_ranks(doubled)


def _search(g: MolGraph, ranks: list[int], serialize: Serializer, best: list[str | None]) -> None:
    counts: dict[int, list[int]] = {}
    for i, r in enumerate(ranks):
        counts.setdefault(r, []).append(i)
    tied = [cls for r, cls in sorted(counts.items()) if len(cls) > 1]
    if not tied:
        text = serialize(g, ranks)
        if best[0] is None or text < best[0]:
            best[0] = text
        return
    for atom in tied[0]:
        _search(g, refine(g, _individualize(ranks, atom)), serialize, best)


def minimal_serialization(g: MolGraph, serialize: Serializer) -> str:
    """Smallest string ``serialize`` produces over all canonical labellings."""
    if not g.atoms:
        return ""
    best: list[str | None] = [None]
    _search(g, invariant_ranks(g), serialize, best)
    assert best[0] is not None
    return best[0]


def _plain(g: MolGraph, ranks: list[int]) -> str:
    root = min(range(len(ranks)), key=ranks.__getitem__)
    return write_ordered(g, ranks, root)


def _anchor_last(g: MolGraph, ranks: list[int]) -> str:
    candidates = [i for i in range(len(ranks)) if not g.atoms[i].is_anchor] or list(range(len(ranks)))
    root = min(candidates, key=ranks.__getitem__)
    return write_ordered(g, ranks, root, anchor_last=True)


def write_canonical(g: MolGraph) -> str:
    """Canonical SMILES of ``g``; identical for every atom permutation."""
    return _cached_canonical(g)


@lru_cache(maxsize=100_000)
def _cached_canonical(g: MolGraph) -> str:
    return minimal_serialization(g, _plain)


def write_canonical_anchor_last(g: MolGraph) -> str:
    """Canonical serialization with the anchor atom forced to the end."""
    return minimal_serialization(g, _anchor_last)


@dataclass(frozen=True, slots=True, order=True)
class CanonicalKey:
    key: str

    def __str__(self) -> str:
        return self.key


def canonical_key(g: MolGraph) -> CanonicalKey:
    """Traversal-invariant structural identity of ``g``."""
    return CanonicalKey(write_canonical(g))
