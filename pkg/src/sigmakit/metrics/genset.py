"""Set-level generation metrics; molecule identity is the canonical key."""

from __future__ import annotations

import warnings
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from sigmakit.smiles.canon import CanonicalKey, canonical_key
from sigmakit.smiles.fingerprint import circular_fingerprint, tanimoto
from sigmakit.smiles.graph import MolGraph
from sigmakit.smiles.parser import parse_smiles
from sigmakit.smiles.scaffold import murcko_scaffold


class EmptySetWarning(UserWarning):
    """A ratio was requested over an empty set and reported as 0."""


@dataclass(frozen=True)
class GenSet:
    """Generated strings; everything else is derived from them."""

    raw: tuple[str, ...] = field(default_factory=tuple)

    @classmethod
    def of(cls, strings: Iterable[str]) -> GenSet:
        return cls(tuple(strings))

    @cached_property
    def valid(self) -> tuple[MolGraph, ...]:
        out = []
        for s in self.raw:
            r = parse_smiles(s)
            if r.complete:
                out.append(r.graph)
        return tuple(out)

    @cached_property
    def keys(self) -> Counter:
        return Counter(canonical_key(g) for g in self.valid)

    @cached_property
    def scaffold_keys(self) -> frozenset[CanonicalKey]:
        return frozenset(canonical_key(murcko_scaffold(g)) for g in self.valid)


def _ratio(num: int, den: int, what: str) -> float:
    if den == 0:
        warnings.warn(f"{what} of an empty set is reported as 0", EmptySetWarning, stacklevel=3)
        return 0.0
    return num / den


def validity(g: GenSet) -> float:
    return _ratio(len(g.valid), len(g.raw), "validity")


def uniqueness(g: GenSet) -> float:
    return _ratio(len(g.keys), len(g.valid), "uniqueness")


def train_keys(smiles: Iterable[str]) -> frozenset[CanonicalKey]:
    """Keys of the complete molecules in a training corpus."""
    out = set()
    for s in smiles:
        r = parse_smiles(s)
        if r.complete:
            out.add(canonical_key(r.graph))
    return frozenset(out)


def novelty(g: GenSet, known: frozenset[CanonicalKey], unique: bool = False) -> float:
    """Share of valid molecules absent from ``known``.

    The default counts over the valid multiset; ``unique=True`` counts over
    distinct keys instead.
    """
    if unique:
        return _ratio(sum(1 for k in g.keys if k not in known), len(g.keys), "novelty")
    return _ratio(sum(c for k, c in g.keys.items() if k not in known), len(g.valid), "novelty")


def intdiv(g: GenSet, off_diagonal: bool = False, radius: int = 2, nbits: int = 1024) -> float:
    """One minus the mean pairwise Tanimoto similarity over valid molecules.

    The default averages over all ``n * n`` ordered pairs including self-pairs;
    ``off_diagonal=True`` averages over the ``n * (n - 1)`` distinct pairs.
    """
    n = len(g.valid)
    if n == 0:
        raise ValueError("intdiv needs at least one valid molecule")
    fps = [circular_fingerprint(m, radius, nbits) for m in g.valid]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if off_diagonal and i == j:
                continue
            total += tanimoto(fps[i], fps[j])
    if off_diagonal:
        if n < 2:
            raise ValueError("off-diagonal intdiv needs two valid molecules")
        return 1.0 - total / (n * (n - 1))
    return 1.0 - total / (n * n)


def scaffold_count(g: GenSet) -> int:
    """Distinct scaffold keys; acyclic molecules share the empty-scaffold bucket."""
    return len(g.scaffold_keys)


def fcd(generated: Sequence[str], reference: Sequence[str]) -> float:
    """Frechet distance over a pretrained chemistry network's activations.

    Raises:
        NotImplementedError: always; the pretrained network is not bundled.
    """
    raise NotImplementedError("FCD needs the pretrained ChemNet weights, which this package does not ship")


def fingerprint_matrix(g: GenSet, radius: int = 2, nbits: int = 1024) -> np.ndarray:
    """Pairwise Tanimoto matrix of the valid molecules (for inspection)."""
    fps = [circular_fingerprint(m, radius, nbits) for m in g.valid]
    return np.array([[tanimoto(a, b) for b in fps] for a in fps])
