"""Morgan-style circular fingerprints and Tanimoto similarity."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from sigmakit.smiles.graph import MolGraph


def _stable_hash(obj: tuple) -> int:
    # builtin hash() is salted per process; fingerprints must be reproducible
    return int.from_bytes(hashlib.blake2b(repr(obj).encode(), digest_size=8).digest(), "little")


@dataclass(frozen=True)
class Fingerprint:
    bits: np.ndarray
    radius: int

    @property
    def nbits(self) -> int:
        return int(self.bits.shape[0])

    def on_bits(self) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.bits).tolist())


def circular_fingerprint(g: MolGraph, radius: int = 2, nbits: int = 1024) -> Fingerprint:
    """Fold atom-environment identifiers up to ``radius`` bonds into ``nbits`` bits."""
    ring = g.ring_atoms()
    ids = [
        _stable_hash((a.label, g.degree(i), i in ring))
        for i, a in enumerate(g.atoms)
    ]
    found = set(ids)
    for r in range(1, radius + 1):
        ids = [
            _stable_hash((r, ids[i], tuple(sorted((int(g.bonds[k].order), ids[n]) for n, k in g.neighbors(i)))))
            for i in range(len(g.atoms))
        ]
        found.update(ids)
    bits = np.zeros(nbits, dtype=bool)
    for x in found:
        bits[x % nbits] = True
    bits.setflags(write=False)
    return Fingerprint(bits, radius)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|a & b| / |a | b|; two empty fingerprints count as identical."""
    if a.nbits != b.nbits:
        raise ValueError(f"fingerprint widths differ: {a.nbits} vs {b.nbits}")
    union = int(np.count_nonzero(a.bits | b.bits))
    if union == 0:
        return 1.0
    return int(np.count_nonzero(a.bits & b.bits)) / union
