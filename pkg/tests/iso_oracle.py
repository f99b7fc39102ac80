"""Brute-force graph isomorphism used as an independent test oracle.

Deliberately shares no code with the canonicalizer: candidates are matched
atom by atom with backtracking, pruned only by label and degree.
"""

from __future__ import annotations

from sigmakit.smiles.graph import MolGraph


def _adjacency(g: MolGraph) -> list[dict[int, int]]:
    adj: list[dict[int, int]] = [{} for _ in g.atoms]
    for b in g.bonds:
        adj[b.a][b.b] = int(b.order)
        adj[b.b][b.a] = int(b.order)
    return adj


def isomorphic(g1: MolGraph, g2: MolGraph) -> bool:
    n = len(g1.atoms)
    if n != len(g2.atoms) or len(g1.bonds) != len(g2.bonds):
        return False
    a1, a2 = _adjacency(g1), _adjacency(g2)
    lab1 = [(a.label, len(a1[i])) for i, a in enumerate(g1.atoms)]
    lab2 = [(a.label, len(a2[i])) for i, a in enumerate(g2.atoms)]
    if sorted(lab1) != sorted(lab2):
        return False
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(i: int) -> bool:
        if i == n:
            return True
        for j in range(n):
            if j in used or lab1[i] != lab2[j]:
                continue
            ok = all(
                (mapping[k] in a2[j]) == (k in a1[i]) and (k not in a1[i] or a1[i][k] == a2[j][mapping[k]])
                for k in mapping
            )
            if not ok:
                continue
            mapping[i] = j
            used.add(j)
            if extend(i + 1):
                return True
            del mapping[i]
            used.discard(j)
        return False

    return extend(0)
