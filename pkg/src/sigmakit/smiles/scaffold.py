"""Bemis-Murcko scaffolds by iterative removal of terminal atoms."""

from __future__ import annotations

from sigmakit.smiles.graph import MolGraph

EMPTY_SCAFFOLD = MolGraph((), ())


def murcko_scaffold(g: MolGraph) -> MolGraph:
    """Ring systems plus the linkers between them; side chains stripped.

    Acyclic molecules give ``EMPTY_SCAFFOLD``.
    """
    if not g.ring_bonds():
        return EMPTY_SCAFFOLD
    alive = set(range(len(g.atoms)))
    degree = {i: g.degree(i) for i in alive}
    terminal = [i for i in alive if degree[i] <= 1]
    while terminal:
        i = terminal.pop()
        if i not in alive:
            continue
        alive.discard(i)
        for n, _ in g.neighbors(i):
            if n in alive:
                degree[n] -= 1
                if degree[n] == 1:
                    terminal.append(n)
    default_h = [i for i in alive if g.has_default_hydrogens(i)]
    sub, index = g.subgraph(alive)
    return sub.with_default_hydrogens(index[i] for i in default_h)
