"""SMILES serialization: ordered DFS writer, canonical and randomized variants."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from sigmakit.smiles.graph import BondOrder, GraphError, MolGraph


def atom_text(g: MolGraph, i: int) -> str:
    atom = g.atoms[i]
    if atom.is_anchor:
        return "[*]"
    if g.has_default_hydrogens(i):
        return atom.symbol
    parts = ["[", atom.symbol]
    if atom.hydrogens:
        parts.append("H" if atom.hydrogens == 1 else f"H{atom.hydrogens}")
    if atom.charge:
        sign = "+" if atom.charge > 0 else "-"
        parts.append(sign if abs(atom.charge) == 1 else f"{sign}{abs(atom.charge)}")
    parts.append("]")
    return "".join(parts)


def bond_text(g: MolGraph, k: int) -> str:
    """Bond symbol the writer must emit for bond ``k`` (empty when implicit)."""
    bond = g.bonds[k]
    both_aromatic = g.atoms[bond.a].aromatic and g.atoms[bond.b].aromatic
    return bond_symbol(bond.order, both_aromatic)


def bond_symbol(order: BondOrder, both_aromatic: bool) -> str:
    if order is BondOrder.SINGLE:
        return "-" if both_aromatic else ""
    if order is BondOrder.AROMATIC:
        return "" if both_aromatic else ":"
    return "=" if order is BondOrder.DOUBLE else "#"


def _ring_label(n: int) -> str:
    return str(n) if n < 10 else f"%{n:02d}"


def _anchor_side(g: MolGraph, visited: set[int], start: int, anchor: int) -> bool:
    """True if ``anchor`` is reachable from ``start`` avoiding visited atoms."""
    if start == anchor:
        return True
    stack = [start]
    seen = {start}
    while stack:
        i = stack.pop()
        for n, _ in g.neighbors(i):
            if n == anchor:
                return True
            if n not in seen and n not in visited:
                seen.add(n)
                stack.append(n)
    return False


def write_ordered(
    g: MolGraph,
    priority: Sequence[float],
    root: int,
    anchor_last: bool = False,
) -> str:
    """Depth-first serialization visiting neighbours in ascending ``priority``.

    With ``anchor_last`` the branch leading to the anchor atom is always taken
    last, so the anchor is the final atom of the string and sits on the main
    chain.
    """
    n = len(g.atoms)
    if n == 0:
        return ""
    anchor = g.anchor_index if anchor_last else None

    # pass 1: DFS tree, child order and ring-closure bonds
    order: list[int] = []
    children: list[list[int]] = [[] for _ in range(n)]
    tree_bonds: set[int] = set()
    ring_open: list[list[int]] = [[] for _ in range(n)]
    ring_close: list[list[int]] = [[] for _ in range(n)]
    visited: set[int] = set()
    used: set[int] = set()

    def ordered_neighbors(i: int) -> list[tuple[int, int]]:
        nbrs = sorted(g.neighbors(i), key=lambda nk: priority[nk[0]])
        if anchor is not None:
            fresh = [nk for nk in nbrs if nk[0] not in visited]
            late = [nk for nk in fresh if _anchor_side(g, visited, nk[0], anchor)]
            early = [nk for nk in nbrs if nk not in late]
            nbrs = early + late
        return nbrs

    stack: list[tuple[int, list[tuple[int, int]]]] = []
    visited.add(root)
    order.append(root)
    stack.append((root, ordered_neighbors(root)))
    while stack:
        i, pending = stack[-1]
        if not pending:
            stack.pop()
            continue
        j, k = pending.pop(0)
        if k in used:
            continue
        used.add(k)
        if j in visited:
            ring_open[j].append(k)
            ring_close[i].append(k)
            continue
        tree_bonds.add(k)
        children[i].append(j)
        visited.add(j)
        order.append(j)
        stack.append((j, ordered_neighbors(j)))
    if len(visited) != n:
        raise GraphError("cannot serialize a disconnected graph")

    # pass 2: emit text; ring labels are reused once closed
    out: list[str] = []
    free_labels: list[int] = []
    next_label = 1
    label_of: dict[int, int] = {}

    def emit(i: int) -> None:
        nonlocal next_label
        out.append(atom_text(g, i))
        for k in ring_close[i]:
            label = label_of.pop(k)
            out.append(_ring_label(label))
            free_labels.append(label)
            free_labels.sort()
        for k in ring_open[i]:
            if free_labels:
                label = free_labels.pop(0)
            else:
                label = next_label
                next_label += 1
            label_of[k] = label
            out.append(bond_text(g, k) + _ring_label(label))

    def walk(i: int) -> None:
        emit(i)
        kids = children[i]
        for idx, c in enumerate(kids):
            k = g.bond_between(i, c)
            assert k is not None
            last = idx == len(kids) - 1
            if not last:
                out.append("(")
            out.append(bond_text(g, k))
            walk(c)
            if not last:
                out.append(")")

    # ring closures must be emitted in visit order, so close labels follow
    # the order the opening atoms were visited
    position = {a: p for p, a in enumerate(order)}
    for i in range(n):
        ring_close[i].sort(key=lambda k: position[g.bonds[k].other(i)])
        ring_open[i].sort(key=lambda k: position[g.bonds[k].other(i)])
    walk(root)
    return "".join(out)


def write_random(g: MolGraph, rng: np.random.Generator, root: int | None = None, anchor_last: bool = False) -> str:
    """Randomized SMILES: random root (unless given) and random branch order.

    Raises:
        IndexError: when ``root`` is out of range.
    """
    n = len(g.atoms)
    if root is not None and not 0 <= root < n:
        raise IndexError(f"root {root} out of range for {n} atoms")
    if root is None:
        choices = [i for i in range(n) if not (anchor_last and g.atoms[i].is_anchor)] or list(range(n))
        root = int(choices[rng.integers(len(choices))])
    priority = rng.permutation(n).tolist()
    return write_ordered(g, priority, root, anchor_last=anchor_last)
