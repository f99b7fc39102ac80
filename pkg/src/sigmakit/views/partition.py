"""Cutting a molecule at an acyclic single bond into anchored halves."""

from __future__ import annotations

from dataclasses import dataclass

from sigmakit.smiles.canon import CanonicalKey, canonical_key, minimal_serialization, write_canonical_anchor_last
from sigmakit.smiles.graph import ANCHOR, Atom, Bond, BondOrder, MolGraph
from sigmakit.smiles.writer import bond_symbol, write_ordered

MIN_FRAGMENT_ATOMS = 2
ANCHOR_TEXT = "[*]"


class PartitionError(ValueError):
    """The requested bond cannot be cut."""


def cuttable_bonds(g: MolGraph) -> list[int]:
    """Acyclic single bonds whose removal leaves two fragments of >= 2 heavy atoms.

    Only single bonds qualify because the anchor atom has valence one.
    """
    if g.anchor_index is not None:
        raise PartitionError("graph already carries an anchor")
    bridges = g.bridges()
    out = []
    for k in sorted(bridges):
        bond = g.bonds[k]
        if bond.order is not BondOrder.SINGLE:
            continue
        side = g.component(bond.a, removed_bond=k)
        heavy = sum(1 for i in side if not g.atoms[i].is_anchor)
        if heavy >= MIN_FRAGMENT_ATOMS and g.num_heavy - heavy >= MIN_FRAGMENT_ATOMS:
            out.append(k)
    return out


def _anchored(g: MolGraph, side: set[int], attach: int, order: BondOrder) -> MolGraph:
    sub, index = g.subgraph(side)
    atoms = sub.atoms + (Atom(ANCHOR),)
    bonds = sub.bonds + (Bond(index[attach], len(sub.atoms), order),)
    return MolGraph(atoms, bonds)


def _strip_anchor_bond(g: MolGraph) -> MolGraph:
    anchor = g.anchor_index
    assert anchor is not None
    keep = [i for i in range(len(g.atoms)) if i != anchor]
    sub, _ = g.subgraph(keep)
    return sub


@dataclass(frozen=True)
class PartitionedMol:
    """Two anchored fragments of one parent molecule.

    ``join_text`` is the bond symbol that must sit between the prefix and
    suffix strings so their concatenation restores the cut bond.
    """

    prefix_graph: MolGraph
    suffix_graph: MolGraph
    cut_bond: int
    parent_key: CanonicalKey
    join_text: str

    def reattach(self) -> MolGraph:
        """Glue the fragments back together at their anchors."""
        pa = self.prefix_graph.anchor_index
        sa = self.suffix_graph.anchor_index
        assert pa is not None and sa is not None
        (pu, pk), = self.prefix_graph.neighbors(pa)
        (sv, _), = self.suffix_graph.neighbors(sa)
        order = self.prefix_graph.bonds[pk].order
        left = _strip_anchor_bond(self.prefix_graph)
        right = _strip_anchor_bond(self.suffix_graph)
        pu -= pu > pa
        sv -= sv > sa
        offset = len(left.atoms)
        bonds = left.bonds + tuple(Bond(b.a + offset, b.b + offset, b.order) for b in right.bonds)
        return MolGraph(left.atoms + right.atoms, bonds + (Bond(pu, sv + offset, order),))

    def suffix_text(self) -> str:
        """Suffix serialization rooted at its attachment atom, anchor removed."""
        g = self.suffix_graph
        anchor = g.anchor_index
        assert anchor is not None

        def rooted(graph: MolGraph, ranks: list[int]) -> str:
            return write_ordered(graph, ranks, anchor)

        text = minimal_serialization(g, rooted)
        assert text.startswith(ANCHOR_TEXT)
        return text[len(ANCHOR_TEXT):]

    def canonical_prefix_text(self) -> str:
        return strip_anchor(write_canonical_anchor_last(self.prefix_graph), self.join_text)


def strip_anchor(text: str, join_text: str) -> str:
    """Replace the trailing anchor (and its bond symbol) by ``join_text``."""
    if not text.endswith(ANCHOR_TEXT):
        raise PartitionError(f"anchor is not the last atom of {text!r}")
    body = text[: -len(ANCHOR_TEXT)]
    if body and body[-1] in "-=#:":
        body = body[:-1]
    return body + join_text


def partition(g: MolGraph, bond: int, prefix_side: str = "smaller") -> PartitionedMol:
    """Cut ``bond`` and place an anchor on each severed endpoint.

    ``prefix_side`` picks which fragment becomes the prefix: ``"smaller"``
    (fewer heavy atoms, ties broken by canonical text), ``"a"`` or ``"b"``
    for the fragment holding the bond's first or second atom.
    """
    if bond not in cuttable_bonds(g):
        raise PartitionError(f"bond {bond} is not cuttable")
    b = g.bonds[bond]
    side_a = g.component(b.a, removed_bond=bond)
    side_b = set(range(len(g.atoms))) - side_a
    frag_a = _anchored(g, side_a, b.a, b.order)
    frag_b = _anchored(g, side_b, b.b, b.order)
    if prefix_side == "smaller":
        key_a = (len(side_a), write_canonical_anchor_last(frag_a))
        key_b = (len(side_b), write_canonical_anchor_last(frag_b))
        a_first = key_a <= key_b
    elif prefix_side in ("a", "b"):
        a_first = prefix_side == "a"
    else:
        raise ValueError(f"unknown prefix_side {prefix_side!r}")
    (pre, pre_atom), (suf, suf_atom) = ((frag_a, b.a), (frag_b, b.b)) if a_first else ((frag_b, b.b), (frag_a, b.a))
    both_aromatic = g.atoms[pre_atom].aromatic and g.atoms[suf_atom].aromatic
    return PartitionedMol(
        prefix_graph=pre,
        suffix_graph=suf,
        cut_bond=bond,
        parent_key=canonical_key(g),
        join_text=bond_symbol(b.order, both_aromatic),
    )
