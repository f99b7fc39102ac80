"""Seeded synthetic molecule generators.

Two generators live here: a tiny-molecule sampler used for exhaustive
identity checks, and a fragment assembler that produces drug-like corpora
for mining, n-gram fitting and training when no external corpus is at hand.
"""

from __future__ import annotations

import numpy as np

from sigmakit.smiles.canon import write_canonical
from sigmakit.smiles.graph import (
    Atom,
    Bond,
    BondOrder,
    MolGraph,
    allowed_valences,
    implicit_hydrogens,
)
from sigmakit.smiles.parser import mol_from_smiles

RING_FRAGMENTS = (
    "c1ccccc1", "c1ccccc1", "c1ccncc1", "c1ccsc1", "c1ccoc1", "c1cn[nH]c1",
    "C1CCCCC1", "C1CCNCC1", "C1COCCN1", "C1CC1", "C1CCCC1", "c1cncnc1",
)
LINKER_FRAGMENTS = ("C", "CC", "C(=O)N", "NC(=O)", "O", "N", "S(=O)(=O)", "C(=O)", "OC", "C=C")
SUBSTITUENTS = (
    "C", "C", "CC", "CCC", "C(C)C", "O", "N", "F", "Cl", "Br", "OC",
    "C(=O)O", "C#N", "C(F)(F)F", "C(=O)C", "N(C)C", "S(C)", "C(=O)N",
)


def join(g1: MolGraph, i: int, g2: MolGraph, j: int, order: BondOrder = BondOrder.SINGLE) -> MolGraph:
    """Bond atom ``i`` of ``g1`` to atom ``j`` of ``g2`` (hydrogens adjusted)."""
    offset = len(g1.atoms)
    atoms = list(g1.atoms) + list(g2.atoms)
    bonds = list(g1.bonds) + [Bond(b.a + offset, b.b + offset, b.order) for b in g2.bonds]
    bonds.append(Bond(i, j + offset, order))
    for src, idx, shift in ((g1, i, 0), (g2, j, offset)):
        a = src.atoms[idx]
        h = a.hydrogens - order.valence
        if not a.aromatic and src.has_default_hydrogens(idx):
            # hypervalent atoms such as sulfonyl S move to their next valence
            h = implicit_hydrogens(a.element, False, src.bond_valence(idx) + order.valence)
        if h is None or h < 0:
            raise ValueError(f"atom {idx} cannot take another {order.name.lower()} bond")
        atoms[idx + shift] = Atom(a.element, a.aromatic, a.charge, h)
    return MolGraph(tuple(atoms), tuple(bonds))


def _sites(g: MolGraph, need: int = 1) -> list[int]:
    sites = []
    for i, a in enumerate(g.atoms):
        if not g.has_default_hydrogens(i):
            continue
        if a.aromatic:
            ok = a.hydrogens >= need
        else:
            ok = implicit_hydrogens(a.element, False, g.bond_valence(i) + need) is not None
        if ok:
            sites.append(i)
    return sites


def drug_like(rng: np.random.Generator, max_rings: int = 3) -> MolGraph:
    """Assemble rings, linkers and substituents into one connected molecule."""
    n_rings = int(rng.integers(1, max_rings + 1))
    mol = mol_from_smiles(RING_FRAGMENTS[rng.integers(len(RING_FRAGMENTS))])
    for _ in range(n_rings - 1):
        ring = mol_from_smiles(RING_FRAGMENTS[rng.integers(len(RING_FRAGMENTS))])
        site = _sites(mol)
        if not site:
            break
        a = int(rng.choice(site))
        if rng.random() < 0.7:
            linker = mol_from_smiles(LINKER_FRAGMENTS[rng.integers(len(LINKER_FRAGMENTS))])
            lsites = _sites(linker)
            end = max(lsites) if lsites else 0
            mol = join(mol, a, linker, 0)
            a = len(mol.atoms) - len(linker.atoms) + end
            if a not in _sites(mol):
                continue
        mol = join(mol, a, ring, int(rng.choice(_sites(ring))))
    for _ in range(int(rng.integers(0, 4))):
        sub = mol_from_smiles(SUBSTITUENTS[rng.integers(len(SUBSTITUENTS))])
        site = _sites(mol)
        if not site:
            break
        # substituents attach through their first written atom
        mol = join(mol, int(rng.choice(site)), sub, 0)
    return mol


def drug_like_corpus(n: int, seed: int = 0, max_rings: int = 3) -> list[str]:
    """``n`` distinct canonical SMILES of assembled drug-like molecules."""
    rng = np.random.default_rng(seed)
    seen: dict[str, None] = {}
    while len(seen) < n:
        seen.setdefault(write_canonical(drug_like(rng, max_rings)), None)
    return list(seen)


_SMALL_ELEMENTS = ("C", "C", "C", "C", "N", "N", "O", "O", "S", "F", "Cl")


def small_molecule(rng: np.random.Generator, max_atoms: int = 8) -> MolGraph:
    """Random valence-respecting graph with at most ``max_atoms`` heavy atoms.

    Trees are grown atom by atom; extra ring bonds, multiple bonds, charges
    and aromatic six-rings are mixed in so the sample covers every label kind.
    """
    if max_atoms >= 6 and rng.random() < 0.25:
        ring = "".join(rng.choice(["c", "c", "c", "n"], size=5))
        mol = mol_from_smiles(f"c1{ring}1")
        for _ in range(int(rng.integers(0, max_atoms - 5))):
            sub = mol_from_smiles(str(rng.choice(["C", "O", "N", "F", "Cl", "C", "S"])))
            site = _sites(mol)
            if not site:
                break
            mol = join(mol, int(rng.choice(site)), sub, 0)
        return mol

    n = int(rng.integers(1, max_atoms + 1))
    elements = [str(rng.choice(_SMALL_ELEMENTS)) for _ in range(n)]
    charges = [0] * n
    for i, el in enumerate(elements):
        if el in ("N", "O") and rng.random() < 0.08:
            charges[i] = 1 if el == "N" else -1
    cap = [max(allowed_valences(el, c)) for el, c in zip(elements, charges)]
    used = [0] * n
    bonds: dict[tuple[int, int], int] = {}
    for j in range(1, n):
        options = [i for i in range(j) if used[i] < cap[i]]
        if not options or cap[j] < 1:
            return small_molecule(rng, max_atoms)
        i = int(rng.choice(options))
        room = min(cap[i] - used[i], cap[j] - used[j], 3)
        order = 1 if room == 1 or rng.random() < 0.75 else int(rng.integers(2, room + 1))
        bonds[(i, j)] = order
        used[i] += order
        used[j] += order
    for _ in range(int(rng.integers(0, 3))):
        if n < 3:
            break
        i, j = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
        if (i, j) in bonds or used[i] >= cap[i] or used[j] >= cap[j]:
            continue
        bonds[(i, j)] = 1
        used[i] += 1
        used[j] += 1
    atoms = []
    for i, el in enumerate(elements):
        if charges[i]:
            h = cap[i] - used[i]
        else:
            h = implicit_hydrogens(el, False, used[i])
            assert h is not None
        atoms.append(Atom(el, False, charges[i], h))
    return MolGraph(tuple(atoms), tuple(Bond(i, j, BondOrder(o)) for (i, j), o in bonds.items()))
