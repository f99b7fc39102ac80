"""Annotated molecular graphs and the valence model used for validity."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Final, Iterable


class BondOrder(IntEnum):
    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4

    @property
    def valence(self) -> int:
        # aromatic bonds count as single; the pi electron is handled per atom
        return 1 if self is BondOrder.AROMATIC else int(self)


ANCHOR: Final = "*"

ORGANIC_SUBSET: Final = frozenset({"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"})
AROMATIC_SUBSET: Final = frozenset({"b", "c", "n", "o", "p", "s"})

VALENCES: Final[dict[str, tuple[int, ...]]] = {
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
    ANCHOR: (1,),
}

# used for deterministic ordering of atom labels
ATOMIC_NUMBER: Final[dict[str, int]] = {
    ANCHOR: 0, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9,
    "P": 15, "S": 16, "Cl": 17, "Br": 35, "I": 53,
}

_ELECTRON_RICH: Final = frozenset({"N", "O", "P", "S", "F", "Cl", "Br", "I"})


def allowed_valences(element: str, charge: int = 0) -> tuple[int, ...]:
    """Valences an atom may take, shifted for formal charge.

    Electron-rich elements gain one bond per positive charge and lose one per
    negative charge (N+ behaves like C, O- like F). Carbon loses a bond for
    either sign; boron mirrors the electron-rich rule with the sign flipped.
    """
    base = VALENCES[element]
    if charge == 0 or element == ANCHOR:
        return base
    if element in _ELECTRON_RICH:
        shifted = tuple(v + charge for v in base)
    elif element == "C":
        shifted = tuple(v - abs(charge) for v in base)
    else:
        shifted = tuple(v - charge for v in base)
    return tuple(v for v in shifted if v >= 0)


@dataclass(frozen=True, slots=True)
class Atom:
    element: str
    aromatic: bool = False
    charge: int = 0
    hydrogens: int = 0

    @property
    def is_anchor(self) -> bool:
        return self.element == ANCHOR

    @property
    def label(self) -> tuple[int, int, int, int]:
        return (ATOMIC_NUMBER[self.element], int(self.aromatic), self.charge, self.hydrogens)

    @property
    def symbol(self) -> str:
        return self.element.lower() if self.aromatic else self.element


@dataclass(frozen=True, slots=True)
class Bond:
    a: int
    b: int
    order: BondOrder

    def other(self, i: int) -> int:
        return self.b if i == self.a else self.a


def implicit_hydrogens(element: str, aromatic: bool, bond_valence: int) -> int | None:
    """Implicit H count for an organic-subset atom, or None on valence overflow."""
    for v in VALENCES[element]:
        if v >= bond_valence:
            return max(0, v - bond_valence - 1) if aromatic else v - bond_valence
    return None


def valence_ok(element: str, charge: int, used: int) -> bool:
    vals = allowed_valences(element, charge)
    return bool(vals) and used <= max(vals)


class GraphError(ValueError):
    """Raised when a MolGraph violates its structural invariants."""


@dataclass(frozen=True)
class MolGraph:
    """Immutable annotated molecular graph.

    Hydrogen counts are stored per atom (implicit ones resolved at parse time),
    so two graphs compare by heavy-atom labels plus hydrogens.
    """

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    _adj: tuple[tuple[tuple[int, int], ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
        for k, bond in enumerate(self.bonds):
            adj[bond.a].append((bond.b, k))
            adj[bond.b].append((bond.a, k))
        object.__setattr__(self, "_adj", tuple(tuple(x) for x in adj))

    @classmethod
    def build(cls, atoms: Iterable[Atom], bonds: Iterable[tuple[int, int, BondOrder]]) -> MolGraph:
        return cls(tuple(atoms), tuple(Bond(a, b, BondOrder(o)) for a, b, o in bonds))

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def num_heavy(self) -> int:
        return sum(1 for a in self.atoms if not a.is_anchor)

    @property
    def anchor_index(self) -> int | None:
        for i, a in enumerate(self.atoms):
            if a.is_anchor:
                return i
        return None

    def neighbors(self, i: int) -> tuple[tuple[int, int], ...]:
        """(neighbor atom, bond index) pairs of atom ``i``."""
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def bond_between(self, i: int, j: int) -> int | None:
        for n, k in self._adj[i]:
            if n == j:
                return k
        return None

    def bond_valence(self, i: int) -> int:
        return sum(self.bonds[k].order.valence for _, k in self._adj[i])

    def is_connected(self, removed_bond: int | None = None) -> bool:
        return len(self.component(0, removed_bond)) == len(self.atoms) if self.atoms else True

    def component(self, start: int, removed_bond: int | None = None) -> set[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for n, k in self._adj[i]:
                if k != removed_bond and n not in seen:
                    seen.add(n)
                    queue.append(n)
        return seen

    def ring_bonds(self) -> frozenset[int]:
        """Bonds lying on at least one cycle (bridges are excluded)."""
        return frozenset(range(len(self.bonds))) - self.bridges()

    def bridges(self) -> frozenset[int]:
        n = len(self.atoms)
        disc = [-1] * n
        low = [0] * n
        out: set[int] = set()
        timer = 0
        for root in range(n):
            if disc[root] != -1:
                continue
            disc[root] = low[root] = timer
            timer += 1
            stack = [(root, -1, iter(self._adj[root]))]
            while stack:
                v, parent_bond, it = stack[-1]
                advanced = False
                for w, k in it:
                    if k == parent_bond:
                        continue
                    if disc[w] == -1:
                        disc[w] = low[w] = timer
                        timer += 1
                        stack.append((w, k, iter(self._adj[w])))
                        advanced = True
                        break
                    low[v] = min(low[v], disc[w])
                if not advanced:
                    stack.pop()
                    if stack:
                        u = stack[-1][0]
                        low[u] = min(low[u], low[v])
                        if low[v] > disc[u]:
                            out.add(parent_bond)
        return frozenset(out)

    def ring_atoms(self) -> frozenset[int]:
        rb = self.ring_bonds()
        return frozenset(i for k in rb for i in (self.bonds[k].a, self.bonds[k].b))

    def validate(self) -> None:
        """Check the structural invariants, raising GraphError on failure."""
        seen_pairs = set()
        for bond in self.bonds:
            if bond.a == bond.b:
                raise GraphError(f"self-loop on atom {bond.a}")
            pair = (min(bond.a, bond.b), max(bond.a, bond.b))
            if pair in seen_pairs:
                raise GraphError(f"duplicate bond {pair}")
            seen_pairs.add(pair)
        if not self.is_connected():
            raise GraphError("graph is disconnected")
        if sum(a.is_anchor for a in self.atoms) > 1:
            raise GraphError("more than one anchor atom")
        for i, atom in enumerate(self.atoms):
            used = self.bond_valence(i) + atom.hydrogens
            if not valence_ok(atom.element, atom.charge, used):
                raise GraphError(f"valence exceeded on atom {i} ({atom.element})")

    def relabel(self, perm: list[int]) -> MolGraph:
        """Return the graph with atom ``i`` moved to position ``perm[i]``."""
        atoms: list[Atom | None] = [None] * len(self.atoms)
        for i, atom in enumerate(self.atoms):
            atoms[perm[i]] = atom
        bonds = [Bond(perm[b.a], perm[b.b], b.order) for b in self.bonds]
        return MolGraph(tuple(atoms), tuple(bonds))  # type: ignore[arg-type]

    def has_default_hydrogens(self, i: int) -> bool:
        """True when atom ``i`` can be written without brackets."""
        atom = self.atoms[i]
        if atom.is_anchor or atom.charge or atom.element not in ORGANIC_SUBSET:
            return False
        return implicit_hydrogens(atom.element, atom.aromatic, self.bond_valence(i)) == atom.hydrogens

    def subgraph(self, keep: Iterable[int]) -> tuple[MolGraph, dict[int, int]]:
        """Induced subgraph; returns the graph and the old->new index map."""
        order = sorted(keep)
        index = {old: new for new, old in enumerate(order)}
        atoms = tuple(self.atoms[i] for i in order)
        bonds = tuple(
            Bond(index[b.a], index[b.b], b.order)
            for b in self.bonds
            if b.a in index and b.b in index
        )
        return MolGraph(atoms, bonds), index

    def with_default_hydrogens(self, which: Iterable[int]) -> MolGraph:
        """Recompute implicit hydrogen counts for the given atoms."""
        atoms = list(self.atoms)
        for i in which:
            a = atoms[i]
            h = implicit_hydrogens(a.element, a.aromatic, self.bond_valence(i))
            if h is None:
                raise GraphError(f"valence exceeded on atom {i} ({a.element})")
            atoms[i] = Atom(a.element, a.aromatic, a.charge, h)
        return MolGraph(tuple(atoms), self.bonds)
