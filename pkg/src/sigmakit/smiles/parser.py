"""Incremental SMILES parser with three-way completeness classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from sigmakit.smiles.graph import (
    ANCHOR,
    Atom,
    Bond,
    BondOrder,
    MolGraph,
    allowed_valences,
    implicit_hydrogens,
    valence_ok,
)
from sigmakit.smiles.tokenizer import (
    SubsetViolation,
    Token,
    TokenKind,
    parse_bracket,
    ring_label,
    tokenize,
)

_BOND_SYMBOLS = {"-": BondOrder.SINGLE, "=": BondOrder.DOUBLE, "#": BondOrder.TRIPLE, ":": BondOrder.AROMATIC}

_ATOM_KINDS = frozenset(
    {TokenKind.ATOM, TokenKind.AROMATIC_ATOM, TokenKind.BRACKET_ATOM, TokenKind.WILDCARD_ANCHOR}
)
_RING_KINDS = frozenset({TokenKind.RING_DIGIT, TokenKind.RING_PERCENT})

# token kinds legal after the previous token kind (None = start of string)
_FOLLOWS: dict[str | None, frozenset[TokenKind]] = {
    None: _ATOM_KINDS,
    "atom": _ATOM_KINDS | _RING_KINDS | {TokenKind.BOND, TokenKind.BRANCH_OPEN, TokenKind.BRANCH_CLOSE},
    "bond": _ATOM_KINDS | _RING_KINDS,
    "open": _ATOM_KINDS | {TokenKind.BOND},
    "close": _ATOM_KINDS | {TokenKind.BOND, TokenKind.BRANCH_OPEN, TokenKind.BRANCH_CLOSE},
}


class ParseStatus(Enum):
    COMPLETE = "complete"
    INCOMPLETE = "incomplete"
    IRRECOVERABLE = "irrecoverable"


@dataclass(frozen=True)
class PartialState:
    """What is still open at the end of an incomplete prefix."""

    open_rings: tuple[tuple[int, int, str | None], ...]  # (label, atom, bond symbol), opening order
    open_branches: int
    pending_bond: str | None
    current_atom: int | None
    free_valence: tuple[int, ...]


@dataclass(frozen=True)
class ParseResult:
    status: ParseStatus
    graph: MolGraph | None = None
    partial: PartialState | None = None
    reason: str | None = None
    position: int | None = None

    @property
    def complete(self) -> bool:
        return self.status is ParseStatus.COMPLETE

    @property
    def incomplete(self) -> bool:
        return self.status is ParseStatus.INCOMPLETE

    @property
    def irrecoverable(self) -> bool:
        return self.status is ParseStatus.IRRECOVERABLE


class _Irrecoverable(Exception):
    def __init__(self, reason: str, position: int) -> None:
        super().__init__(reason)
        self.reason = reason
        self.position = position


@dataclass
class _Builder:
    elements: list[str] = field(default_factory=list)
    aromatic: list[bool] = field(default_factory=list)
    charges: list[int] = field(default_factory=list)
    explicit_h: list[int | None] = field(default_factory=list)
    used: list[int] = field(default_factory=list)
    parent: list[int] = field(default_factory=list)
    bonds: list[tuple[int, int, BondOrder]] = field(default_factory=list)
    pairs: set[tuple[int, int]] = field(default_factory=set)
    rings: dict[int, tuple[int, str | None, int]] = field(default_factory=dict)
    branches: list[int] = field(default_factory=list)
    prev: int | None = None
    pending: str | None = None
    last: str | None = None
    anchors: int = 0

    def check_valence(self, i: int, pos: int) -> None:
        h = self.explicit_h[i] or 0
        if not valence_ok(self.elements[i], self.charges[i], self.used[i] + h):
            raise _Irrecoverable(f"valence exceeded on {self.elements[i]}", pos)

    def free(self, i: int) -> int:
        vals = allowed_valences(self.elements[i], self.charges[i])
        return max(vals) - self.used[i] - (self.explicit_h[i] or 0) if vals else 0

    def implicit_order(self, a: int, b: int) -> BondOrder:
        return BondOrder.AROMATIC if self.aromatic[a] and self.aromatic[b] else BondOrder.SINGLE

    def add_bond(self, a: int, b: int, order: BondOrder, pos: int) -> None:
        pair = (min(a, b), max(a, b))
        if a == b:
            raise _Irrecoverable("ring closure onto the same atom", pos)
        if pair in self.pairs:
            raise _Irrecoverable("duplicate bond between one atom pair", pos)
        self.pairs.add(pair)
        self.bonds.append((a, b, order))

    def feed(self, tok: Token) -> None:
        pos = tok.position
        if tok.kind not in _FOLLOWS[self.last]:
            raise _Irrecoverable(f"{tok.kind.value} {tok.text!r} not allowed here", pos)
        kind = tok.kind
        if kind in _ATOM_KINDS:
            self._atom(tok)
            self.last = "atom"
        elif kind is TokenKind.BOND:
            order = _BOND_SYMBOLS[tok.text]
            assert self.prev is not None
            if self.free(self.prev) < order.valence:
                raise _Irrecoverable("bond exceeds valence of preceding atom", pos)
            self.pending = tok.text
            self.last = "bond"
        elif kind is TokenKind.BRANCH_OPEN:
            assert self.prev is not None
            if self.free(self.prev) < 1:
                raise _Irrecoverable("branch opened on a saturated atom", pos)
            self.branches.append(self.prev)
            self.last = "open"
        elif kind is TokenKind.BRANCH_CLOSE:
            if not self.branches:
                raise _Irrecoverable("branch close without matching open", pos)
            self.prev = self.branches.pop()
            self.last = "close"
        else:
            self._ring(tok)
            self.last = "atom"

    def _atom(self, tok: Token) -> None:
        pos = tok.position
        if tok.kind is TokenKind.WILDCARD_ANCHOR:
            element, arom, h, charge = ANCHOR, False, 0, 0
            self.anchors += 1
            if self.anchors > 1:
                raise _Irrecoverable("more than one anchor atom", pos)
        elif tok.kind is TokenKind.BRACKET_ATOM:
            element, arom, h, charge = parse_bracket(tok.text)
        else:
            arom = tok.kind is TokenKind.AROMATIC_ATOM
            element = tok.text.upper() if arom else tok.text
            h, charge = None, 0
        idx = len(self.elements)
        self.elements.append(element)
        self.aromatic.append(arom)
        self.charges.append(charge)
        self.explicit_h.append(h)
        self.used.append(0)
        self.parent.append(-1 if self.prev is None else self.prev)
        self.check_valence(idx, pos)
        if self.prev is not None:
            order = _BOND_SYMBOLS[self.pending] if self.pending else self.implicit_order(self.prev, idx)
            self.add_bond(self.prev, idx, order, pos)
            self.used[self.prev] += order.valence
            self.used[idx] += order.valence
            self.check_valence(self.prev, pos)
            self.check_valence(idx, pos)
        self.pending = None
        self.prev = idx

    def _ring(self, tok: Token) -> None:
        pos = tok.position
        label = ring_label(tok)
        a = self.prev
        assert a is not None
        if label in self.rings:
            partner, sym, reserved = self.rings.pop(label)
            if sym and self.pending and sym != self.pending:
                raise _Irrecoverable("conflicting ring-closure bond symbols", pos)
            chosen = sym or self.pending
            order = _BOND_SYMBOLS[chosen] if chosen else self.implicit_order(partner, a)
            self.add_bond(partner, a, order, pos)
            self.used[partner] += order.valence - reserved
            self.used[a] += order.valence
            self.check_valence(partner, pos)
            self.check_valence(a, pos)
        else:
            reserved = _BOND_SYMBOLS[self.pending].valence if self.pending else 1
            self.rings[label] = (a, self.pending, reserved)
            self.used[a] += reserved
            self.check_valence(a, pos)
        self.pending = None

    def graph(self) -> MolGraph:
        atoms = []
        for i, el in enumerate(self.elements):
            h = self.explicit_h[i]
            if h is None:
                h = implicit_hydrogens(el, self.aromatic[i], self.used[i])
                assert h is not None
            atoms.append(Atom(el, self.aromatic[i], self.charges[i], h))
        return MolGraph(tuple(atoms), tuple(Bond(a, b, o) for a, b, o in self.bonds))

    def partial(self) -> PartialState:
        rings = tuple((label, atom, sym) for label, (atom, sym, _) in self.rings.items())
        return PartialState(
            open_rings=rings,
            open_branches=len(self.branches),
            pending_bond=self.pending,
            current_atom=self.prev,
            free_valence=tuple(self.free(i) for i in range(len(self.elements))),
        )


def parse(tokens: list[Token]) -> ParseResult:
    """Classify a token sequence as Complete, Incomplete or Irrecoverable."""
    b = _Builder()
    try:
        for tok in tokens:
            b.feed(tok)
    except _Irrecoverable as exc:
        return ParseResult(ParseStatus.IRRECOVERABLE, reason=exc.reason, position=exc.position)
    end = tokens[-1].position + len(tokens[-1].text) if tokens else 0
    if not b.elements or b.rings or b.branches or b.pending or b.last == "open":
        return ParseResult(ParseStatus.INCOMPLETE, partial=b.partial())
    graph = b.graph()
    ring_atoms = graph.ring_atoms()
    stray = {i for i, arom in enumerate(b.aromatic) if arom and i not in ring_atoms}
    if not stray:
        return ParseResult(ParseStatus.COMPLETE, graph=graph)
    if stray == {b.prev}:
        # the current atom may still open a ring
        return ParseResult(ParseStatus.INCOMPLETE, partial=b.partial())
    return ParseResult(ParseStatus.IRRECOVERABLE, reason="aromatic atom outside any ring", position=end)


@lru_cache(maxsize=200_000)
def parse_smiles(text: str) -> ParseResult:
    """Tokenize and parse; subset violations are reported as Irrecoverable."""
    try:
        tokens = tokenize(text)
    except SubsetViolation as exc:
        return ParseResult(ParseStatus.IRRECOVERABLE, reason=str(exc), position=exc.position)
    return parse(tokens)


class SmilesError(ValueError):
    """A string did not parse to a complete molecule."""


def mol_from_smiles(text: str) -> MolGraph:
    """Parse ``text`` and return its graph, raising SmilesError unless Complete."""
    result = parse_smiles(text)
    if not result.complete:
        detail = result.reason or "incomplete"
        raise SmilesError(f"{text!r}: {result.status.value} ({detail})")
    assert result.graph is not None
    return result.graph
