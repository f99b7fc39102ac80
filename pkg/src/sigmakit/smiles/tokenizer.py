"""Lossless tokenizer for the supported SMILES subset."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class TokenKind(str, Enum):
    ATOM = "atom"
    AROMATIC_ATOM = "aromatic-atom"
    BRACKET_ATOM = "bracket-atom"
    BOND = "bond"
    BRANCH_OPEN = "branch-open"
    BRANCH_CLOSE = "branch-close"
    RING_DIGIT = "ring-digit"
    RING_PERCENT = "ring-percent"
    WILDCARD_ANCHOR = "wildcard-anchor"


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    text: str
    position: int


class SubsetViolation(ValueError):
    """Input uses a SMILES feature outside the supported subset."""

    def __init__(self, char: str, position: int, detail: str = "") -> None:
        self.char = char
        self.position = position
        msg = f"unsupported symbol {char!r} at position {position}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


_BRACKET = re.compile(
    r"\[(?P<sym>\*|Cl|Br|[BCNOPSFI]|[bcnops])(?P<h>H\d?)?(?P<chg>\+\+?|--?|[+-]\d)?\]"
)

_SINGLE: dict[str, TokenKind] = {
    "B": TokenKind.ATOM, "C": TokenKind.ATOM, "N": TokenKind.ATOM, "O": TokenKind.ATOM,
    "P": TokenKind.ATOM, "S": TokenKind.ATOM, "F": TokenKind.ATOM, "I": TokenKind.ATOM,
    "b": TokenKind.AROMATIC_ATOM, "c": TokenKind.AROMATIC_ATOM, "n": TokenKind.AROMATIC_ATOM,
    "o": TokenKind.AROMATIC_ATOM, "p": TokenKind.AROMATIC_ATOM, "s": TokenKind.AROMATIC_ATOM,
    "-": TokenKind.BOND, "=": TokenKind.BOND, "#": TokenKind.BOND, ":": TokenKind.BOND,
    "(": TokenKind.BRANCH_OPEN, ")": TokenKind.BRANCH_CLOSE,
    "*": TokenKind.WILDCARD_ANCHOR,
}

_REASONS = {
    "@": "stereochemistry is not supported",
    "/": "double-bond stereo is not supported",
    "\\": "double-bond stereo is not supported",
    ".": "multi-fragment input is not supported",
}


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; concatenating token texts gives ``text`` back.

    Raises:
        SubsetViolation: on stereo markers, isotopes, dots, unknown elements or
            any other character outside the grammar.
    """
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in "CB" and i + 1 < n and text[i : i + 2] in ("Cl", "Br"):
            tokens.append(Token(TokenKind.ATOM, text[i : i + 2], i))
            i += 2
        elif ch in _SINGLE:
            tokens.append(Token(_SINGLE[ch], ch, i))
            i += 1
        elif ch.isdigit():
            tokens.append(Token(TokenKind.RING_DIGIT, ch, i))
            i += 1
        elif ch == "%":
            if i + 2 < n and text[i + 1 : i + 3].isdigit():
                tokens.append(Token(TokenKind.RING_PERCENT, text[i : i + 3], i))
                i += 3
            else:
                raise SubsetViolation(ch, i, "'%' must be followed by two digits")
        elif ch == "[":
            end = text.find("]", i)
            if end < 0:
                raise SubsetViolation(ch, i, "unterminated bracket atom")
            body = text[i : end + 1]
            m = _BRACKET.fullmatch(body)
            if m is None:
                bad = _first_bad_bracket_char(body)
                raise SubsetViolation(body[bad], i + bad, "bracket atom outside the subset")
            kind = TokenKind.WILDCARD_ANCHOR if m["sym"] == "*" else TokenKind.BRACKET_ATOM
            tokens.append(Token(kind, body, i))
            i = end + 1
        else:
            raise SubsetViolation(ch, i, _REASONS.get(ch, ""))
    return tokens


def _first_bad_bracket_char(body: str) -> int:
    for j, ch in enumerate(body[1:], start=1):
        if ch in "@/\\." or ch.isdigit() and j == 1:
            return j
    return 1


def parse_bracket(text: str) -> tuple[str, bool, int, int]:
    """Decode a bracket atom into (element, aromatic, hydrogens, charge)."""
    m = _BRACKET.fullmatch(text)
    if m is None:
        raise ValueError(f"not a supported bracket atom: {text!r}")
    sym = m["sym"]
    aromatic = sym.islower() and sym != "*"
    element = sym.upper() if aromatic and len(sym) == 1 else sym
    h = m["h"]
    hcount = 0 if not h else (int(h[1:]) if len(h) > 1 else 1)
    chg = m["chg"] or ""
    if chg in ("+", "-"):
        charge = 1 if chg == "+" else -1
    elif chg in ("++", "--"):
        charge = 2 if chg == "++" else -2
    elif chg:
        charge = int(chg)
    else:
        charge = 0
    return element, aromatic, hcount, charge


def ring_label(token: Token) -> int:
    return int(token.text[1:]) if token.kind is TokenKind.RING_PERCENT else int(token.text)
