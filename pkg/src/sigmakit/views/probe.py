"""Probe suffixes: temporary completions that make a prefix checkable."""

from __future__ import annotations

from sigmakit.smiles.parser import ParseResult, parse, parse_smiles
from sigmakit.smiles.tokenizer import Token, TokenKind, tokenize

METHYL = "C"


class ProbeError(ValueError):
    """The prefix cannot be completed by ring closures and methyl caps."""


def _label_text(label: int) -> str:
    return str(label) if label < 10 else f"%{label:02d}"


def _needs_cap(tokens: list[Token]) -> bool:
    # writers never end on a branch, so a trailing ')' marks an open attachment
    return bool(tokens) and tokens[-1].kind in (TokenKind.BRANCH_CLOSE, TokenKind.BOND)


def probe_suffix(prefix: str) -> str:
    """Text that, appended to ``prefix``, yields a Complete molecule.

    Open constructs are closed left to right: a dangling bond gets a methyl,
    each open ring is closed by a direct ring bond from the current atom
    (extended by methyls when a direct bond would be a self-loop, a duplicate
    or exceed valence), open branches are filled and closed, and a trailing
    branch or bond is capped with a methyl.

    Raises:
        ProbeError: for irrecoverable prefixes.
    """
    tokens = tokenize(prefix)
    result = parse(tokens)
    if result.irrecoverable:
        raise ProbeError(f"{prefix!r} is irrecoverable: {result.reason}")
    if result.complete and not _needs_cap(tokens):
        return ""
    probe = ""
    if tokens and tokens[-1].kind is TokenKind.BOND:
        probe += METHYL
    state = parse_smiles(prefix + probe)
    rings = state.partial.open_rings if state.partial else ()
    for label, _, _ in rings:
        for extra in ("", METHYL, METHYL * 2):
            trial = probe + extra + _label_text(label)
            if not parse_smiles(prefix + trial).irrecoverable:
                probe = trial
                break
        else:
            raise ProbeError(f"cannot close ring {label} in {prefix!r}")
    state = parse_smiles(prefix + probe)
    branches = state.partial.open_branches if state.partial else 0
    for _ in range(branches):
        if (prefix + probe).endswith("("):
            probe += METHYL
        probe += ")"
    if _needs_cap(tokenize(prefix + probe)):
        probe += METHYL
    final: ParseResult = parse_smiles(prefix + probe)
    if not final.complete:
        raise ProbeError(f"probe {probe!r} leaves {prefix!r} {final.status.value}")
    return probe


def probe_complete(prefix: str | list[Token]) -> str:
    """``prefix`` followed by its probe suffix."""
    text = prefix if isinstance(prefix, str) else "".join(t.text for t in prefix)
    return text + probe_suffix(text)


def strip_probe(probed: str, probe: str) -> str:
    """Undo ``probe_complete``: remove the trailing ``probe`` text exactly."""
    if not probed.endswith(probe):
        raise ProbeError(f"{probed!r} does not end with probe {probe!r}")
    return probed[:len(probed) - len(probe)] if probe else probed
