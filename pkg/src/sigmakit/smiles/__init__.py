"""SMILES subset: tokenizer, parser, writers, structural identity, scaffolds, fingerprints."""

from sigmakit.smiles.canon import CanonicalKey, canonical_key, write_canonical, write_canonical_anchor_last
from sigmakit.smiles.graph import ANCHOR, Atom, Bond, BondOrder, GraphError, MolGraph
from sigmakit.smiles.parser import (
    ParseResult,
    ParseStatus,
    PartialState,
    SmilesError,
    mol_from_smiles,
    parse,
    parse_smiles,
)
from sigmakit.smiles.tokenizer import SubsetViolation, Token, TokenKind, tokenize
from sigmakit.smiles.writer import write_ordered, write_random

__all__ = [
    "ANCHOR",
    "Atom",
    "Bond",
    "BondOrder",
    "CanonicalKey",
    "GraphError",
    "MolGraph",
    "ParseResult",
    "ParseStatus",
    "PartialState",
    "SmilesError",
    "SubsetViolation",
    "Token",
    "TokenKind",
    "canonical_key",
    "mol_from_smiles",
    "parse",
    "parse_smiles",
    "tokenize",
    "write_canonical",
    "write_canonical_anchor_last",
    "write_ordered",
    "write_random",
]
