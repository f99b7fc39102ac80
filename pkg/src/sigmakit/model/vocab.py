"""Token vocabulary with fixed special ids."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from sigmakit.smiles.tokenizer import tokenize

PAD, BOS, EOS = "[PAD]", "[BOS]", "[EOS]"
PAD_ID, BOS_ID, EOS_ID = 0, 1, 2
SPECIALS = (PAD, BOS, EOS)

# always present so a vocab built from a small corpus still covers the grammar
BASE_TOKENS = (
    "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I",
    "b", "c", "n", "o", "p", "s",
    "-", "=", "#", ":", "(", ")",
    "1", "2", "3", "4", "5", "6", "7", "8", "9",
    "[nH]", "[*]",
)


class VocabError(ValueError):
    """A token has no id, or an id has no token."""


@dataclass(frozen=True)
class Vocab:
    """Bijective token/id map. Ids 0, 1, 2 are PAD, BOS and EOS."""

    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.tokens[:3] != SPECIALS:
            raise VocabError("special tokens must occupy ids 0, 1, 2")
        if len(set(self.tokens)) != len(self.tokens):
            raise VocabError("duplicate tokens")
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.tokens)})

    @classmethod
    def build(cls, texts: Iterable[str] = ()) -> Vocab:
        seen = set(BASE_TOKENS)
        for text in texts:
            seen.update(tok.text for tok in tokenize(text))
        return cls(SPECIALS + tuple(sorted(seen)))

    @property
    def size(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        try:
            return self._index[token]  # type: ignore[attr-defined]
        except KeyError:
            raise VocabError(f"token {token!r} is not in the vocabulary") from None

    def encode(self, text: str) -> list[int]:
        """Token ids of ``text`` without BOS/EOS."""
        return [self.id_of(tok.text) for tok in tokenize(text)]

    def decode(self, ids: Iterable[int]) -> str:
        out = []
        for i in ids:
            if not 0 <= i < len(self.tokens):
                raise VocabError(f"id {i} out of range")
            if i >= len(SPECIALS):
                out.append(self.tokens[i])
        return "".join(out)
