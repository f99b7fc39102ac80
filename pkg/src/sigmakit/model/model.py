"""A trained (or fresh) model bundled with its vocabulary."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

import sigmakit
from sigmakit.model.checkpoint import load_checkpoint, save_checkpoint
from sigmakit.model.losses import log_softmax
from sigmakit.model.transformer import ModelConfig, forward, init_params
from sigmakit.model.vocab import BOS_ID, PAD_ID, Vocab
from sigmakit.smiles.parser import parse_smiles


class EncodeError(ValueError):
    """A string cannot be encoded (tokenization failure or dead prefix)."""


@dataclass
class SigmaModel:
    config: ModelConfig
    params: dict[str, np.ndarray]
    vocab: Vocab

    @classmethod
    def create(cls, vocab: Vocab, rng: np.random.Generator, dtype=np.float64, **dims) -> SigmaModel:
        cfg = ModelConfig(vocab_size=len(vocab), **dims)
        return cls(cfg, init_params(cfg, rng, dtype), vocab)

    def _ids(self, text: str) -> list[int]:
        try:
            ids = self.vocab.encode(text)
        except ValueError as exc:
            raise EncodeError(str(exc)) from exc
        if len(ids) + 1 > self.config.max_len:
            raise EncodeError(f"{text!r} is longer than max_len")
        return [BOS_ID, *ids]

    def hidden_states(self, text: str) -> tuple[list[str], np.ndarray]:
        """Token texts of ``text`` and the final hidden state at each of them."""
        ids = self._ids(text)
        H, _, _ = forward(self.params, self.config, np.array([ids]))
        tokens = [self.vocab.tokens[i] for i in ids[1:]]
        return tokens, H[0, 1:].astype(np.float64)

    def encode_prefixes(self, texts: list[str]) -> np.ndarray:
        """L2-normalized final hidden state of ``[BOS] + prefix`` for each text."""
        rows = []
        for text in texts:
            if parse_smiles(text).irrecoverable:
                raise EncodeError(f"{text!r} cannot be completed to a molecule")
            rows.append(self._ids(text))
        width = max(len(r) for r in rows)
        ids = np.full((len(rows), width), PAD_ID, dtype=np.int64)
        for i, r in enumerate(rows):
            ids[i, :len(r)] = r
        H, _, _ = forward(self.params, self.config, ids)
        last = H[np.arange(len(rows)), [len(r) - 1 for r in rows]].astype(np.float64)
        return last / np.linalg.norm(last, axis=1, keepdims=True)

    def encode_prefix(self, text: str) -> np.ndarray:
        return self.encode_prefixes([text])[0]

    def next_logprobs(self, prefixes: list[list[int]]) -> np.ndarray:
        """Next-token log-probabilities (float64) for each id prefix."""
        width = max(len(p) for p in prefixes)
        ids = np.full((len(prefixes), width), PAD_ID, dtype=np.int64)
        for i, p in enumerate(prefixes):
            ids[i, :len(p)] = p
        _, logits, _ = forward(self.params, self.config, ids)
        last = logits[np.arange(len(prefixes)), [len(p) - 1 for p in prefixes]].astype(np.float64)
        return log_softmax(last)

    def header(self, extra: dict | None = None) -> dict:
        head = {"config": self.config.to_dict(), "vocab": list(self.vocab.tokens), "version": sigmakit.__version__}
        if extra:
            head.update(extra)
        return head

    def save(self, path: str | Path, extra: dict | None = None) -> None:
        save_checkpoint(path, self.params, self.header(extra))

    @classmethod
    def load(cls, path: str | Path, dtype=np.float64) -> SigmaModel:
        params, header = load_checkpoint(path)
        model = cls(ModelConfig(**header["config"]), {k: v.astype(dtype) for k, v in params.items()}, Vocab(tuple(header["vocab"])))
        model.checkpoint_header = header  # type: ignore[attr-defined]
        return model
