"""Next-token scorers: the interface, a model-backed scorer and an n-gram scorer."""

from __future__ import annotations

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from sigmakit.model.model import SigmaModel
from sigmakit.model.vocab import BOS_ID, EOS_ID, PAD_ID, Vocab


@runtime_checkable
class Scorer(Protocol):
    """Maps token-id prefixes (starting with BOS) to next-token log-probabilities."""

    vocab: Vocab

    def logprobs(self, prefixes: Sequence[Sequence[int]]) -> np.ndarray:
        """(len(prefixes), V) rows, each with logsumexp 0."""
        ...


@dataclass
class ModelScorer:
    model: SigmaModel

    @property
    def vocab(self) -> Vocab:
        return self.model.vocab

    def logprobs(self, prefixes: Sequence[Sequence[int]]) -> np.ndarray:
        rows = self.model.next_logprobs([list(p) for p in prefixes])
        # the model never emits padding or a second BOS
        rows[:, [PAD_ID, BOS_ID]] = -np.inf
        m = rows.max(1, keepdims=True)
        return rows - (m + np.log(np.exp(rows - m).sum(1, keepdims=True)))


@dataclass
class NGramScorer:
    """Interpolated add-k n-gram model over tokens plus EOS.

    ``P(w | h) = sum_j weights[j] * (c(h_j, w) + k) / (c(h_j) + k * |W|)`` where
    ``h_j`` is the last ``j`` context tokens and W excludes PAD and BOS, so each
    component (and the mixture) is a normalized distribution.
    """

    vocab: Vocab
    n: int
    k: float
    weights: tuple[float, ...]
    counts: list[dict[tuple[int, ...], Counter]] = field(default_factory=list)
    _cache: dict[tuple[int, ...], np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def outputs(self) -> np.ndarray:
        return np.array([i for i in range(len(self.vocab)) if i not in (PAD_ID, BOS_ID)])

    def _row(self, context: tuple[int, ...]) -> np.ndarray:
        row = self._cache.get(context)
        if row is not None:
            return row
        V = len(self.vocab)
        outs = self.outputs
        probs = np.zeros(V)
        for j, weight in enumerate(self.weights):
            ctx = context[len(context) - j:] if j else ()
            counter = self.counts[j].get(ctx)
            dist = np.full(V, 0.0)
            total = sum(counter.values()) if counter else 0
            dist[outs] = self.k
            if counter:
                for w, c in counter.items():
                    dist[w] += c
            dist[outs] /= total + self.k * len(outs)
            probs += weight * dist
        with np.errstate(divide="ignore"):
            row = np.log(probs)
        row -= np.logaddexp.reduce(row[outs])
        self._cache[context] = row
        return row

    def _context(self, prefix: Sequence[int]) -> tuple[int, ...]:
        need = self.n - 1
        ctx = list(prefix[-need:]) if need else []
        return tuple([BOS_ID] * (need - len(ctx)) + ctx)

    def logprobs(self, prefixes: Sequence[Sequence[int]]) -> np.ndarray:
        return np.stack([self._row(self._context(p)) for p in prefixes])


def default_weights(n: int) -> tuple[float, ...]:
    """Geometric weights favouring longer contexts, normalized to 1."""
    raw = np.array([2.0**j for j in range(n)])
    return tuple(float(x) for x in raw / raw.sum())


def ngram_fit(
    corpus: Sequence[str],
    n: int = 6,
    k_smooth: float = 0.01,
    vocab: Vocab | None = None,
    weights: Sequence[float] | None = None,
) -> NGramScorer:
    """Count n-grams of ``[BOS]*(n-1) + tokens + [EOS]`` for every corpus string."""
    if not corpus:
        raise ValueError("empty corpus")
    if n < 1 or k_smooth <= 0:
        raise ValueError("need n >= 1 and k_smooth > 0")
    vocab = vocab or Vocab.build(corpus)
    weights = tuple(weights) if weights is not None else default_weights(n)
    if len(weights) != n or abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("weights must have length n and sum to 1")
    counts: list[dict[tuple[int, ...], Counter]] = [{} for _ in range(n)]
    for text in corpus:
        seq = [BOS_ID] * (n - 1) + vocab.encode(text) + [EOS_ID]
        for pos in range(n - 1, len(seq)):
            w = seq[pos]
            for j in range(n):
                ctx = tuple(seq[pos - j:pos])
                counts[j].setdefault(ctx, Counter())[w] += 1
    return NGramScorer(vocab, n, k_smooth, weights, counts)


def ngram_score(scorer: NGramScorer, prefix: str | Sequence[int]) -> np.ndarray:
    """Next-token log-probabilities after ``prefix`` (text or ids without BOS)."""
    ids = scorer.vocab.encode(prefix) if isinstance(prefix, str) else list(prefix)
    return scorer.logprobs([[BOS_ID, *ids]])[0]
