"""Token-id batches of view pairs and their structural negatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sigmakit.model.vocab import BOS_ID, EOS_ID, PAD_ID, Vocab
from sigmakit.views.pairs import ViewPair, sample_negatives


class BatchError(ValueError):
    """Sequences do not fit the model or violate suffix alignment."""


@dataclass(frozen=True)
class TrajectoryBatch:
    """Padded id matrices for N anchors (2N views) plus usable negatives.

    Each row is ``[BOS] prefix suffix [EOS]``. ``off_*`` is the index of the
    last prefix token, i.e. the hidden state that predicts the first suffix
    token; aligned positions are ``off + s`` for ``s < suffix_len``.
    """

    ids_u: np.ndarray
    ids_v: np.ndarray
    off_u: np.ndarray
    off_v: np.ndarray
    suffix_len: np.ndarray
    ids_neg: np.ndarray  # (M, T_neg), only usable negatives
    off_neg: np.ndarray
    neg_owner: np.ndarray  # anchor index of each negative row
    neg_slot: np.ndarray  # slot within the anchor's negative set
    neg_mask: np.ndarray  # (N, K)

    @property
    def size(self) -> int:
        return len(self.ids_u)

    def check_alignment(self) -> None:
        """Suffix ids must agree across u, v and every usable negative."""
        for b in range(self.size):
            s = self.suffix_len[b]
            ref = self.ids_u[b, self.off_u[b] + 1:self.off_u[b] + 1 + s]
            if not np.array_equal(ref, self.ids_v[b, self.off_v[b] + 1:self.off_v[b] + 1 + s]):
                raise BatchError(f"anchor {b}: suffix differs between views")
        for r, b in enumerate(self.neg_owner):
            s = self.suffix_len[b]
            got = self.ids_neg[r, self.off_neg[r] + 1:self.off_neg[r] + 1 + s]
            ref = self.ids_u[b, self.off_u[b] + 1:self.off_u[b] + 1 + s]
            if not np.array_equal(ref, got):
                raise BatchError(f"negative {r}: suffix differs from anchor {b}")


def _pad(rows: list[list[int]]) -> np.ndarray:
    width = max((len(r) for r in rows), default=1)
    out = np.full((len(rows), width), PAD_ID, dtype=np.int64)
    for i, r in enumerate(rows):
        out[i, :len(r)] = r
    return out


def _sequence(vocab: Vocab, prefix: str, suffix_ids: list[int]) -> tuple[list[int], int]:
    pre = vocab.encode(prefix)
    return [BOS_ID, *pre, *suffix_ids, EOS_ID], len(pre)


def build_batch(pairs: list[ViewPair], vocab: Vocab, n_negatives: int = 7, max_len: int | None = None) -> TrajectoryBatch:
    """Encode ``pairs`` and attach up to ``n_negatives`` in-batch negatives each."""
    if not pairs:
        raise BatchError("empty batch")
    rows_u, rows_v, off_u, off_v, slen = [], [], [], [], []
    rows_n, off_n, owner, slot = [], [], [], []
    mask = np.zeros((len(pairs), n_negatives), dtype=bool)
    for b, p in enumerate(pairs):
        suf = vocab.encode(p.suffix)
        su, ou = _sequence(vocab, p.prefix_u, suf)
        sv, ov = _sequence(vocab, p.prefix_v, suf)
        rows_u.append(su)
        rows_v.append(sv)
        off_u.append(ou)
        off_v.append(ov)
        slen.append(len(suf))
        if n_negatives:
            negs = sample_negatives(pairs, b, n_negatives)
            for k, (text, ok) in enumerate(zip(negs.prefixes, negs.mask)):
                if ok:
                    seq, on = _sequence(vocab, text, suf)
                    rows_n.append(seq)
                    off_n.append(on)
                    owner.append(b)
                    slot.append(k)
                    mask[b, k] = True
    batch = TrajectoryBatch(
        ids_u=_pad(rows_u), ids_v=_pad(rows_v),
        off_u=np.array(off_u), off_v=np.array(off_v), suffix_len=np.array(slen),
        ids_neg=_pad(rows_n) if rows_n else np.zeros((0, 1), dtype=np.int64),
        off_neg=np.array(off_n, dtype=np.int64), neg_owner=np.array(owner, dtype=np.int64),
        neg_slot=np.array(slot, dtype=np.int64), neg_mask=mask,
    )
    if max_len is not None:
        longest = max(batch.ids_u.shape[1], batch.ids_v.shape[1], batch.ids_neg.shape[1])
        if longest > max_len:
            raise BatchError(f"sequence of length {longest} exceeds max_len {max_len}")
    return batch
