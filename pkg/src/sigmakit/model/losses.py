"""Likelihood and dense trajectory-alignment losses with their gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LossError(ValueError):
    """Invalid loss inputs (all-pad batch, bad temperature, no negatives)."""


@dataclass(frozen=True)
class LossReport:
    nll: float
    sigma: float
    total: float
    per_token_sigma: np.ndarray


def log_softmax(logits: np.ndarray) -> np.ndarray:
    m = logits.max(-1, keepdims=True)
    shifted = logits - m
    return shifted - np.log(np.exp(shifted).sum(-1, keepdims=True))


def loss_nll(logits: np.ndarray, targets: np.ndarray, mask: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean negative log-likelihood over positions where ``mask`` is true.

    Args:
        logits: (..., V) scores.
        targets: (...) integer targets.
        mask: (...) boolean, false at padding.

    Returns:
        ``(loss, dlogits)``.
    """
    mask = np.asarray(mask, dtype=bool)
    count = int(mask.sum())
    if count == 0:
        raise LossError("no non-pad positions")
    logp = log_softmax(logits)
    picked = np.take_along_axis(logp, targets[..., None], axis=-1)[..., 0]
    loss = -float((picked * mask).sum()) / count
    dlogits = np.exp(logp)
    np.put_along_axis(dlogits, targets[..., None], np.take_along_axis(dlogits, targets[..., None], -1) - 1.0, -1)
    dlogits *= (mask / count)[..., None]
    return loss, dlogits


@dataclass(frozen=True)
class SigmaResult:
    value: float
    per_token: np.ndarray  # (B, S), zero where not counted
    used: np.ndarray  # (B,) anchors that contributed
    d_u: np.ndarray
    d_v: np.ndarray
    d_negs: np.ndarray


def loss_sigma(
    z_u: np.ndarray,
    z_v: np.ndarray,
    z_negs: np.ndarray,
    neg_mask: np.ndarray,
    tau: float = 0.1,
    pos_mask: np.ndarray | None = None,
    strict: bool = False,
) -> SigmaResult:
    """Token-level InfoNCE between aligned suffix projections.

    For anchor b and suffix position t the term is
    ``logsumexp([s_pos, s_neg_1..K] / tau) - s_pos / tau`` where similarities
    are dot products of unit vectors and masked negatives are left out of the
    denominator. Terms are averaged over suffix positions, then over anchors
    that have at least one usable negative.

    Args:
        z_u, z_v: (B, S, D) or (S, D) normalized projections.
        z_negs: (B, K, S, D) or (K, S, D).
        neg_mask: (B, K) or (K,) boolean usability mask.
        pos_mask: (B, S) valid suffix positions; all valid when omitted.
        strict: raise instead of skipping anchors without negatives.
    """
    if tau <= 0:
        raise LossError("temperature must be positive")
    single = z_u.ndim == 2
    if single:
        z_u, z_v, z_negs = z_u[None], z_v[None], z_negs[None]
        neg_mask = np.asarray(neg_mask)[None]
        if pos_mask is not None:
            pos_mask = np.asarray(pos_mask)[None]
    B, S, _ = z_u.shape
    neg_mask = np.asarray(neg_mask, dtype=bool).reshape(B, -1)
    pos_mask = np.ones((B, S), dtype=bool) if pos_mask is None else np.asarray(pos_mask, dtype=bool)
    used = neg_mask.any(1) & pos_mask.any(1)
    if strict and not used.all():
        raise LossError("an anchor has no usable structural negatives")
    s_pos = (z_u * z_v).sum(-1)  # (B, S)
    s_neg = np.einsum("bsd,bksd->bks", z_u, z_negs)  # (B, K, S)
    logits = np.concatenate([s_pos[:, None], s_neg], axis=1) / tau  # (B, 1+K, S)
    valid = np.concatenate([np.ones((B, 1), dtype=bool), neg_mask], axis=1)[:, :, None]
    logits = np.where(valid, logits, -np.inf)
    m = logits.max(1, keepdims=True)
    e = np.exp(logits - m)
    lse = np.log(e.sum(1)) + m[:, 0]
    per_token = (lse - s_pos / tau) * pos_mask * used[:, None]
    n_used = int(used.sum())
    zeros = (np.zeros_like(z_u), np.zeros_like(z_v), np.zeros_like(z_negs))
    if n_used == 0:
        out = SigmaResult(0.0, per_token, used, *zeros)
    else:
        weight = pos_mask * used[:, None] / np.maximum(pos_mask.sum(1, keepdims=True), 1) / n_used  # (B, S)
        value = float((per_token * weight).sum())
        p = e / e.sum(1, keepdims=True)  # softmax over candidates
        ds_pos = (p[:, 0] - 1.0) / tau * weight  # (B, S)
        ds_neg = p[:, 1:] / tau * weight[:, None]  # (B, K, S)
        d_u = ds_pos[..., None] * z_v + np.einsum("bks,bksd->bsd", ds_neg, z_negs)
        d_v = ds_pos[..., None] * z_u
        d_negs = ds_neg[..., None] * z_u[:, None]
        out = SigmaResult(value, per_token, used, d_u, d_v, d_negs)
    if single:
        return SigmaResult(out.value, out.per_token[0], out.used, out.d_u[0], out.d_v[0], out.d_negs[0])
    return out


def loss_total(nll: float, sigma: float, lam: float) -> float:
    """``nll + lam * sigma``; ``lam = 0`` returns ``nll`` unchanged."""
    if lam < 0:
        raise LossError("lambda must be non-negative")
    if lam == 0:
        return nll
    return nll + lam * sigma
