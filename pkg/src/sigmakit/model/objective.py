"""Joint objective: likelihood on both views plus dense alignment."""

from __future__ import annotations

import numpy as np

from sigmakit.model.batch import TrajectoryBatch
from sigmakit.model.losses import LossReport, loss_nll, loss_sigma, loss_total
from sigmakit.model.transformer import ModelConfig, backward, forward, project, project_back, zero_grads
from sigmakit.model.vocab import PAD_ID


def _aligned_index(offsets: np.ndarray, lengths: np.ndarray, width: int):
    s = np.arange(width)
    pos = offsets[:, None] + s[None, :]
    valid = s[None, :] < lengths[:, None]
    return np.where(valid, pos, 0), valid


def loss_and_grad(
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    batch: TrajectoryBatch,
    lam: float = 0.5,
    tau: float = 0.1,
    strict: bool = False,
    need_grad: bool = True,
) -> tuple[LossReport, dict[str, np.ndarray] | None]:
    """Loss report and exact gradients of ``nll + lam * sigma``.

    Both views contribute to the likelihood; negatives only enter the
    alignment denominator. With ``lam == 0`` the projection head and the
    negatives are never evaluated, so the gradient is the pure MLE gradient.
    """
    B = batch.size
    width = max(batch.ids_u.shape[1], batch.ids_v.shape[1])
    ids = np.zeros((2 * B, width), dtype=np.int64)
    ids[:B, :batch.ids_u.shape[1]] = batch.ids_u
    ids[B:, :batch.ids_v.shape[1]] = batch.ids_v
    H, logits, cache = forward(params, cfg, ids)
    targets = ids[:, 1:]
    nll, dlogits_trim = loss_nll(logits[:, :-1], targets, targets != PAD_ID)

    S = int(batch.suffix_len.max())
    sigma = 0.0
    per_token = np.zeros((B, S))
    dH = None
    dH_neg = None
    neg_cache = None
    if lam > 0:
        pos_u, valid = _aligned_index(batch.off_u, batch.suffix_len, S)
        pos_v, _ = _aligned_index(batch.off_v, batch.suffix_len, S)
        rows = np.arange(B)[:, None]
        h_sel = np.concatenate([H[rows, pos_u], H[B + rows, pos_v]], axis=0)  # (2B, S, d)
        z_sel, pcache = project(params, h_sel)
        z_u, z_v = z_sel[:B], z_sel[B:]
        K = batch.neg_mask.shape[1]
        z_negs = np.zeros((B, K, S, cfg.d_proj), dtype=z_u.dtype)
        M = len(batch.neg_owner)
        if M:
            Hn, _, neg_cache = forward(params, cfg, batch.ids_neg)
            pos_n, valid_n = _aligned_index(batch.off_neg, batch.suffix_len[batch.neg_owner], S)
            hn_sel = Hn[np.arange(M)[:, None], pos_n]
            zn_sel, ncache = project(params, hn_sel)
            zn_sel = zn_sel * valid_n[..., None]
            z_negs[batch.neg_owner, batch.neg_slot] = zn_sel
        res = loss_sigma(z_u, z_v, z_negs, batch.neg_mask, tau, pos_mask=valid, strict=strict)
        sigma = res.value
        per_token = res.per_token
        if need_grad:
            grads = zero_grads(params)
            dz_sel = lam * np.concatenate([res.d_u, res.d_v], axis=0)
            dh_sel = project_back(params, dz_sel, pcache, grads)
            dH = np.zeros_like(H)
            np.add.at(dH, (np.arange(B)[:, None].repeat(S, 1), pos_u), dh_sel[:B] * valid[..., None])
            np.add.at(dH, (B + np.arange(B)[:, None].repeat(S, 1), pos_v), dh_sel[B:] * valid[..., None])
            if M:
                dzn = lam * res.d_negs[batch.neg_owner, batch.neg_slot] * valid_n[..., None]
                dhn = project_back(params, dzn, ncache, grads)
                dH_neg = np.zeros_like(Hn)
                np.add.at(dH_neg, (np.arange(M)[:, None].repeat(S, 1), pos_n), dhn * valid_n[..., None])
    total = loss_total(nll, sigma, lam)
    report = LossReport(nll=nll, sigma=sigma, total=total, per_token_sigma=per_token)
    if not need_grad:
        return report, None
    if lam <= 0:
        grads = zero_grads(params)
    dlogits = np.zeros_like(logits)
    dlogits[:, :-1] = dlogits_trim
    backward(params, cfg, cache, dlogits=dlogits, dH=dH, grads=grads)
    if dH_neg is not None:
        backward(params, cfg, neg_cache, dH=dH_neg, grads=grads)
    return report, grads
