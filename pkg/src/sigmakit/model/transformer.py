"""Pre-LayerNorm causal transformer with a projection head, in plain numpy.

Parameters live in an ordered dict of arrays. ``forward`` returns a cache that
``backward`` consumes, so gradients are exact and can be checked against
finite differences in double precision.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import math

import numpy as np

NORM_EPS = 1e-12
LN_EPS = 1e-5
_GELU_C = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    d_model: int = 64
    n_layers: int = 2
    n_heads: int = 2
    d_proj: int = 16
    max_len: int = 128
    d_ff: int | None = None

    def __post_init__(self) -> None:
        if self.d_model % self.n_heads:
            raise ValueError("d_model must be divisible by n_heads")
        if not 0 < self.d_proj < self.d_model:
            raise ValueError("projection must be a bottleneck: 0 < d_proj < d_model")
        if self.vocab_size < 4 or self.max_len < 2:
            raise ValueError("vocab_size >= 4 and max_len >= 2 required")

    @property
    def ff(self) -> int:
        return self.d_ff or 4 * self.d_model

    def to_dict(self) -> dict:
        return asdict(self)


def param_shapes(cfg: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Declared parameter order and shapes (also the checkpoint order)."""
    d, V = cfg.d_model, cfg.vocab_size
    shapes: dict[str, tuple[int, ...]] = {"tok_emb": (V, d), "pos_emb": (cfg.max_len, d)}
    for layer in range(cfg.n_layers):
        p = f"h{layer}."
        shapes.update({
            p + "ln1.g": (d,), p + "ln1.b": (d,),
            p + "attn.w_qkv": (d, 3 * d), p + "attn.b_qkv": (3 * d,),
            p + "attn.w_o": (d, d), p + "attn.b_o": (d,),
            p + "ln2.g": (d,), p + "ln2.b": (d,),
            p + "mlp.w_in": (d, cfg.ff), p + "mlp.b_in": (cfg.ff,),
            p + "mlp.w_out": (cfg.ff, d), p + "mlp.b_out": (d,),
        })
    shapes.update({
        "ln_f.g": (d,), "ln_f.b": (d,),
        "head.w": (d, V),
        "proj.w1": (d, d), "proj.b1": (d,),
        "proj.w2": (d, cfg.d_proj), "proj.b2": (cfg.d_proj,),
    })
    return shapes


PROJECTION_PARAMS = ("proj.w1", "proj.b1", "proj.w2", "proj.b2")


def init_params(cfg: ModelConfig, rng: np.random.Generator, dtype=np.float64) -> dict[str, np.ndarray]:
    """GPT-2 style init: N(0, 0.02) weights, residual outputs scaled by depth."""
    params: dict[str, np.ndarray] = {}
    resid_std = 0.02 / np.sqrt(2 * cfg.n_layers)
    for name, shape in param_shapes(cfg).items():
        if name.endswith(".g"):
            arr = np.ones(shape)
        elif len(shape) == 1:
            arr = np.zeros(shape)
        elif name.startswith("proj."):
            arr = rng.normal(0.0, 1.0 / np.sqrt(shape[0]), shape)
        elif name.endswith(("w_o", "mlp.w_out")):
            arr = rng.normal(0.0, resid_std, shape)
        else:
            arr = rng.normal(0.0, 0.02, shape)
        params[name] = arr.astype(dtype)
    return params


def _layernorm(x, g, b):
    mu = x.mean(-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(-1, keepdims=True)
    rstd = 1.0 / np.sqrt(var + LN_EPS)
    xhat = xc * rstd
    return xhat * g + b, (xhat, rstd, g)


def _layernorm_back(dy, cache):
    xhat, rstd, g = cache
    dg = (dy * xhat).reshape(-1, xhat.shape[-1]).sum(0)
    db = dy.reshape(-1, xhat.shape[-1]).sum(0)
    dxhat = dy * g
    dx = rstd * (dxhat - dxhat.mean(-1, keepdims=True) - xhat * (dxhat * xhat).mean(-1, keepdims=True))
    return dx, dg, db


def _gelu(x):
    u = _GELU_C * (x + 0.044715 * (x * x * x))
    t = np.tanh(u)
    return 0.5 * x * (1.0 + t), t


def _gelu_back(dy, x, t):
    du = _GELU_C * (1.0 + 3 * 0.044715 * x * x)
    return dy * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du)


class ForwardError(ValueError):
    """Input ids are out of range or longer than the positional table."""


def check_ids(cfg: ModelConfig, ids: np.ndarray) -> np.ndarray:
    ids = np.asarray(ids)
    if ids.ndim == 1:
        ids = ids[None, :]
    if ids.ndim != 2 or ids.shape[1] == 0:
        raise ForwardError("ids must be a non-empty (batch, length) array")
    if ids.shape[1] > cfg.max_len:
        raise ForwardError(f"sequence length {ids.shape[1]} exceeds max_len {cfg.max_len}")
    if ids.min() < 0 or ids.max() >= cfg.vocab_size:
        raise ForwardError("token id out of vocabulary range")
    return ids


def forward(params: dict[str, np.ndarray], cfg: ModelConfig, ids: np.ndarray):
    """Run the encoder.

    Args:
        ids: (B, T) or (T,) integer array.

    Returns:
        ``(H, logits, cache)`` where H is the final-LayerNorm hidden state
        (B, T, d_model) and logits is (B, T, V).
    """
    ids = check_ids(cfg, ids)
    B, T = ids.shape
    d, A = cfg.d_model, cfg.n_heads
    dh = d // A
    x = params["tok_emb"][ids] + params["pos_emb"][:T]
    mask = np.triu(np.ones((T, T), dtype=bool), k=1)
    layers = []
    for layer in range(cfg.n_layers):
        p = f"h{layer}."
        a, ln1 = _layernorm(x, params[p + "ln1.g"], params[p + "ln1.b"])
        qkv = a @ params[p + "attn.w_qkv"] + params[p + "attn.b_qkv"]
        q, k, v = (qkv[..., i * d:(i + 1) * d].reshape(B, T, A, dh).transpose(0, 2, 1, 3) for i in range(3))
        s = q @ k.transpose(0, 1, 3, 2) / math.sqrt(dh)
        s = np.where(mask, -np.inf, s)
        s = s - s.max(-1, keepdims=True)
        att = np.exp(s)
        att /= att.sum(-1, keepdims=True)
        o = (att @ v).transpose(0, 2, 1, 3).reshape(B, T, d)
        x = x + o @ params[p + "attn.w_o"] + params[p + "attn.b_o"]
        m, ln2 = _layernorm(x, params[p + "ln2.g"], params[p + "ln2.b"])
        pre = m @ params[p + "mlp.w_in"] + params[p + "mlp.b_in"]
        act, t = _gelu(pre)
        x = x + act @ params[p + "mlp.w_out"] + params[p + "mlp.b_out"]
        layers.append((a, ln1, q, k, v, att, o, m, ln2, pre, act, t))
    H, lnf = _layernorm(x, params["ln_f.g"], params["ln_f.b"])
    logits = H @ params["head.w"]
    cache = {"ids": ids, "layers": layers, "lnf": lnf, "H": H}
    return H, logits, cache


def project(params: dict[str, np.ndarray], H: np.ndarray):
    """Projection head followed by L2 normalization.

    Returns ``(Z_hat, cache)``; rows of Z_hat have unit norm (a zero vector
    stays zero thanks to the epsilon in the denominator).
    """
    pre = H @ params["proj.w1"] + params["proj.b1"]
    r = np.maximum(pre, 0.0)
    z = r @ params["proj.w2"] + params["proj.b2"]
    norm = np.sqrt((z * z).sum(-1, keepdims=True))
    zhat = z / (norm + NORM_EPS)
    return zhat, (H, pre, r, z, norm)


def project_back(params, dzhat, cache, grads):
    """Accumulate projection-head grads into ``grads``; return dH."""
    H, pre, r, z, norm = cache
    denom = norm + NORM_EPS
    dot = (z * dzhat).sum(-1, keepdims=True)
    safe = np.where(norm > 0, norm, 1.0)
    dz = dzhat / denom - z * dot / (safe * denom * denom)
    d = H.shape[-1]
    grads["proj.w2"] += r.reshape(-1, r.shape[-1]).T @ dz.reshape(-1, dz.shape[-1])
    grads["proj.b2"] += dz.reshape(-1, dz.shape[-1]).sum(0)
    dr = dz @ params["proj.w2"].T
    dpre = dr * (pre > 0)
    grads["proj.w1"] += H.reshape(-1, d).T @ dpre.reshape(-1, dpre.shape[-1])
    grads["proj.b1"] += dpre.reshape(-1, dpre.shape[-1]).sum(0)
    return dpre @ params["proj.w1"].T


def zero_grads(params: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    return {k: np.zeros_like(v) for k, v in params.items()}


def backward(params, cfg: ModelConfig, cache, dlogits=None, dH=None, grads=None):
    """Backpropagate from logits and/or hidden-state gradients.

    Gradients are accumulated into ``grads`` (created when absent) and
    returned.
    """
    if grads is None:
        grads = zero_grads(params)
    H = cache["H"]
    B, T, d = H.shape
    A = cfg.n_heads
    dh = d // A
    dHt = np.zeros_like(H) if dH is None else dH.copy()
    if dlogits is not None:
        grads["head.w"] += H.reshape(-1, d).T @ dlogits.reshape(-1, dlogits.shape[-1])
        dHt += dlogits @ params["head.w"].T
    dx, dg, db = _layernorm_back(dHt, cache["lnf"])
    grads["ln_f.g"] += dg
    grads["ln_f.b"] += db
    for layer in reversed(range(cfg.n_layers)):
        p = f"h{layer}."
        a, ln1, q, k, v, att, o, m, ln2, pre, act, t = cache["layers"][layer]
        # MLP
        grads[p + "mlp.w_out"] += act.reshape(-1, act.shape[-1]).T @ dx.reshape(-1, d)
        grads[p + "mlp.b_out"] += dx.reshape(-1, d).sum(0)
        dact = dx @ params[p + "mlp.w_out"].T
        dpre = _gelu_back(dact, pre, t)
        grads[p + "mlp.w_in"] += m.reshape(-1, d).T @ dpre.reshape(-1, dpre.shape[-1])
        grads[p + "mlp.b_in"] += dpre.reshape(-1, dpre.shape[-1]).sum(0)
        dm = dpre @ params[p + "mlp.w_in"].T
        dres, dg, db = _layernorm_back(dm, ln2)
        grads[p + "ln2.g"] += dg
        grads[p + "ln2.b"] += db
        dx = dx + dres
        # attention
        grads[p + "attn.w_o"] += o.reshape(-1, d).T @ dx.reshape(-1, d)
        grads[p + "attn.b_o"] += dx.reshape(-1, d).sum(0)
        do = (dx @ params[p + "attn.w_o"].T).reshape(B, T, A, dh).transpose(0, 2, 1, 3)
        datt = do @ v.transpose(0, 1, 3, 2)
        dv = att.transpose(0, 1, 3, 2) @ do
        ds = att * (datt - (datt * att).sum(-1, keepdims=True)) / math.sqrt(dh)
        dq = ds @ k
        dk = ds.transpose(0, 1, 3, 2) @ q
        dqkv = np.concatenate(
            [g.transpose(0, 2, 1, 3).reshape(B, T, d) for g in (dq, dk, dv)], axis=-1
        )
        grads[p + "attn.w_qkv"] += a.reshape(-1, d).T @ dqkv.reshape(-1, 3 * d)
        grads[p + "attn.b_qkv"] += dqkv.reshape(-1, 3 * d).sum(0)
        da = dqkv @ params[p + "attn.w_qkv"].T
        dres, dg, db = _layernorm_back(da, ln1)
        grads[p + "ln1.g"] += dg
        grads[p + "ln1.b"] += db
        dx = dx + dres
    ids = cache["ids"]
    np.add.at(grads["tok_emb"], ids.reshape(-1), dx.reshape(-1, d))
    grads["pos_emb"][:T] += dx.sum(0)
    return grads
