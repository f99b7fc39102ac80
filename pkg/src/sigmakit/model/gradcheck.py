"""Central finite-difference verification of the analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sigmakit.model.batch import TrajectoryBatch, build_batch
from sigmakit.model.objective import loss_and_grad
from sigmakit.model.transformer import ModelConfig, init_params
from sigmakit.model.vocab import Vocab
from sigmakit.views.pairs import ViewPair

# tiny gradients are compared in absolute terms below this floor
REL_FLOOR = 1e-6

GRADCHECK_PAIRS = (
    ("CC(=O)", "O=C(C)", "c1ccccc1"),
    ("c1ccc(cc1)N", "N(c1ccccc1)", "C(=O)O"),
    ("CCO", "OCC", "C(=O)N"),
    ("N#C", "C(#N)", "c1ccncc1"),
)


@dataclass(frozen=True)
class GradcheckReport:
    lam: float
    max_rel_error: float
    per_param: dict[str, float]

    @property
    def passed(self) -> bool:
        return self.max_rel_error < 1e-4


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = REL_FLOOR) -> np.ndarray:
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return np.abs(analytic - numeric) / scale


def toy_problem(d_model: int = 8, n_layers: int = 2, seed: int = 0):
    """A double-precision model plus a small batch with usable negatives."""
    from sigmakit.smiles.canon import canonical_key
    from sigmakit.smiles.parser import mol_from_smiles

    pairs = [
        ViewPair(u, v, s, canonical_key(mol_from_smiles(u + s)))
        for u, v, s in GRADCHECK_PAIRS
    ]
    vocab = Vocab.build()
    cfg = ModelConfig(vocab_size=len(vocab), d_model=d_model, n_layers=n_layers, n_heads=2, d_proj=d_model // 2, max_len=32)
    params = init_params(cfg, np.random.default_rng(seed), dtype=np.float64)
    # larger weights than the training init so every path carries signal
    rng = np.random.default_rng(seed + 1)
    for name, arr in params.items():
        arr += rng.normal(0.0, 0.3, arr.shape)
    batch = build_batch(pairs, vocab, n_negatives=3)
    return params, cfg, batch


def gradcheck(
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    batch: TrajectoryBatch,
    lam: float,
    tau: float = 0.1,
    eps: float = 1e-5,
    max_entries: int | None = None,
    rng: np.random.Generator | None = None,
) -> GradcheckReport:
    """Compare analytic gradients with central differences, parameter by parameter.

    Args:
        max_entries: check at most this many entries per tensor (chosen by
            ``rng``); all entries when None.
    """
    _, grads = loss_and_grad(params, cfg, batch, lam, tau)
    assert grads is not None
    per_param: dict[str, float] = {}
    for name, arr in params.items():
        flat = arr.reshape(-1)
        idx = np.arange(flat.size)
        if max_entries is not None and flat.size > max_entries:
            idx = (rng or np.random.default_rng(0)).choice(flat.size, max_entries, replace=False)
        numeric = np.empty(len(idx))
        for j, i in enumerate(idx):
            old = flat[i]
            flat[i] = old + eps
            plus = loss_and_grad(params, cfg, batch, lam, tau, need_grad=False)[0].total
            flat[i] = old - eps
            minus = loss_and_grad(params, cfg, batch, lam, tau, need_grad=False)[0].total
            flat[i] = old
            numeric[j] = (plus - minus) / (2 * eps)
        analytic = grads[name].reshape(-1)[idx]
        per_param[name] = float(relative_error(analytic, numeric).max())
    return GradcheckReport(lam, max(per_param.values()), per_param)
