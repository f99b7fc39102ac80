"""Training loop: Siamese views, shared weights, AdamW, JSONL log."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from sigmakit.model.batch import build_batch
from sigmakit.model.model import SigmaModel
from sigmakit.model.objective import loss_and_grad
from sigmakit.model.optim import AdamW, clip_grads, lr_at
from sigmakit.model.vocab import Vocab
from sigmakit.views.pairs import ViewPair

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    d_model: int = 64
    n_layers: int = 2
    n_heads: int = 2
    d_proj: int = 16
    max_len: int = 128
    lam: float = 0.5
    tau: float = 0.1
    batch_size: int = 64
    epochs: int = 5
    lr: float = 5e-4
    warmup_frac: float = 0.05
    weight_decay: float = 0.01
    clip: float = 1.0
    n_negatives: int = 7
    strict_negatives: bool = False
    seed: int = 0
    dtype: str = "float32"

    def __post_init__(self) -> None:
        if self.lam < 0 or self.tau <= 0:
            raise ValueError("need lam >= 0 and tau > 0")
        if self.batch_size < 2 or self.epochs < 1:
            raise ValueError("need batch_size >= 2 and epochs >= 1")
        if self.dtype not in ("float32", "float64"):
            raise ValueError("dtype must be float32 or float64")

    @classmethod
    def from_dict(cls, data: dict) -> TrainConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def model_dims(self) -> dict:
        return {k: getattr(self, k) for k in ("d_model", "n_layers", "n_heads", "d_proj", "max_len")}


class TrainingAborted(RuntimeError):
    """A non-finite loss stopped training; the last good state is attached."""

    def __init__(self, message: str, model: SigmaModel, log_rows: list[dict]) -> None:
        super().__init__(message)
        self.model = model
        self.log_rows = log_rows


@dataclass
class TrainResult:
    model: SigmaModel
    log_rows: list[dict] = field(default_factory=list)


def _snapshot(model: SigmaModel) -> SigmaModel:
    return SigmaModel(model.config, {k: v.copy() for k, v in model.params.items()}, model.vocab)


def train(
    config: TrainConfig,
    pairs: list[ViewPair],
    val_pairs: list[ViewPair] | None = None,
    checkpoint_path: str | Path | None = None,
    log_path: str | Path | None = None,
    vocab: Vocab | None = None,
) -> TrainResult:
    """Fit the joint objective on ``pairs``.

    Every step processes ``2 * batch_size`` views (plus negatives when
    ``lam > 0``). The log gets one row per step and, when ``val_pairs`` is
    given, a validation row with the invariance score per epoch. On a
    non-finite loss the last good parameters are saved (if a path is given)
    and TrainingAborted is raised.
    """
    from sigmakit.metrics.invariance import tis

    if not pairs:
        raise ValueError("no training pairs")
    init_rng, order_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(2))
    if vocab is None:
        vocab = Vocab.build(t for p in pairs for t in (p.prefix_u, p.prefix_v, p.suffix))
    dtype = np.float32 if config.dtype == "float32" else np.float64
    model = SigmaModel.create(vocab, init_rng, dtype=dtype, **config.model_dims())
    opt = AdamW(weight_decay=config.weight_decay)
    steps_per_epoch = math.ceil(len(pairs) / config.batch_size)
    total_steps = steps_per_epoch * config.epochs
    rows: list[dict] = []
    good = _snapshot(model)
    log_fh = open(log_path, "w", encoding="utf-8") if log_path else None
    extra = {"train_config": asdict(config)}

    def emit(row: dict) -> None:
        rows.append(row)
        if log_fh:
            log_fh.write(json.dumps(row, sort_keys=True) + "\n")
            log_fh.flush()

    step = 0
    try:
        for epoch in range(config.epochs):
            perm = order_rng.permutation(len(pairs))
            for start in range(0, len(pairs), config.batch_size):
                chunk = [pairs[i] for i in perm[start:start + config.batch_size]]
                if len(chunk) < 2:
                    continue
                batch = build_batch(chunk, vocab, config.n_negatives if config.lam > 0 else 0, config.max_len)
                report, grads = loss_and_grad(
                    model.params, model.config, batch, config.lam, config.tau, strict=config.strict_negatives
                )
                if not math.isfinite(report.total):
                    if checkpoint_path:
                        good.save(checkpoint_path, extra)
                    raise TrainingAborted(f"non-finite loss at step {step}", good, rows)
                assert grads is not None
                norm = clip_grads(grads, config.clip)
                lr = lr_at(step, total_steps, config.lr, config.warmup_frac)
                opt.step(model.params, grads, lr)
                emit({
                    "epoch": epoch, "step": step, "nll": report.nll, "sigma": report.sigma,
                    "total": report.total, "lr": lr, "grad_norm": norm,
                })
                step += 1
            good = _snapshot(model)
            if checkpoint_path:
                model.save(checkpoint_path, extra)
            if val_pairs:
                score = tis(model, [(p.prefix_u, p.prefix_v) for p in val_pairs])
                emit({"epoch": epoch, "step": step, "val_tis": score})
                log.info("epoch %d: val TIS %.4f", epoch, score)
    finally:
        if log_fh:
            log_fh.close()
    return TrainResult(model, rows)
