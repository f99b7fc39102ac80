"""Toy causal sequence model, losses, exact gradients and training."""

from sigmakit.model.batch import BatchError, TrajectoryBatch, build_batch
from sigmakit.model.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from sigmakit.model.gradcheck import GradcheckReport, gradcheck, toy_problem
from sigmakit.model.losses import LossError, LossReport, loss_nll, loss_sigma, loss_total
from sigmakit.model.model import EncodeError, SigmaModel
from sigmakit.model.objective import loss_and_grad
from sigmakit.model.optim import AdamW, clip_grads, lr_at
from sigmakit.model.train import TrainConfig, TrainingAborted, TrainResult, train
from sigmakit.model.transformer import ForwardError, ModelConfig, backward, forward, init_params, project
from sigmakit.model.vocab import BOS_ID, EOS_ID, PAD_ID, Vocab, VocabError

__all__ = [
    "AdamW", "BOS_ID", "BatchError", "CheckpointError", "EOS_ID", "EncodeError", "ForwardError",
    "GradcheckReport", "LossError", "LossReport", "ModelConfig", "PAD_ID", "SigmaModel", "TrainConfig",
    "TrainResult", "TrainingAborted", "TrajectoryBatch", "Vocab", "VocabError", "backward", "build_batch",
    "clip_grads", "forward", "gradcheck", "init_params", "load_checkpoint", "loss_and_grad", "loss_nll",
    "loss_sigma", "loss_total", "lr_at", "project", "save_checkpoint", "toy_problem", "train",
]
