"""Numerical core: tensors, reverse-mode gradients, Adamax, checkpoints."""

from codegraph.tensor import core as F
from codegraph.tensor.checkpoint import load_checkpoint, save_checkpoint
from codegraph.tensor.core import OpRecord, Tape, Tensor, backward
from codegraph.tensor.gradcheck import finite_diff_check
from codegraph.tensor.optim import AdamaxState, adamax_step

__all__ = [
    "AdamaxState", "F", "OpRecord", "Tape", "Tensor", "adamax_step", "backward",
    "finite_diff_check", "load_checkpoint", "save_checkpoint",
]
