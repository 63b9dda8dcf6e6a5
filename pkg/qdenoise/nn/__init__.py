"""
From-scratch differentiable stack: layers, the denoising autoencoder, the
composite loss, Adam, checkpoints and gradient checking.
"""

from .tensor import Tensor
from .layers import (
    conv2d_backward,
    conv2d_forward,
    dropout,
    maxpool2,
    relu,
    upsample2_nearest,
)
from .model import Autoencoder, ModelConfig, ModelParams, init_params, model_forward
from .loss import batch_surrogate, composite_loss
from .optim import NonFiniteGradientError, adam_step
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .gradcheck import GradCheckReport, finite_difference_check

__all__ = [
    "Tensor",
    "conv2d_forward",
    "conv2d_backward",
    "relu",
    "maxpool2",
    "upsample2_nearest",
    "dropout",
    "Autoencoder",
    "ModelConfig",
    "ModelParams",
    "init_params",
    "model_forward",
    "batch_surrogate",
    "composite_loss",
    "NonFiniteGradientError",
    "adam_step",
    "CheckpointError",
    "load_checkpoint",
    "save_checkpoint",
    "GradCheckReport",
    "finite_difference_check",
]
