"""Desk-scale tweet sentiment and emotion analysis toolkit."""

__version__ = "0.1.0"

from .autodiff import Tensor, grad_check
from .nn import bi_gru, conv_maxpool_attention, cross_entropy, dense, mse, tanimoto
from .optim import Adam, AdaGrad

__all__ = [
    "Tensor",
    "grad_check",
    "dense",
    "bi_gru",
    "conv_maxpool_attention",
    "cross_entropy",
    "mse",
    "tanimoto",
    "AdaGrad",
    "Adam",
]
