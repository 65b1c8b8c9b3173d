from .layers import (
    AdaIN,
    Chain,
    Conv2d,
    GlobalAvgPool,
    Identity,
    InstanceNorm,
    LeakyReLU,
    Linear,
    Module,
    Parameter,
    ReLU,
    Sigmoid,
    Tanh,
    Upsample2x,
)
from .adam import Adam

__all__ = [
    "AdaIN", "Adam", "Chain", "Conv2d", "GlobalAvgPool", "Identity",
    "InstanceNorm", "LeakyReLU", "Linear", "Module", "Parameter", "ReLU",
    "Sigmoid", "Tanh", "Upsample2x",
]
