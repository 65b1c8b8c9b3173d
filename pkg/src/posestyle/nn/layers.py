"""Layers with hand-written backward passes.

Convention: ``forward(...)`` returns ``(out, cache)`` and ``backward(cache,
dout)`` returns the gradient w.r.t. the forward inputs while accumulating
parameter gradients into ``Parameter.grad``. Caches are passed around
explicitly so one layer instance can serve several forward calls per step.
"""

from __future__ import annotations

import numpy as np

from . import functional as F


class Parameter:
    __slots__ = ("value", "grad")

    def __init__(self, value):
        self.value = value
        self.grad = np.zeros_like(value)

    @property
    def shape(self):
        return self.value.shape


class Module:
    """Base class: parameter discovery over attributes, lists and tuples."""

    def named_parameters(self, prefix=""):
        for name, obj in self.__dict__.items():
            path = f"{prefix}{name}"
            if isinstance(obj, Parameter):
                yield path, obj
            elif isinstance(obj, Module):
                yield from obj.named_parameters(path + ".")
            elif isinstance(obj, (list, tuple)):
                for i, item in enumerate(obj):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{path}.{i}.")

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def zero_grad(self):
        for p in self.parameters():
            p.grad[...] = 0.0


def he_normal(rng, shape, fan_in, gain, dtype):
    return (rng.standard_normal(shape) * (gain / np.sqrt(fan_in))).astype(dtype)


class Conv2d(Module):
    def __init__(self, cin, cout, kernel=3, stride=1, pad=None, bias=True,
                 gain=np.sqrt(2.0), rng=None, dtype=np.float32):
        self.kernel = kernel
        self.stride = stride
        self.pad = kernel // 2 if pad is None else pad
        fan_in = cin * kernel * kernel
        self.w = Parameter(he_normal(rng, (cout, cin, kernel, kernel), fan_in, gain, dtype))
        self.b = Parameter(np.zeros(cout, dtype=dtype)) if bias else None

    def forward(self, x):
        bias = self.b.value if self.b is not None else None
        out, cols = F.conv2d_forward(x, self.w.value, bias, self.stride, self.pad)
        return out, (cols, x.shape)

    def backward(self, cache, dout):
        cols, x_shape = cache
        dx, dw, db = F.conv2d_backward(dout, cols, x_shape, self.w.value,
                                       self.stride, self.pad)
        self.w.grad += dw
        if self.b is not None:
            self.b.grad += db
        return dx


class Linear(Module):
    def __init__(self, din, dout, gain=np.sqrt(2.0), rng=None, dtype=np.float32,
                 bias_init=None):
        self.w = Parameter(he_normal(rng, (dout, din), din, gain, dtype))
        b = np.zeros(dout, dtype=dtype)
        if bias_init is not None:
            b[...] = np.asarray(bias_init, dtype=dtype)
        self.b = Parameter(b)

    def forward(self, x):
        return x @ self.w.value.T + self.b.value, x

    def backward(self, cache, dout):
        x = cache
        self.w.grad += dout.T @ x
        self.b.grad += dout.sum(axis=0)
        return dout @ self.w.value


class LeakyReLU(Module):
    def __init__(self, slope=0.2):
        self.slope = slope

    def forward(self, x):
        pos = x >= 0
        return np.where(pos, x, self.slope * x), pos

    def backward(self, cache, dout):
        pos = cache
        return np.where(pos, dout, self.slope * dout)


class ReLU(Module):
    def forward(self, x):
        pos = x > 0
        return np.where(pos, x, 0.0), pos

    def backward(self, cache, dout):
        return np.where(cache, dout, 0.0)


class Tanh(Module):
    def forward(self, x):
        y = np.tanh(x)
        return y, y

    def backward(self, cache, dout):
        y = cache
        return dout * (1.0 - y * y)


class Sigmoid(Module):
    def forward(self, x):
        y = 1.0 / (1.0 + np.exp(-x))
        return y, y

    def backward(self, cache, dout):
        y = cache
        return dout * y * (1.0 - y)


class Identity(Module):
    def forward(self, x):
        return x, None

    def backward(self, cache, dout):
        return dout


class InstanceNorm(Module):
    """Per-sample, per-channel spatial normalization with learnable affine."""

    def __init__(self, channels, eps=1e-5, dtype=np.float32):
        self.eps = eps
        self.gamma = Parameter(np.ones(channels, dtype=dtype))
        self.beta = Parameter(np.zeros(channels, dtype=dtype))

    def forward(self, x):
        mean, var = F.channel_moments(x)
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean[:, :, None, None]) * inv_std[:, :, None, None]
        y = self.gamma.value[None, :, None, None] * xhat + self.beta.value[None, :, None, None]
        return y, (xhat, inv_std)

    def backward(self, cache, dout):
        xhat, inv_std = cache
        self.gamma.grad += (dout * xhat).sum(axis=(0, 2, 3))
        self.beta.grad += dout.sum(axis=(0, 2, 3))
        g = dout * self.gamma.value[None, :, None, None]
        g_mean = g.mean(axis=(2, 3), keepdims=True)
        gx_mean = (g * xhat).mean(axis=(2, 3), keepdims=True)
        return inv_std[:, :, None, None] * (g - g_mean - xhat * gx_mean)


class AdaIN(Module):
    """Normalize each channel spatially, then apply external scale and bias.

    scale/bias arrive per sample as (N, C) arrays. No parameters of its own.
    """

    def __init__(self, eps=1e-5):
        self.eps = eps

    def forward(self, x, scale, bias):
        mean, var = F.channel_moments(x)
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean[:, :, None, None]) * inv_std[:, :, None, None]
        y = scale[:, :, None, None] * xhat + bias[:, :, None, None]
        return y, (xhat, inv_std, scale)

    def backward(self, cache, dout):
        xhat, inv_std, scale = cache
        dscale = (dout * xhat).sum(axis=(2, 3))
        dbias = dout.sum(axis=(2, 3))
        g = dout * scale[:, :, None, None]
        g_mean = g.mean(axis=(2, 3), keepdims=True)
        gx_mean = (g * xhat).mean(axis=(2, 3), keepdims=True)
        dx = inv_std[:, :, None, None] * (g - g_mean - xhat * gx_mean)
        return dx, dscale, dbias


class Upsample2x(Module):
    def forward(self, x):
        return F.upsample2x_forward(x), (x.shape[2], x.shape[3])

    def backward(self, cache, dout):
        in_h, in_w = cache
        return F.upsample2x_backward(dout, in_h, in_w)


class GlobalAvgPool(Module):
    def forward(self, x):
        return x.mean(axis=(2, 3)), x.shape

    def backward(self, cache, dout):
        n, c, h, w = cache
        return np.broadcast_to(dout[:, :, None, None], (n, c, h, w)) / (h * w)


class Chain(Module):
    """Plain sequential container for single-input layers."""

    def __init__(self, layers):
        self.layers = list(layers)

    def forward(self, x):
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(x)
            caches.append(cache)
        return x, caches

    def backward(self, caches, dout):
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            dout = layer.backward(cache, dout)
        return dout
