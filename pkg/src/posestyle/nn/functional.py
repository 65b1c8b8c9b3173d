"""Array-level ops used by the layers, each with a matching backward pass.

Everything here is plain numpy on NCHW batches. Layers cache whatever a
backward pass needs and hand it back explicitly, so the same layer object
can be run on several inputs (real/fake discriminator passes, perceptual
taps on two images) without caches stepping on each other.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv_out_size(size: int, kernel: int, stride: int, pad: int) -> int:
    return (size + 2 * pad - kernel) // stride + 1


def _pad_hw(x, pad):
    if pad == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))


def im2col(x, kernel, stride, pad):
    """Unfold (N,C,H,W) into (N*Ho*Wo, C*k*k) patch rows.

    Returns the patch matrix plus the output spatial size.
    """
    xp = _pad_hw(x, pad)
    win = sliding_window_view(xp, (kernel, kernel), axis=(2, 3))
    win = win[:, :, ::stride, ::stride]           # (N, C, Ho, Wo, k, k)
    n, c, ho, wo = win.shape[:4]
    cols = win.transpose(0, 2, 3, 1, 4, 5).reshape(n * ho * wo, c * kernel * kernel)
    return np.ascontiguousarray(cols), (ho, wo)


def conv2d_forward(x, w, b, stride, pad):
    """Cross-correlation of (N,Cin,H,W) with (Cout,Cin,k,k) weights.

    Returns (out, cols); `cols` is the im2col matrix needed by the backward
    pass (kept rather than recomputed; it dominates the cost).
    """
    n = x.shape[0]
    cout, _, kernel, _ = w.shape
    cols, (ho, wo) = im2col(x, kernel, stride, pad)
    out = cols @ w.reshape(cout, -1).T
    if b is not None:
        out += b
    out = out.reshape(n, ho, wo, cout).transpose(0, 3, 1, 2)
    return np.ascontiguousarray(out), cols


def conv2d_backward(dout, cols, x_shape, w, stride, pad):
    """Gradients of conv2d_forward w.r.t. input, weights and bias."""
    n, cin, h, wd = x_shape
    cout, _, kernel, _ = w.shape
    ho, wo = dout.shape[2], dout.shape[3]
    dr = dout.transpose(0, 2, 3, 1).reshape(-1, cout)
    dw = (dr.T @ cols).reshape(w.shape)
    db = dr.sum(axis=0)
    dcols = dr @ w.reshape(cout, -1)
    dcols = dcols.reshape(n, ho, wo, cin, kernel, kernel).transpose(0, 3, 4, 5, 1, 2)
    hp, wp = h + 2 * pad, wd + 2 * pad
    dxp = np.zeros((n, cin, hp, wp), dtype=dout.dtype)
    for a in range(kernel):
        for b_ in range(kernel):
            dxp[:, :, a:a + stride * ho:stride, b_:b_ + stride * wo:stride] += dcols[:, :, a, b_]
    dx = dxp[:, :, pad:pad + h, pad:pad + wd] if pad else dxp
    return np.ascontiguousarray(dx), dw, db


@lru_cache(maxsize=64)
def _upsample2x_matrix(n_in: int, dtype_str: str):
    """Row-interpolation matrix (2n x n) for 2x bilinear upsampling.

    Uses the half-pixel-center convention with edge clamping, so the op is
    a fixed linear map and its adjoint is the exact backward pass.
    """
    n_out = 2 * n_in
    m = np.zeros((n_out, n_in), dtype=np.dtype(dtype_str))
    for i in range(n_out):
        src = min(max((i + 0.5) / 2.0 - 0.5, 0.0), n_in - 1.0)
        p0 = int(np.floor(src))
        p1 = min(p0 + 1, n_in - 1)
        t = src - p0
        m[i, p0] += 1.0 - t
        m[i, p1] += t
    return m


def upsample2x_forward(x):
    """Bilinear 2x upsampling of (N,C,H,W)."""
    uh = _upsample2x_matrix(x.shape[2], x.dtype.str)
    uw = _upsample2x_matrix(x.shape[3], x.dtype.str)
    return np.matmul(np.matmul(uh, x), uw.T)


def upsample2x_backward(dout, in_h, in_w):
    uh = _upsample2x_matrix(in_h, dout.dtype.str)
    uw = _upsample2x_matrix(in_w, dout.dtype.str)
    return np.matmul(np.matmul(uh.T, dout), uw)


def channel_moments(x, eps=0.0):
    """Per-sample, per-channel spatial mean and population variance.

    Returns arrays of shape (N, C). `eps` is not added here; callers add it
    where a variance enters a denominator.
    """
    mean = x.mean(axis=(2, 3))
    var = x.var(axis=(2, 3))
    if eps:
        var = var + eps
    return mean, var
