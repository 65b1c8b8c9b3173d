"""Central finite-difference gradient checking helpers.

Used by the test suite to verify every hand-written backward pass. Run
models in float64 when checking; float32 rounding swamps an h=1e-5 stencil.
"""

from __future__ import annotations

import numpy as np


def numerical_grad(fn, array, h=1e-5):
    """Central-difference gradient of scalar fn() w.r.t. `array`, in place.

    `fn` must read the current contents of `array` on each call.
    """
    grad = np.zeros_like(array)
    flat = array.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        hi = fn()
        flat[i] = orig - h
        lo = fn()
        flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * h)
    return grad


def relative_errors(analytic, numeric, floor=1e-6):
    """Elementwise |a - n| / max(|a|, |n|, floor)."""
    a = np.abs(analytic)
    n = np.abs(numeric)
    denom = np.maximum(np.maximum(a, n), floor)
    return np.abs(analytic - numeric) / denom


def check_param_grads(backward_fn, value_fn, named_params, h=1e-5, floor=1e-6):
    """Compare analytic parameter gradients against finite differences.

    `backward_fn()` runs forward+backward once, leaving gradients in the
    parameters; `value_fn()` returns the scalar loss without touching
    gradients. Returns {name: (analytic, numeric, rel_err)}.
    """
    for p in named_params.values():
        p.grad[...] = 0.0
    backward_fn()
    analytic = {k: p.grad.copy() for k, p in named_params.items()}
    results = {}
    for k, p in named_params.items():
        numeric = numerical_grad(value_fn, p.value, h=h)
        results[k] = (analytic[k], numeric, relative_errors(analytic[k], numeric, floor))
    return results


def fraction_within(results, tol=1e-3):
    """Fraction of all checked coordinates whose relative error is <= tol."""
    total = 0
    good = 0
    for _, (_, _, err) in results.items():
        total += err.size
        good += int((err <= tol).sum())
    return good / max(total, 1)
