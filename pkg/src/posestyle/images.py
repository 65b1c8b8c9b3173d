"""Image array conventions and PNG helpers.

In-memory images are (3, H, W) float arrays in [-1, 1]; files store 8-bit
RGB. The two are linked by ``x = q / 127.5 - 1`` for q in 0..255, so a
save/load round trip of a quantized image is exact.
"""

from __future__ import annotations

import numpy as np
from PIL import Image as PILImage


def u8_from_float(img):
    """(3,H,W) float in [-1,1] -> (H,W,3) uint8."""
    q = np.round((np.clip(img, -1.0, 1.0) + 1.0) * 127.5)
    return q.astype(np.uint8).transpose(1, 2, 0)


def float_from_u8(arr):
    """(H,W,3) uint8 -> (3,H,W) float32 in [-1,1]."""
    return (arr.astype(np.float32) / 127.5 - 1.0).transpose(2, 0, 1)


def quantize01(c):
    """Color channel in [0,1] -> the 8-bit level it renders at."""
    return int(round(float(c) * 255.0))


def unit_from_01(rgb):
    """[0,1] RGB triple -> quantized in-memory [-1,1] triple."""
    return np.array([quantize01(c) / 127.5 - 1.0 for c in rgb], dtype=np.float32)


def save_png(path, img):
    """Save a (3,H,W) float image or (H,W) uint8 label map as PNG."""
    arr = np.asarray(img)
    if arr.ndim == 3:
        PILImage.fromarray(u8_from_float(arr), mode="RGB").save(path)
    else:
        PILImage.fromarray(arr.astype(np.uint8), mode="L").save(path)


def load_png_rgb(path):
    with PILImage.open(path) as im:
        arr = np.asarray(im.convert("RGB"))
    return float_from_u8(arr)


def load_png_labels(path):
    with PILImage.open(path) as im:
        arr = np.asarray(im.convert("L"))
    return arr.astype(np.uint8)


def hstack_panels(panels, pad=2, pad_value=1.0):
    """Concatenate (3,H,W) images horizontally with a separator strip."""
    panels = [np.asarray(p) for p in panels]
    h = panels[0].shape[1]
    strip = np.full((3, h, pad), pad_value, dtype=panels[0].dtype)
    pieces = []
    for i, p in enumerate(panels):
        if i:
            pieces.append(strip)
        pieces.append(p)
    return np.concatenate(pieces, axis=2)
