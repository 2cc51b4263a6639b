"""Synthetic two-class scene images for desk-scale runs.

Each scene is a light background with a random color, a gentle linear
brightness gradient and pixel noise, crossed by one or two thin (1-2 px)
dark upright poles. The class is the half of the image holding the poles:
``left`` or ``right``. Poles are thinner than a pooling block, so block
averaging dilutes them while boundary-following superpixels keep them.
"""

from __future__ import annotations

import os

import numpy as np

from scenedbm.netpbm import Image, write_netpbm

CLASSES = ("left", "right")


def render_scene(label: int, rng: np.random.Generator, size: int = 32, noise: float = 8.0) -> Image:
    if label not in (0, 1):
        raise ValueError(f"unknown class {label}")
    base = rng.uniform(140, 230, size=3)
    gx, gy = rng.uniform(-30, 30, size=2)
    yy, xx = np.mgrid[0:size, 0:size] / size - 0.5
    img = base[None, None, :] + (gx * xx + gy * yy)[:, :, None]
    half = size // 2
    lo = 2 if label == 0 else half + 1
    for _ in range(rng.integers(1, 3)):
        width = rng.integers(1, 3)
        x0 = rng.integers(lo, lo + half - 4)
        img[:, x0:x0 + width] = rng.uniform(10, 70, size=3)
    img += rng.normal(0.0, noise, size=img.shape)
    return Image(np.clip(np.rint(img), 0, 255).astype(np.uint8))


def write_dataset(root, n_per_class: int, size: int = 32, seed: int = 0) -> str:
    """Write ``n_per_class`` PPM images per class under ``root/<class>/``."""
    rng = np.random.default_rng(seed)
    for label, name in enumerate(CLASSES):
        folder = os.path.join(root, name)
        os.makedirs(folder, exist_ok=True)
        for i in range(n_per_class):
            write_netpbm(os.path.join(folder, f"{name}_{i:04d}.ppm"), render_scene(label, rng, size))
    return str(root)
