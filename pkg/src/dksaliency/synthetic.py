"""Generated test scenes with exact ground truth.

Three scene families: one compact blob, two separated blobs of the same
object color, and one blob next to a checkered distractor patch whose
contrast is about half the object's. Every scene has a smooth background
gradient and mild pixel noise, so no region is perfectly flat.
"""
from dataclasses import dataclass

import numpy as np

KINDS = ("single", "two", "distractor")


@dataclass(frozen=True)
class Scene:
    name: str
    kind: str
    image: np.ndarray     # (H, W, 3) uint8
    truth: np.ndarray     # (H, W) bool
    blobs: tuple          # one (H, W) bool mask per salient object


def _ellipse(h, w, cx, cy, rx, ry):
    yy, xx = np.mgrid[0:h, 0:w]
    return ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0


def _contrasting(rng, base, min_dist=120.0):
    while True:
        c = rng.integers(0, 256, size=3).astype(np.float64)
        if np.linalg.norm(c - base) >= min_dist:
            return c


def make_scene(kind, seed, width=200, height=150):
    rng = np.random.default_rng(seed)
    h, w = height, width
    base = rng.integers(40, 216, size=3).astype(np.float64)
    tilt = rng.uniform(-25, 25, size=3)
    ramp = np.linspace(-0.5, 0.5, w)[None, :, None] * tilt
    img = np.broadcast_to(base, (h, w, 3)) + ramp

    def blob_at(cx, cy):
        r = rng.uniform(0.11, 0.16) * min(w, h) * 1.2
        return _ellipse(h, w, cx, cy, r * rng.uniform(0.8, 1.25), r * rng.uniform(0.8, 1.25))

    blobs = []
    if kind == "single":
        blobs.append(blob_at(w * rng.uniform(0.35, 0.65), h * rng.uniform(0.35, 0.65)))
    elif kind == "two":
        blobs.append(blob_at(w * rng.uniform(0.2, 0.3), h * rng.uniform(0.3, 0.7)))
        blobs.append(blob_at(w * rng.uniform(0.7, 0.8), h * rng.uniform(0.3, 0.7)))
    elif kind == "distractor":
        left = rng.random() < 0.5
        cx = w * (0.3 if left else 0.7)
        blobs.append(blob_at(cx, h * rng.uniform(0.4, 0.6)))
        # checkered patch on the other side; cells are larger than a
        # superpixel so the texture survives region averaging
        x0 = int(w * (0.62 if left else 0.08))
        y0 = int(h * rng.uniform(0.15, 0.4))
        pw, ph = int(w * 0.3), int(h * 0.45)
        cell = 20
        yy, xx = np.mgrid[0:ph, 0:pw]
        checks = (((yy // cell) + (xx // cell)) % 2).astype(np.float64)[..., None]
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        img[y0:y0 + ph, x0:x0 + pw] += (checks - 0.5) * rng.uniform(50, 70) * direction
    else:
        raise ValueError(f"unknown scene kind {kind!r}")

    color = _contrasting(rng, base)
    for mask in blobs:
        img[mask] = color + rng.uniform(-8, 8, size=3)
    img = img + rng.normal(0.0, 3.0, size=img.shape)
    truth = np.zeros((h, w), dtype=bool)
    for mask in blobs:
        truth |= mask
    return Scene(f"{kind}_{seed:03d}", kind, np.clip(np.round(img), 0, 255).astype(np.uint8),
                 truth, tuple(blobs))


def make_suite(n_per_kind=7, seed=0, width=200, height=150):
    """``3 * n_per_kind`` scenes cycling through all kinds."""
    scenes = []
    for i in range(n_per_kind):
        for j, kind in enumerate(KINDS):
            scenes.append(make_scene(kind, seed + 3 * i + j, width, height))
    return scenes
