"""Image I/O, sRGB to CIELab conversion and map normalization.

Images are plain numpy arrays: rasters are ``(H, W, 3)`` uint8, Lab images
``(H, W, 3)`` float64 and scalar maps ``(H, W)`` float64. Pixel coordinates
are ``x`` = column index, ``y`` = row index.
"""
import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ImageError

MIN_SIDE = 16

# linear sRGB -> XYZ (IEC 61966-2-1, D65)
RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])

# D65 white as the image of sRGB white under the matrix, (0.95047, 1.0, 1.08883)
# to 7 digits; using the matrix's own white keeps grays exactly neutral
D65_WHITE = RGB_TO_XYZ.sum(axis=1)

_LAB_EPSILON = 216.0 / 24389.0
_LAB_KAPPA = 24389.0 / 27.0


def check_raster(img):
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ImageError(f"expected an (H, W, 3) raster, got shape {img.shape}")
    h, w = img.shape[:2]
    if w < MIN_SIDE or h < MIN_SIDE:
        raise ImageError(f"image is {w}x{h}; minimum size is {MIN_SIDE}x{MIN_SIDE}")
    return img.astype(np.uint8, copy=False)


def load_image(path):
    """Decode a PNG/PPM (or anything Pillow reads) into an RGB uint8 array."""
    if not os.path.exists(path):
        raise ImageError(f"input not found: {path}")
    try:
        with Image.open(path) as im:
            im.load()
            rgb = np.array(im.convert("RGB"))
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise ImageError(f"cannot decode {path}: {exc}") from exc
    return check_raster(rgb)


def load_gray(path):
    """Read an image as a single-channel uint8 array (maps, ground truth)."""
    if not os.path.exists(path):
        raise ImageError(f"input not found: {path}")
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("I;16", "I;16B", "I"):
                arr = np.array(im).astype(np.float64)
                return np.round(arr * 255.0 / max(arr.max(), 1.0)).astype(np.uint8)
            return np.array(im.convert("L"))
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise ImageError(f"cannot decode {path}: {exc}") from exc


def to_uint8(m):
    """Quantize a [0, 1] map to 8 bits as round(255 * v)."""
    m = np.clip(np.asarray(m, dtype=np.float64), 0.0, 1.0)
    return np.floor(m * 255.0 + 0.5).astype(np.uint8)


def save_map_png(m, path):
    Image.fromarray(to_uint8(m), mode="L").save(path, format="PNG")


def save_labels_png(labels, path):
    """Write a label map as a 16-bit grayscale PNG (debug output)."""
    arr = np.asarray(labels)
    if arr.max(initial=0) > 65535:
        raise ImageError("label map does not fit in 16 bits")
    Image.fromarray(arr.astype(np.uint16)).save(path, format="PNG")


def srgb_to_lab(img):
    """Convert 8-bit sRGB to CIELab (D65 white, piecewise sRGB transfer curve)."""
    rgb = np.asarray(img, dtype=np.float64) / 255.0
    linear = np.where(rgb <= 0.04045, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4)
    xyz = linear @ RGB_TO_XYZ.T
    t = xyz / D65_WHITE
    f = np.where(t > _LAB_EPSILON, np.cbrt(t), (_LAB_KAPPA * t + 16.0) / 116.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    lab[..., 0] = np.clip(lab[..., 0], 0.0, 100.0)
    return lab


def norm_map(m):
    """Min-max normalize a map to [0, 1].

    A map whose spread is negligible relative to its magnitude carries no
    contrast and is mapped to all zeros.
    """
    m = np.asarray(m, dtype=np.float64)
    lo = m.min()
    hi = m.max()
    spread = hi - lo
    if spread <= 1e-12 * max(abs(lo), abs(hi)):
        return np.zeros_like(m)
    return (m - lo) / spread


def downsample2(m):
    """Halve resolution by 2x2 box averaging; a trailing odd row/column is dropped."""
    h, w = m.shape
    h2, w2 = h // 2, w // 2
    c = m[: 2 * h2, : 2 * w2]
    return 0.25 * (c[0::2, 0::2] + c[1::2, 0::2] + c[0::2, 1::2] + c[1::2, 1::2])


def build_scales(m):
    """Return ``[m, m at 1/2, m at 1/4]`` linear resolution."""
    m = np.asarray(m, dtype=np.float64)
    if min(m.shape) < 4:
        raise ImageError(f"map of shape {m.shape} is too small for three scales")
    half = downsample2(m)
    return [m, half, downsample2(half)]


def _axis_weights(n_out, n_in):
    # pixel-center aligned sampling positions, clamped at the borders
    pos = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    pos = np.clip(pos, 0.0, n_in - 1)
    i0 = np.floor(pos).astype(int)
    i1 = np.minimum(i0 + 1, n_in - 1)
    return i0, i1, pos - i0


def resize_bilinear(m, shape):
    m = np.asarray(m, dtype=np.float64)
    if m.shape == tuple(shape):
        return m.copy()
    y0, y1, fy = _axis_weights(shape[0], m.shape[0])
    x0, x1, fx = _axis_weights(shape[1], m.shape[1])
    fx = fx[None, :]
    top = m[y0][:, x0] + fx * (m[y0][:, x1] - m[y0][:, x0])
    bottom = m[y1][:, x0] + fx * (m[y1][:, x1] - m[y1][:, x0])
    return top + fy[:, None] * (bottom - top)


def fuse_scales(maps, shape=None):
    """Upsample each map to the base resolution, average, and renormalize.

    The inputs are expected to be normalized already; ``shape`` defaults to
    the shape of the first (finest) map.
    """
    if shape is None:
        shape = np.shape(maps[0])
    acc = np.zeros(shape, dtype=np.float64)
    for m in maps:
        acc += resize_bilinear(m, shape)
    return norm_map(acc / len(maps))


def multiscale_channel(m):
    """Normalize a channel at scales 1, 1/2, 1/4 and fuse back to full resolution."""
    return fuse_scales([norm_map(s) for s in build_scales(m)], np.shape(m))
