"""Value-cluster compactness feature.

Each normalized channel is quantized to 256 levels. Every occupied level
``n`` gets an observation vector ``[mean x, mean y, beta * n]`` and the
vectors are grouped by k-means. A cluster whose pixels are spatially
concentrated is compact; every pixel inherits the compactness of the
cluster its value falls in.
"""
from dataclasses import dataclass

import numpy as np

from .imaging import norm_map

N_LEVELS = 256
N_CLUSTERS = 8
ALPHA = 10.0
MIN_AREA_FRACTION = 0.03


@dataclass(frozen=True)
class Observations:
    levels: np.ndarray    # (m,) occupied quantization levels, ascending
    vectors: np.ndarray   # (m, 3) [mean x, mean y, beta * level]
    counts: np.ndarray    # (m,) pixels per level
    sum_x: np.ndarray
    sum_y: np.ndarray
    sum_xx: np.ndarray
    sum_yy: np.ndarray


@dataclass(frozen=True)
class ValueCluster:
    levels: np.ndarray
    pixel_count: int
    sigma_x: float
    sigma_y: float
    compactness: float


def quantize_channel(m):
    """Scale a [0, 1] map to 0..255, rounding halves up."""
    q = np.floor(np.asarray(m, dtype=np.float64) * 255.0 + 0.5)
    return np.clip(q, 0, 255).astype(np.int64)


def observation_vectors(q):
    h, w = q.shape
    beta = max(w, h) / 256.0
    yy, xx = np.mgrid[0:h, 0:w]
    flat = q.ravel()

    def per_level(values=None):
        v = None if values is None else values.ravel().astype(np.float64)
        return np.bincount(flat, weights=v, minlength=N_LEVELS)

    counts = per_level()
    levels = np.flatnonzero(counts)
    sx, sy = per_level(xx), per_level(yy)
    sxx, syy = per_level(xx * xx), per_level(yy * yy)
    c = counts[levels]
    vectors = np.stack([sx[levels] / c, sy[levels] / c, beta * levels], axis=1)
    return Observations(levels, vectors, c.astype(np.int64),
                        sx[levels], sy[levels], sxx[levels], syy[levels])


def kmeans(vectors, k, max_iter=100, tol=1e-6):
    """Lloyd's k-means with seeds at evenly spaced ranks of the input order.

    Callers pass vectors sorted by value, so the seeds spread over the value
    range. Empty clusters are dropped. Returns ``(assignment, centers)`` with
    clusters renumbered densely.
    """
    x = np.asarray(vectors, dtype=np.float64)
    m = len(x)
    k = min(k, m)
    ranks = np.round(np.linspace(0, m - 1, k)).astype(int)
    centers = x[ranks].copy()
    assign = np.zeros(m, dtype=int)
    for _ in range(max_iter):
        d = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assign = np.argmin(d, axis=1)
        new = centers.copy()
        for j in range(len(centers)):
            members = assign == j
            if members.any():
                new[j] = x[members].mean(axis=0)
        shift = np.sqrt(((new - centers) ** 2).sum(axis=1)).max()
        centers = new
        if shift < tol:
            break
    d = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    assign = np.argmin(d, axis=1)
    used = np.unique(assign)
    remap = np.full(len(centers), -1)
    remap[used] = np.arange(len(used))
    return remap[assign], centers[used]


def cluster_compactness(sigma_x, sigma_y, pixel_count, width, height, alpha=ALPHA):
    if pixel_count < MIN_AREA_FRACTION * width * height:
        return 0.0
    return float(np.exp(-alpha * (sigma_x + sigma_y) / np.hypot(width, height)))


def cluster_observations(obs, width, height, k=N_CLUSTERS, alpha=ALPHA):
    """Group the observation vectors and score each group's compactness."""
    assign, _ = kmeans(obs.vectors, k)
    clusters = []
    for j in range(assign.max() + 1):
        members = assign == j
        n = obs.counts[members].sum()
        mx = obs.sum_x[members].sum() / n
        my = obs.sum_y[members].sum() / n
        # population variance from pooled moments
        vx = max(obs.sum_xx[members].sum() / n - mx * mx, 0.0)
        vy = max(obs.sum_yy[members].sum() / n - my * my, 0.0)
        sx, sy = np.sqrt(vx), np.sqrt(vy)
        clusters.append(ValueCluster(
            levels=obs.levels[members],
            pixel_count=int(n),
            sigma_x=float(sx),
            sigma_y=float(sy),
            compactness=cluster_compactness(sx, sy, n, width, height, alpha),
        ))
    return clusters


def compactness_map_per_channel(channel, k=N_CLUSTERS, alpha=ALPHA):
    q = quantize_channel(channel)
    h, w = q.shape
    clusters = cluster_observations(observation_vectors(q), w, h, k, alpha)
    lut = np.zeros(N_LEVELS)
    for c in clusters:
        lut[c.levels] = c.compactness
    return lut[q]


def fuse_compactness(c_l, c_a, c_b):
    return norm_map(np.sqrt(np.square(c_l) + np.square(c_a) + np.square(c_b)))


def compactness_map(channels, k=N_CLUSTERS, alpha=ALPHA):
    """Fused compactness map from three normalized full-resolution channels."""
    return fuse_compactness(*(compactness_map_per_channel(c, k, alpha) for c in channels))
