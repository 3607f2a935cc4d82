"""SLIC superpixels and per-region statistics.

Plain numpy implementation of simple linear iterative clustering: grid
seeding with gradient perturbation, windowed k-means in (L, a, b, x, y) and
a connectivity pass that merges small fragments into their largest neighbor.
"""
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import SegmentationError

N_ITERATIONS = 10


@dataclass(frozen=True)
class RegionStats:
    """Per-region summary; index ``i`` refers to superpixel label ``i``."""

    centroids: np.ndarray      # (N, 2) mean (x, y) pixel coordinates
    features: np.ndarray       # (N, 3) mean fused L*, a*, b* channel values
    compactness: np.ndarray    # (N,) mean fused compactness
    pixel_count: np.ndarray    # (N,)

    @property
    def n(self):
        return len(self.pixel_count)


def _gradient(lab):
    # squared central differences; borders replicate
    p = np.pad(lab, ((1, 1), (1, 1), (0, 0)), mode="edge")
    dx = p[1:-1, 2:] - p[1:-1, :-2]
    dy = p[2:, 1:-1] - p[:-2, 1:-1]
    return (dx ** 2).sum(axis=2) + (dy ** 2).sum(axis=2)


def _seed_grid(h, w, target):
    step = np.sqrt(h * w / target)
    nx = max(1, int(round(w / step)))
    ny = max(1, int(round(h / step)))
    xs = (np.arange(nx) + 0.5) * (w / nx) - 0.5
    ys = (np.arange(ny) + 0.5) * (h / ny) - 0.5
    gx, gy = np.meshgrid(xs, ys)
    return gx.ravel(), gy.ravel(), step


def _perturb(xs, ys, grad):
    """Move each seed to the lowest-gradient pixel of its 3x3 neighborhood.

    A seed whose own pixel is already minimal keeps its exact position.
    """
    h, w = grad.shape
    xs = xs.copy()
    ys = ys.copy()
    for i in range(len(xs)):
        cx = int(round(xs[i]))
        cy = int(round(ys[i]))
        best = grad[cy, cx]
        bx, by = cx, cy
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                x, y = cx + dx, cy + dy
                if 0 <= x < w and 0 <= y < h and grad[y, x] < best:
                    best = grad[y, x]
                    bx, by = x, y
        if (bx, by) != (cx, cy):
            xs[i], ys[i] = bx, by
    return xs, ys


def _enforce_connectivity(labels, min_size):
    """Split labels into 4-connected components and merge small ones.

    Components smaller than ``min_size`` are merged, smallest first, into the
    adjacent component with the most pixels (ties to the lower component id).
    Returns labels renumbered 0..N-1 in raster order of first appearance.
    """
    h, w = labels.shape
    comp = np.full((h, w), -1, dtype=np.int64)
    n_comp = 0
    shifted = labels - labels.min() + 1
    for lab, sl in enumerate(ndimage.find_objects(shifted), start=1):
        if sl is None:
            continue
        mask = shifted[sl] == lab
        cc, k = ndimage.label(mask)
        sub = comp[sl]
        sub[mask] = cc[mask] - 1 + n_comp
        n_comp += k

    flat = comp.ravel()
    sizes = np.bincount(flat, minlength=n_comp)

    pairs = [
        np.stack([comp[:, :-1].ravel(), comp[:, 1:].ravel()], axis=1),
        np.stack([comp[:-1, :].ravel(), comp[1:, :].ravel()], axis=1),
    ]
    pairs = np.concatenate(pairs)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    pairs = np.unique(np.sort(pairs, axis=1), axis=0)
    neighbors = [set() for _ in range(n_comp)]
    for a, b in pairs:
        neighbors[a].add(int(b))
        neighbors[b].add(int(a))

    parent = list(range(n_comp))
    size = sizes.astype(np.int64).tolist()

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for c in np.argsort(sizes, kind="stable"):
        r = find(int(c))
        if size[r] >= min_size:
            continue
        cand = {find(n) for n in neighbors[r]} - {r}
        if not cand:
            continue
        target = min(cand, key=lambda t: (-size[t], t))
        parent[r] = target
        size[target] += size[r]
        neighbors[target] |= neighbors[r]
        neighbors[r] = set()

    roots = np.array([find(c) for c in range(n_comp)])
    merged = roots[flat]
    uniq, first = np.unique(merged, return_index=True)
    remap = np.empty(n_comp, dtype=np.int64)
    remap[uniq[np.argsort(first)]] = np.arange(len(uniq))
    return remap[merged].reshape(h, w)


def slic_segment(lab, target_regions=250, compactness_weight=10.0):
    """Segment a Lab image into roughly ``target_regions`` superpixels.

    Returns an ``(H, W)`` int array of labels in ``[0, N)``, each region
    4-connected.
    """
    lab = np.asarray(lab, dtype=np.float64)
    h, w = lab.shape[:2]
    if target_regions < 4 or target_regions > h * w / 16:
        raise SegmentationError(
            f"target_regions={target_regions} outside [4, {h * w // 16}] for a {w}x{h} image")

    xs, ys, step = _seed_grid(h, w, target_regions)
    xs, ys = _perturb(xs, ys, _gradient(lab))
    k = len(xs)
    centers = np.empty((k, 5))
    for i in range(k):
        cx, cy = int(round(xs[i])), int(round(ys[i]))
        centers[i, :3] = lab[cy, cx]
    centers[:, 3] = xs
    centers[:, 4] = ys

    spatial = (compactness_weight / step) ** 2
    radius = int(np.ceil(step))
    xx = np.arange(w, dtype=np.float64)
    yy = np.arange(h, dtype=np.float64)
    labels = np.full((h, w), -1, dtype=np.int64)
    alive = np.ones(k, dtype=bool)

    for _ in range(N_ITERATIONS):
        dist = np.full((h, w), np.inf)
        labels.fill(-1)
        for i in np.flatnonzero(alive):
            cl, ca, cb, cx, cy = centers[i]
            x0 = max(0, int(cx) - radius)
            x1 = min(w, int(cx) + radius + 1)
            y0 = max(0, int(cy) - radius)
            y1 = min(h, int(cy) + radius + 1)
            if x0 >= x1 or y0 >= y1:
                continue
            patch = lab[y0:y1, x0:x1]
            dc = ((patch - centers[i, :3]) ** 2).sum(axis=2)
            ds = (xx[x0:x1][None, :] - cx) ** 2 + (yy[y0:y1][:, None] - cy) ** 2
            d = dc + spatial * ds
            win = dist[y0:y1, x0:x1]
            better = d < win
            win[better] = d[better]
            labels[y0:y1, x0:x1][better] = i

        flat = labels.ravel()
        valid = flat >= 0
        idx = flat[valid]
        counts = np.bincount(idx, minlength=k)
        alive = counts > 0
        grid_x = np.broadcast_to(xx[None, :], (h, w)).ravel()[valid]
        grid_y = np.broadcast_to(yy[:, None], (h, w)).ravel()[valid]
        cols = [lab[..., c].ravel()[valid] for c in range(3)] + [grid_x, grid_y]
        for c, values in enumerate(cols):
            sums = np.bincount(idx, weights=values, minlength=k)
            centers[alive, c] = sums[alive] / counts[alive]

    return _enforce_connectivity(labels, step * step / 4.0)


def region_stats(labels, channels, compact_map):
    """Per-region centroid, mean channel values, mean compactness and size."""
    labels = np.asarray(labels)
    h, w = labels.shape
    n = int(labels.max()) + 1
    flat = labels.ravel()
    counts = np.bincount(flat, minlength=n).astype(np.float64)

    def mean_of(values):
        return np.bincount(flat, weights=np.asarray(values, dtype=np.float64).ravel(),
                           minlength=n) / counts

    yy, xx = np.mgrid[0:h, 0:w]
    centroids = np.stack([mean_of(xx), mean_of(yy)], axis=1)
    features = np.stack([mean_of(c) for c in channels], axis=1)
    return RegionStats(
        centroids=centroids,
        features=features,
        compactness=mean_of(compact_map),
        pixel_count=counts.astype(np.int64),
    )


def region_means(labels, values):
    """Mean of ``values`` over each region."""
    labels = np.asarray(labels)
    flat = labels.ravel()
    n = int(flat.max()) + 1
    counts = np.bincount(flat, minlength=n)
    return np.bincount(flat, weights=np.asarray(values, dtype=np.float64).ravel(),
                       minlength=n) / counts
