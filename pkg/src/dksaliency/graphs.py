"""Complete region graphs and their entropy-thresholded sparse form.

Edge weights are products of a feature-contrast term, a spatial-proximity
term ``1 - dist / diagonal`` and a compactness-contrast term
``1 + |c_i - c_j| / 2``. Weight matrices are dense symmetric ``(N, N)``
float arrays with a zero diagonal.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import GraphError

# thresholds as fractions of the maximum edge weight: 0.10, 0.15, ..., 0.95
THRESHOLD_FRACTIONS = np.round(np.arange(10, 100, 5) / 100.0, 2)


@dataclass(frozen=True)
class SparseGraph:
    """Unweighted undirected graph kept after thresholding."""

    adjacency: np.ndarray          # (N, N) bool, symmetric, False diagonal
    threshold: float = 0.0
    entropy: float = 0.0
    thresholds: np.ndarray = field(default_factory=lambda: np.empty(0))
    entropies: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def n(self):
        return self.adjacency.shape[0]

    def edges(self):
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return np.stack([i, j], axis=1)

    @property
    def n_edges(self):
        return int(np.triu(self.adjacency, 1).sum())

    @classmethod
    def from_edges(cls, n, edges):
        adj = np.zeros((n, n), dtype=bool)
        for a, b in edges:
            if a == b:
                raise GraphError(f"self-loop on vertex {a}")
            adj[a, b] = adj[b, a] = True
        return cls(adj)


def spatial_weights(centroids, diagonal):
    c = np.asarray(centroids, dtype=np.float64)
    dist = np.sqrt(((c[:, None, :] - c[None, :, :]) ** 2).sum(axis=2))
    return 1.0 - dist / diagonal


def compactness_weights(compactness):
    c = np.asarray(compactness, dtype=np.float64)
    return 1.0 + np.abs(c[:, None] - c[None, :]) / 2.0


def _combine(feature, spatial, compact):
    w = feature * spatial * compact
    np.fill_diagonal(w, 0.0)
    return np.maximum(w, 0.0)


def build_image_graph(stats, diagonal):
    """Complete graph whose feature term is the Lab-mean Euclidean distance."""
    if stats.n < 2:
        raise GraphError("a region graph needs at least two regions")
    f = stats.features
    feature = np.sqrt(((f[:, None, :] - f[None, :, :]) ** 2).sum(axis=2))
    return _combine(feature, spatial_weights(stats.centroids, diagonal),
                    compactness_weights(stats.compactness))


def build_gbvs_graph(region_saliency, stats, diagonal):
    """Complete graph on the same regions, contrasting mean intermediate saliency."""
    s = np.asarray(region_saliency, dtype=np.float64)
    if len(s) != stats.n:
        raise GraphError(f"{len(s)} saliency values for {stats.n} regions")
    feature = np.abs(s[:, None] - s[None, :])
    return _combine(feature, spatial_weights(stats.centroids, diagonal),
                    compactness_weights(stats.compactness))


def binary_entropy(r):
    """-r ln r - (1-r) ln(1-r), with 0 ln 0 = 0."""
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros_like(r)
    inside = (r > 0.0) & (r < 1.0)
    ri = r[inside]
    out[inside] = -ri * np.log(ri) - (1.0 - ri) * np.log1p(-ri)
    return out


def entropy_curve(edge_weights):
    """Entropy of the discarded/kept weight split at each grid threshold.

    Returns ``(thresholds, entropies)``; thresholds are absolute weights.
    """
    w = np.asarray(edge_weights, dtype=np.float64).ravel()
    total = w.sum()
    wmax = w.max(initial=0.0)
    if total <= 0.0 or wmax <= 0.0:
        raise GraphError("degenerate graph: all edge weights are zero")
    thresholds = THRESHOLD_FRACTIONS * wmax
    discarded = np.array([w[w <= t].sum() for t in thresholds])
    return thresholds, binary_entropy(discarded / total)


def entropy_threshold(weights):
    """Keep the edges of a complete graph heavier than the max-entropy threshold."""
    w = np.asarray(weights, dtype=np.float64)
    iu = np.triu_indices(w.shape[0], 1)
    thresholds, entropies = entropy_curve(w[iu])
    best = int(np.argmax(entropies))  # first maximum = smallest threshold
    t = thresholds[best]
    adj = w > t
    np.fill_diagonal(adj, False)
    return SparseGraph(adj, threshold=float(t), entropy=float(entropies[best]),
                       thresholds=thresholds, entropies=entropies)


def sparse_degrees(g):
    return g.adjacency.sum(axis=1).astype(np.int64)
