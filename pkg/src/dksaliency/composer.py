"""Final saliency assignment and the end-to-end pipeline.

``run_pipeline`` is split in two halves so parameter sweeps can reuse the
expensive part: ``analyze`` goes from pixels to the thresholded saliency
graph, ``refine`` runs the dense-subgraph step and builds the final map.
"""
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import dks, features, graphs, imaging, markov, slic
from .errors import PipelineError, SaliencyError


@dataclass(frozen=True)
class PipelineParams:
    superpixels: int = 250
    k_frac: float = 0.8
    gamma: float = 3.0
    seed: int = 0
    slic_m: float = 10.0

    def __post_init__(self):
        if self.superpixels < 4:
            raise ValueError(f"superpixels must be >= 4, got {self.superpixels}")
        if not 0.0 < self.k_frac <= 1.0:
            raise ValueError(f"k_frac must lie in (0, 1], got {self.k_frac}")
        if self.gamma < 1.0:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")


@dataclass
class Analysis:
    """Everything up to and including the thresholded saliency graph."""

    labels: np.ndarray
    stats: slic.RegionStats
    compactness: np.ndarray
    image_weights: np.ndarray
    pi: np.ndarray
    gbvs_regions: np.ndarray        # per-region intermediate saliency
    gbvs_weights: np.ndarray
    sparse: graphs.SparseGraph
    timings: dict = field(default_factory=dict)

    @property
    def n_regions(self):
        return self.stats.n

    @property
    def gbvs_map(self):
        return self.gbvs_regions[self.labels]


@dataclass
class PipelineResult:
    saliency: np.ndarray            # final map in [0, 1]
    dense: np.ndarray               # map before the final normalization
    dks: dks.DksResult
    k: int
    analysis: Analysis
    timings: dict = field(default_factory=dict)

    @property
    def gbvs_map(self):
        return self.analysis.gbvs_map


@contextmanager
def _stage(name, timings):
    t0 = time.perf_counter()
    try:
        yield
    except PipelineError:
        raise
    except (SaliencyError, ValueError, FloatingPointError) as exc:
        raise PipelineError(name, exc) from exc
    finally:
        timings[name] = time.perf_counter() - t0


def region_dense_values(result, n_regions, gamma):
    """Per-region value of the degree-enhanced dense-subgraph map.

    Members above the mean induced degree get ``(d / d_max) ** (1 / gamma)``,
    the others ``(d / d_max) ** gamma``; non-members get 0.
    """
    d = result.induced_degrees.astype(np.float64)
    out = np.zeros(n_regions)
    d_max = d.max(initial=0.0)
    if d_max <= 0.0:
        return out
    d_mean = d.mean()
    # scalar libm pow: numpy's vectorized pow can differ by an ulp across CPUs
    out[result.vertices] = [
        math.pow(di / d_max, 1.0 / gamma if di > d_mean else gamma) for di in d.tolist()
    ]
    return out


def dense_map(result, labels, gamma):
    labels = np.asarray(labels)
    return region_dense_values(result, int(labels.max()) + 1, gamma)[labels]


def finalize(m):
    return imaging.norm_map(m)


def choose_k(k_frac, n_regions):
    k = int(np.floor(k_frac * n_regions + 0.5))
    return min(max(k, 2), n_regions)


def analyze(img, params=PipelineParams()):
    timings = {}
    with _stage("input", timings):
        img = imaging.check_raster(img)
        h, w = img.shape[:2]
        diagonal = float(np.hypot(w, h))
    with _stage("lab", timings):
        lab = imaging.srgb_to_lab(img)
    with _stage("slic", timings):
        labels = slic.slic_segment(lab, params.superpixels, params.slic_m)
    with _stage("features", timings):
        planes = [lab[..., c] for c in range(3)]
        fused = [imaging.multiscale_channel(p) for p in planes]
        compact = features.compactness_map([imaging.norm_map(p) for p in planes])
        stats = slic.region_stats(labels, fused, compact)
    with _stage("image_graph", timings):
        w_image = graphs.build_image_graph(stats, diagonal)
    with _stage("markov", timings):
        if w_image.max() > 0.0:
            pi = markov.stationary(markov.transition_matrix(w_image))
        else:
            # no contrast anywhere: every region is equally (un)salient
            pi = np.full(stats.n, 1.0 / stats.n)
        gbvs_regions = markov.region_gbvs_values(pi)
    with _stage("gbvs_graph", timings):
        # the map is constant per region, so region means are the region values
        w_gbvs = graphs.build_gbvs_graph(gbvs_regions, stats, diagonal)
    with _stage("threshold", timings):
        if w_gbvs.max() > 0.0:
            sparse = graphs.entropy_threshold(w_gbvs)
        else:
            sparse = graphs.SparseGraph(np.zeros_like(w_gbvs, dtype=bool), threshold=float("nan"))
    return Analysis(labels, stats, compact, w_image, pi, gbvs_regions, w_gbvs, sparse, timings)


def refine(analysis, k_frac=0.8, gamma=3.0, seed=0):
    timings = {}
    n = analysis.n_regions
    with _stage("dks", timings):
        k = choose_k(k_frac, n)
        found = dks.dense_k_subgraph(analysis.sparse, k, seed)
    with _stage("compose", timings):
        dense = region_dense_values(found, n, gamma)[analysis.labels]
        final = finalize(dense)
    return PipelineResult(final, dense, found, k, analysis, timings)


def run_pipeline(img, params=PipelineParams()):
    """Full image -> saliency map computation; deterministic for fixed params."""
    front = analyze(img, params)
    result = refine(front, params.k_frac, params.gamma, params.seed)
    result.timings = {**front.timings, **result.timings}
    return result
