"""Precision/recall, F-measure and MAE over saliency maps and ground truth.

Maps are evaluated as 8-bit images: ``binarize`` marks a pixel salient when
its value is strictly above the threshold, so threshold 255 gives an empty
mask and closes the PR curve.
"""
import csv
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationError
from .imaging import load_gray

log = logging.getLogger(__name__)

N_THRESHOLDS = 256
GT_CUTOFF = 127
IMAGE_EXTENSIONS = (".png", ".ppm", ".pgm", ".pbm", ".bmp", ".jpg", ".jpeg", ".tif", ".tiff")


def binarize(m8, t):
    return np.asarray(m8) > t


def _same_shape(a, b):
    if np.shape(a) != np.shape(b):
        raise EvaluationError(f"dimension mismatch: {np.shape(a)} vs {np.shape(b)}")


def pr_point(mask, gt):
    """Precision and recall of a binary mask; empty denominators give 1."""
    _same_shape(mask, gt)
    mask = np.asarray(mask, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    tp = np.count_nonzero(mask & gt)
    n_mask = np.count_nonzero(mask)
    n_gt = np.count_nonzero(gt)
    precision = tp / n_mask if n_mask else 1.0
    recall = tp / n_gt if n_gt else 1.0
    return float(precision), float(recall)


def f_measure(p, r, alpha=1.0):
    denom = alpha * p + r
    if denom <= 0.0:
        return 0.0
    return float((1.0 + alpha) * p * r / denom)


def adaptive_threshold(m):
    """Twice the mean saliency, clamped to [0, max]."""
    m = np.asarray(m, dtype=np.float64)
    return float(min(max(2.0 * m.mean(), 0.0), m.max()))


def mae(m, gt):
    _same_shape(m, gt)
    diff = np.abs(np.asarray(m, dtype=np.float64) - np.asarray(gt, dtype=np.float64))
    # correctly rounded sum, so the result does not depend on summation order
    return math.fsum(diff.ravel().tolist()) / diff.size


def pr_curve(m8, gt):
    """(precision, recall) arrays over thresholds 0..255."""
    m8 = np.asarray(m8)
    _same_shape(m8, gt)
    gt = np.asarray(gt, dtype=bool)
    # cumulative histograms give all 256 thresholds in one pass
    hist_all = np.bincount(m8.ravel(), minlength=N_THRESHOLDS)
    hist_tp = np.bincount(m8[gt].ravel(), minlength=N_THRESHOLDS)
    above_all = hist_all[::-1].cumsum()[::-1]
    above_tp = hist_tp[::-1].cumsum()[::-1]
    # pixels with value > t are those with value >= t + 1
    n_mask = np.append(above_all[1:], 0)[:N_THRESHOLDS]
    tp = np.append(above_tp[1:], 0)[:N_THRESHOLDS]
    n_gt = int(gt.sum())
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(n_mask > 0, tp / np.maximum(n_mask, 1), 1.0)
    recall = tp / n_gt if n_gt else np.ones(N_THRESHOLDS)
    return precision.astype(np.float64), np.asarray(recall, dtype=np.float64)


@dataclass(frozen=True)
class ImageScore:
    name: str
    precision: np.ndarray     # (256,)
    recall: np.ndarray        # (256,)
    adaptive_precision: float
    adaptive_recall: float
    adaptive_f: float
    mae: float


def score_map(m8, gt, name=""):
    """All metrics for one 8-bit map against a boolean ground truth."""
    m8 = np.asarray(m8, dtype=np.uint8)
    gt = np.asarray(gt, dtype=bool)
    precision, recall = pr_curve(m8, gt)
    t_a = adaptive_threshold(m8)
    ap, ar = pr_point(m8 > t_a, gt)
    return ImageScore(name, precision, recall, ap, ar, f_measure(ap, ar),
                      mae(m8 / 255.0, gt))


@dataclass
class EvalReport:
    scores: list
    skipped: list = field(default_factory=list)

    @property
    def n_images(self):
        return len(self.scores)

    @property
    def mean_precision_curve(self):
        return np.mean([s.precision for s in self.scores], axis=0)

    @property
    def mean_recall_curve(self):
        return np.mean([s.recall for s in self.scores], axis=0)

    def _mean(self, attr):
        return float(np.mean([getattr(s, attr) for s in self.scores]))

    @property
    def precision(self):
        return self._mean("adaptive_precision")

    @property
    def recall(self):
        return self._mean("adaptive_recall")

    @property
    def f_measure(self):
        return self._mean("adaptive_f")

    @property
    def mae(self):
        return self._mean("mae")

    def write_csv(self, out_dir):
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "pr_curve.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["threshold", "mean_precision", "mean_recall"])
            for t, (p, r) in enumerate(zip(self.mean_precision_curve, self.mean_recall_curve)):
                w.writerow([t, f"{p:.6f}", f"{r:.6f}"])
        with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["precision", "recall", "f_measure", "mae", "n_images"])
            w.writerow([f"{self.precision:.6f}", f"{self.recall:.6f}",
                        f"{self.f_measure:.6f}", f"{self.mae:.6f}", self.n_images])
        with open(os.path.join(out_dir, "per_image.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["name", "precision", "recall", "f_measure", "mae"])
            for s in self.scores:
                w.writerow([s.name, f"{s.adaptive_precision:.6f}", f"{s.adaptive_recall:.6f}",
                            f"{s.adaptive_f:.6f}", f"{s.mae:.6f}"])


def evaluate(pairs):
    """Report over ``(name, map_8bit, gt_bool)`` triples."""
    scores = [score_map(m8, gt, name) for name, m8, gt in pairs]
    if not scores:
        raise EvaluationError("no map/ground-truth pairs to evaluate")
    return EvalReport(scores)


def _index_dir(d):
    if not os.path.isdir(d):
        raise EvaluationError(f"not a directory: {d}")
    found = {}
    for fn in sorted(os.listdir(d)):
        stem, ext = os.path.splitext(fn)
        if ext.lower() in IMAGE_EXTENSIONS:
            found.setdefault(stem, os.path.join(d, fn))
    return found


def pair_directories(maps_dir, gt_dir):
    """Match files by stem; returns ``(pairs, unpaired_names)``."""
    maps = _index_dir(maps_dir)
    gts = _index_dir(gt_dir)
    common = sorted(maps.keys() & gts.keys())
    unpaired = sorted(maps.keys() ^ gts.keys())
    return [(s, maps[s], gts[s]) for s in common], unpaired


def load_truth(path):
    return load_gray(path) > GT_CUTOFF


def dataset_eval(maps_dir, gt_dir):
    pairs, unpaired = pair_directories(maps_dir, gt_dir)
    for name in unpaired:
        log.warning("no partner for %r; skipped", name)
    scores, skipped = [], list(unpaired)
    for name, map_path, gt_path in pairs:
        m8 = load_gray(map_path)
        gt = load_truth(gt_path)
        if m8.shape != gt.shape:
            log.warning("size mismatch for %r (%s vs %s); skipped", name, m8.shape, gt.shape)
            skipped.append(name)
            continue
        scores.append(score_map(m8, gt, name))
    if not scores:
        raise EvaluationError(f"no usable map/ground-truth pairs in {maps_dir} and {gt_dir}")
    return EvalReport(scores, skipped)
