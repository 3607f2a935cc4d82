import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dksaliency.composer import run_pipeline
from dksaliency.slic import RegionStats
from dksaliency.synthetic import make_suite


def make_stats(features, centroids, compactness, counts=None):
    features = np.asarray(features, dtype=np.float64)
    n = len(features)
    return RegionStats(
        centroids=np.asarray(centroids, dtype=np.float64),
        features=features,
        compactness=np.asarray(compactness, dtype=np.float64),
        pixel_count=np.ones(n, dtype=np.int64) if counts is None else np.asarray(counts),
    )


@st.composite
def symmetric_weights(draw, min_n=2, max_n=12, positive=True):
    n = draw(st.integers(min_n, max_n))
    lo = 0.01 if positive else 0.0
    m = draw(arrays(np.float64, (n, n), elements=st.floats(lo, 10.0)))
    w = np.triu(m, 1)
    return w + w.T


@pytest.fixture(scope="session")
def suite_results():
    """The synthetic scene suite paired with default-parameter pipeline results."""
    return [(s, run_pipeline(s.image)) for s in make_suite()]
