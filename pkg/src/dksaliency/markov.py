"""Random walk on the region graph and its equilibrium saliency map."""
import numpy as np

from .errors import ConvergenceError, GraphError

TOLERANCE = 1e-10
MAX_ITERATIONS = 10_000


def transition_matrix(weights):
    """Column-stochastic ``A @ inv(W)`` where ``W`` holds the node degrees.

    ``TP[i, j]`` is the probability of stepping from node j to node i.
    """
    a = np.asarray(weights, dtype=np.float64)
    degree = a.sum(axis=1)
    if np.any(degree <= 0.0):
        raise GraphError(f"isolated node(s) {np.flatnonzero(degree <= 0.0).tolist()}")
    return a / degree[None, :]


def stationary(tp, tol=TOLERANCE, max_iter=MAX_ITERATIONS):
    """Equilibrium distribution by power iteration from the uniform vector.

    Iterates the lazy chain ``(I + TP) / 2``. It has the same fixed point as
    ``TP`` but cannot oscillate, which matters for bipartite weight patterns
    (two flat colors give exactly that).
    """
    tp = np.asarray(tp, dtype=np.float64)
    n = tp.shape[0]
    pi = np.full(n, 1.0 / n)
    residual = np.inf
    for _ in range(max_iter):
        nxt = 0.5 * (pi + tp @ pi)
        nxt /= nxt.sum()
        residual = np.abs(nxt - pi).sum()
        pi = nxt
        if residual < tol:
            return pi
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps", residual)


def degree_distribution(weights):
    """Closed-form equilibrium of a symmetric-weight walk: degree / total degree."""
    d = np.asarray(weights, dtype=np.float64).sum(axis=1)
    return d / d.sum()


def region_gbvs_values(pi):
    """Per-region squared min-max normalized probabilities.

    A (numerically) constant distribution yields all zeros.
    """
    pi = np.asarray(pi, dtype=np.float64)
    lo, hi = pi.min(), pi.max()
    if hi - lo <= 1e-12 * hi:
        return np.zeros_like(pi)
    return ((pi - lo) / (hi - lo)) ** 2


def gbvs_map(pi, labels):
    return region_gbvs_values(pi)[np.asarray(labels)]
