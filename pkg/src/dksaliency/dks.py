"""Dense k-subgraph approximation on an unweighted sparse graph.

Three cheap procedures each propose exactly ``k`` vertices; the densest
proposal wins. Every procedure is deterministic given the graph, ``k`` and
(for the random-edge procedure) the seed.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import GraphError

MAX_WALK_SEEDS = 32
MAX_BRUTE_FORCE_N = 20


@dataclass(frozen=True)
class DksResult:
    vertices: np.ndarray         # (k,) ascending vertex ids
    induced_degrees: np.ndarray  # (k,) degree of each vertex inside the subgraph
    density: float
    procedure: int               # 1, 2 or 3

    @property
    def k(self):
        return len(self.vertices)


def _adj(g):
    return g.adjacency if hasattr(g, "adjacency") else np.asarray(g, dtype=bool)


def density(g, s):
    """Average degree ``2 |E(S)| / |S|`` of the subgraph induced on ``s``."""
    s = np.asarray(list(s), dtype=np.int64)
    if len(s) == 0:
        raise GraphError("density of an empty vertex set")
    sub = _adj(g)[np.ix_(s, s)]
    return float(np.triu(sub, 1).sum()) * 2.0 / len(s)


def induced_degrees(g, s):
    s = np.asarray(list(s), dtype=np.int64)
    return _adj(g)[np.ix_(s, s)].sum(axis=1).astype(np.int64)


def _check_k(n, k):
    if not 1 <= k <= n:
        raise GraphError(f"k={k} outside [1, {n}]")


def _pad(chosen, n, k):
    """Truncate to ``k`` in insertion order or pad with the lowest unused ids."""
    out = list(dict.fromkeys(chosen))[:k]
    if len(out) < k:
        used = set(out)
        out.extend(v for v in range(n) if v not in used)
        out = out[:k]
    return out


def _rank(scores, exclude=()):
    """Vertex ids sorted by descending score, ties to the lower id."""
    scores = np.asarray(scores)
    order = np.lexsort((np.arange(len(scores)), -scores))
    if exclude:
        ex = set(exclude)
        order = np.array([v for v in order if v not in ex], dtype=np.int64)
    return order


def proc1_random_edges(g, k, rng_seed=0):
    """Vertices incident to ceil(k/2) uniformly sampled edges, padded to k."""
    adj = _adj(g)
    n = adj.shape[0]
    _check_k(n, k)
    i, j = np.nonzero(np.triu(adj, 1))
    n_pick = min((k + 1) // 2, len(i))
    rng = np.random.default_rng(rng_seed)
    picked = rng.choice(len(i), size=n_pick, replace=False) if n_pick else []
    chosen = []
    for e in picked:
        chosen.extend((int(i[e]), int(j[e])))
    return _pad(chosen, n, k)


def proc2_greedy(g, k):
    """ceil(k/2) highest-degree vertices plus the floor(k/2) with most neighbors among them."""
    adj = _adj(g)
    n = adj.shape[0]
    _check_k(n, k)
    deg = adj.sum(axis=1)
    head = [int(v) for v in _rank(deg)[: (k + 1) // 2]]
    into_head = adj[:, head].sum(axis=1)
    tail = [int(v) for v in _rank(into_head, exclude=head)[: k // 2]]
    return _pad(head + tail, n, k)


def proc3_walks2(g, k, max_seeds=MAX_WALK_SEEDS):
    """Seeded search from the vertices with the most length-2 walks.

    For each seed ``v``: take ``v``, its ceil(k/2)-1 highest-degree
    neighbors, then fill up with the vertices having most neighbors in that
    partial set. The densest candidate wins; ties keep the earlier seed.
    """
    adj = _adj(g)
    n = adj.shape[0]
    _check_k(n, k)
    deg = adj.sum(axis=1)
    walks2 = adj.astype(np.int64) @ deg
    best, best_d = None, -1.0
    for v in _rank(walks2)[: min(n, max_seeds)]:
        v = int(v)
        nbrs = np.flatnonzero(adj[v])
        nbr_order = nbrs[np.lexsort((nbrs, -deg[nbrs]))]
        part = [v] + [int(u) for u in nbr_order[: (k + 1) // 2 - 1]]
        into_part = adj[:, part].sum(axis=1)
        fill = [int(u) for u in _rank(into_part, exclude=part)[: k - len(part)]]
        cand = _pad(part + fill, n, k)
        d = density(adj, cand)
        if d > best_d:
            best, best_d = cand, d
    return best


def dense_k_subgraph(g, k, rng_seed=0):
    """Densest of the three procedures; ties prefer procedure 2, then 3, then 1."""
    adj = _adj(g)
    _check_k(adj.shape[0], k)
    proposals = [
        (2, proc2_greedy(adj, k)),
        (3, proc3_walks2(adj, k)),
        (1, proc1_random_edges(adj, k, rng_seed)),
    ]
    best_proc, best_set, best_d = None, None, -1.0
    for proc, s in proposals:
        d = density(adj, s)
        if d > best_d:
            best_proc, best_set, best_d = proc, s, d
    vertices = np.array(sorted(best_set), dtype=np.int64)
    return DksResult(vertices, induced_degrees(adj, vertices), best_d, best_proc)


def brute_force_dks(g, k):
    """Exact densest k-subset by enumeration; ties to the lexicographically smallest."""
    adj = _adj(g)
    n = adj.shape[0]
    if n > MAX_BRUTE_FORCE_N:
        raise GraphError(f"brute force limited to N <= {MAX_BRUTE_FORCE_N}, got {n}")
    _check_k(n, k)
    upper = np.triu(adj, 1)
    best, best_e = None, -1
    for s in combinations(range(n), k):
        e = int(upper[np.ix_(s, s)].sum())
        if e > best_e:
            best, best_e = s, e
    return list(best)
