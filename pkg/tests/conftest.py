import collections
import os

import numpy as np
import pytest

from presistance import generate

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def iris_csv():
    return os.path.join(DATA_DIR, "iris.csv")


@pytest.fixture(scope="session")
def wine_csv():
    return os.path.join(DATA_DIR, "wine.csv")


def random_connected(n, seed, edge_prob=0.4):
    return generate("gnp_connected", n=n, edge_prob=edge_prob, seed=seed)


def tree_series_presistance(g, i, j, p):
    """Independent oracle: on a tree the unit flow is forced along the unique
    path, so the resistance composes by the p-series law
    (sum over path edges of w^(-1/(p-1)))^(p-1)."""
    adj = g.neighbors()
    prev = {i: None}
    queue = collections.deque([i])
    while queue:
        u = queue.popleft()
        if u == j:
            break
        for v, w in adj[u]:
            if v not in prev:
                prev[v] = (u, w)
                queue.append(v)
    acc = 0.0
    u = j
    while u != i:
        pu, w = prev[u]
        acc += w ** (-1.0 / (p - 1.0))
        u = pu
    return acc ** (p - 1.0)


def brute_force_mincut(g, s, t):
    """Enumerate all 2^(n-2) vertex bipartitions; only for tiny graphs."""
    others = [v for v in range(g.n) if v not in (s, t)]
    best = np.inf
    for mask in range(1 << len(others)):
        side = {s}
        for bit, v in enumerate(others):
            if mask >> bit & 1:
                side.add(v)
        cut = sum(w for i, j, w in g.edges if (i in side) != (j in side))
        best = min(best, cut)
    return best


def hop_distance_bfs(g, s, t):
    adj = g.neighbors()
    dist = {s: 0}
    queue = collections.deque([s])
    while queue:
        u = queue.popleft()
        if u == t:
            return dist[u]
        for v, _ in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return np.inf
