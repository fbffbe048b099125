"""Distance-matrix clustering and evaluation.

k-medoids is the PAM variant (greedy BUILD initialization plus SWAP local
search) so the centers are always actual data points; farthest-first is the
greedy 2-approximation for k-center. Ties are broken by lowest index
everywhere for reproducibility.
"""

import itertools
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EigenFailure, InvalidK, LengthMismatch
from .graph import laplacian


@dataclass(frozen=True)
class ClusterResult:
    """Assignments plus the chosen center vertices.

    `objective` is the total within-cluster distance to the medoid for
    k-medoids (and the k-means inertia for the spectral baseline) or the
    covering radius for farthest-first.
    """

    assignments: np.ndarray
    centers: tuple
    objective: float
    seed: int
    iterations: int

    def to_json(self, extra=None):
        doc = {
            "assignments": [int(a) for a in self.assignments],
            "centers": [int(c) for c in self.centers],
            "objective": self.objective,
            "seed": self.seed,
            "iterations": self.iterations,
        }
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2, sort_keys=True)


def _check_distance_input(D, k):
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InvalidK("distance matrix must be square")
    n = D.shape[0]
    if not (1 <= k <= n):
        raise InvalidK(f"k must be in [1, {n}], got {k}")
    return D, n


def _assign(D, centers):
    # nearest center, ties to the lowest center index
    sub = D[:, centers]
    return np.argmin(sub, axis=1)


def _pam_objective(D, centers):
    return float(D[:, centers].min(axis=1).sum())


def _pam_build(D, k):
    n = D.shape[0]
    centers = [int(np.argmin(D.sum(axis=0)))]
    nearest = D[:, centers[0]].copy()
    while len(centers) < k:
        gains = np.maximum(nearest[:, None] - D, 0.0).sum(axis=0)
        gains[centers] = -np.inf
        c = int(np.argmax(gains))
        centers.append(c)
        nearest = np.minimum(nearest, D[:, c])
    return centers


def _pam_swap(D, centers):
    centers = list(centers)
    obj = _pam_objective(D, centers)
    iterations = 0
    improved = True
    while improved:
        improved = False
        best = (0.0, None, None)
        in_set = set(centers)
        for mi, m in enumerate(centers):
            for h in range(D.shape[0]):
                if h in in_set:
                    continue
                trial = centers.copy()
                trial[mi] = h
                delta = obj - _pam_objective(D, trial)
                # strict improvement; lowest (m, h) wins ties via scan order
                if delta > best[0] + 1e-12:
                    best = (delta, mi, h)
        if best[1] is not None:
            centers[best[1]] = best[2]
            obj -= best[0]
            improved = True
            iterations += 1
    return centers, obj, iterations


def k_medoids(D, k, seed=0, restarts=1):
    """PAM k-medoids on a symmetric zero-diagonal distance matrix.

    The first run starts from the deterministic BUILD initialization; any
    additional restarts start from seeded random center subsets. The best
    run by objective wins (ties to the earliest run). Deterministic given
    (seed, restarts).
    """
    D, n = _check_distance_input(D, k)
    if restarts < 1:
        raise InvalidK("restarts must be at least 1")
    rng = np.random.default_rng(seed)
    best = None
    for run in range(restarts):
        if run == 0:
            init = _pam_build(D, k)
        else:
            init = sorted(int(v) for v in rng.choice(n, size=k, replace=False))
        centers, obj, iterations = _pam_swap(D, init)
        if best is None or obj < best[0] - 1e-12:
            best = (obj, centers, iterations)
    obj, centers, iterations = best
    order = sorted(centers)
    labels = _assign(D, order)
    return ClusterResult(
        assignments=labels,
        centers=tuple(order),
        objective=_pam_objective(D, order),
        seed=seed,
        iterations=iterations,
    )


def farthest_first(D, k, start=0):
    """Greedy k-center (Gonzalez): repeatedly add the point farthest from
    the chosen centers. Objective is the covering radius."""
    D, n = _check_distance_input(D, k)
    if not (0 <= start < n):
        raise InvalidK(f"start must be a vertex index, got {start}")
    centers = [start]
    mind = D[:, start].copy()
    while len(centers) < k:
        nxt = int(np.argmax(mind))  # argmax takes the lowest index on ties
        centers.append(nxt)
        mind = np.minimum(mind, D[:, nxt])
    order = sorted(centers)
    labels = _assign(D, order)
    return ClusterResult(
        assignments=labels,
        centers=tuple(order),
        objective=float(D[:, order].min(axis=1).max()),
        seed=start,
        iterations=k,
    )


def _kmeans(X, k, rng, n_iter=100):
    n = X.shape[0]
    # ++-style seeding
    centers = [X[int(rng.integers(0, n))]]
    for _ in range(1, k):
        d2 = np.min(
            [np.sum((X - c) ** 2, axis=1) for c in centers], axis=0
        )
        total = d2.sum()
        if total <= 0:
            centers.append(X[int(rng.integers(0, n))])
            continue
        centers.append(X[int(rng.choice(n, p=d2 / total))])
    centers = np.array(centers)
    labels = np.full(n, -1, dtype=int)
    for _it in range(n_iter):
        dists = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(dists, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            mask = labels == c
            if mask.any():
                centers[c] = X[mask].mean(axis=0)
    inertia = float(((X - centers[labels]) ** 2).sum())
    return labels, centers, inertia


def sc2_baseline(g, k, seed=0, restarts=10):
    """Standard spectral clustering with the unnormalized Laplacian.

    Embeds vertices with the bottom-k eigenvectors (the constant one
    included) and clusters the rows with seeded k-means.
    """
    if not (1 <= k <= g.n):
        raise InvalidK(f"k must be in [1, {g.n}], got {k}")
    L = laplacian(g)
    try:
        _, vecs = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    X = vecs[:, :k]
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        labels, centers, inertia = _kmeans(X, k, rng)
        if best is None or inertia < best[2] - 1e-12:
            best = (labels, centers, inertia)
    labels, centers, inertia = best
    # report the vertex nearest to each centroid as that cluster's center
    reps = []
    for c in range(k):
        d = ((X - centers[c]) ** 2).sum(axis=1)
        reps.append(int(np.argmin(d)))
    return ClusterResult(
        assignments=labels,
        centers=tuple(reps),
        objective=inertia,
        seed=seed,
        iterations=restarts,
    )


@dataclass(frozen=True)
class Evaluation:
    """Error rate under the best matching of predicted to true classes."""

    error_rate: float
    matching: tuple


def error_rate(pred, truth):
    """Fraction misclassified, minimized over bijections between predicted
    clusters and true classes.

    Exhaustive over permutations for up to 6 classes, maximum-weight
    matching on the confusion matrix beyond that. Invariant under any
    relabeling of either side.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise LengthMismatch(
            f"label vectors must match, got {pred.shape} and {truth.shape}"
        )
    n = pred.size
    pred_ids, pred_dense = np.unique(pred, return_inverse=True)
    true_ids, true_dense = np.unique(truth, return_inverse=True)
    kp, kt = len(pred_ids), len(true_ids)
    size = max(kp, kt)
    confusion = np.zeros((size, size), dtype=int)
    np.add.at(confusion, (pred_dense, true_dense), 1)
    if size <= 6:
        best_hits = -1
        best_perm = None
        for perm in itertools.permutations(range(size)):
            hits = sum(confusion[r, perm[r]] for r in range(size))
            if hits > best_hits:
                best_hits = hits
                best_perm = perm
        matching = tuple(enumerate(best_perm))
    else:
        rows, cols = linear_sum_assignment(-confusion)
        best_hits = int(confusion[rows, cols].sum())
        matching = tuple(zip(rows.tolist(), cols.tolist()))
    return Evaluation(error_rate=1.0 - best_hits / n, matching=matching)
