"""Dataset ingestion, k-NN Gaussian graph construction, and benchmarking.

The graph recipe: connect each point to its k = floor(mu * n) nearest
neighbors (Euclidean), symmetrize by union or mutual intersection, and weigh
edges with the Gaussian kernel exp(-sigma * ||x_i - x_j||^2). Benchmarks
sweep (mu, sigma, p) grids, cluster, and score by error rate.
"""

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from .clustering import error_rate, farthest_first, k_medoids, sc2_baseline
from .errors import (
    DegenerateKernel,
    Disconnected,
    InvalidParams,
    NonNumericFeature,
    ParseError,
    RaggedRows,
)
from .graph import build_graph
from .numerics import approximation_bound, conjugate_exponent, laplacian_pinv
from .resistance import (
    PairQuery,
    SolverConfig,
    approx_metric,
    distance_matrix,
    ssl_solve,
)


@dataclass(frozen=True)
class FeatureDataset:
    """Numeric feature matrix with optional dense class labels."""

    X: np.ndarray
    labels: np.ndarray
    name: str = ""

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    @property
    def n_classes(self):
        return 0 if self.labels is None else int(self.labels.max()) + 1


def standardize(ds):
    """Column-wise z-scoring; constant columns are left centered only.

    Off by default everywhere: features are used as-is unless explicitly
    requested, and run configs record whether it was applied.
    """
    mean = ds.X.mean(axis=0)
    std = ds.X.std(axis=0)
    std[std == 0] = 1.0
    return FeatureDataset(X=(ds.X - mean) / std, labels=ds.labels, name=ds.name)


def load_features(path, has_labels=False, label_column="last", name=None):
    """Parse a rectangular numeric CSV into a FeatureDataset.

    Labels (when present) may be arbitrary strings; they are mapped to dense
    ids 0..k-1 in order of first appearance.
    """
    rows = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        for rownum, row in enumerate(reader, 1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            rows.append((rownum, [cell.strip() for cell in row]))
    if not rows:
        raise ParseError(f"{path}: no data rows")
    width = len(rows[0][1])
    if width < (2 if has_labels else 1):
        raise ParseError(f"{path}: rows too short (width {width})")
    for rownum, row in rows:
        if len(row) != width:
            raise RaggedRows(
                f"{path}: row {rownum} has {len(row)} columns, expected {width}"
            )
    if has_labels:
        lab_idx = 0 if label_column == "first" else width - 1
    else:
        lab_idx = None
    feats = []
    raw_labels = []
    for rownum, row in rows:
        vals = []
        for colnum, cell in enumerate(row):
            if colnum == lab_idx:
                raw_labels.append(cell)
                continue
            try:
                vals.append(float(cell))
            except ValueError:
                raise NonNumericFeature(
                    f"{path}: row {rownum}, column {colnum + 1}: {cell!r}"
                ) from None
        feats.append(vals)
    X = np.array(feats, dtype=float)
    if not np.all(np.isfinite(X)):
        raise ParseError(f"{path}: non-finite feature values")
    labels = None
    if has_labels:
        mapping = {}
        dense = []
        for lab in raw_labels:
            if lab not in mapping:
                mapping[lab] = len(mapping)
            dense.append(mapping[lab])
        labels = np.array(dense, dtype=int)
    return FeatureDataset(X=X, labels=labels, name=name or str(path))


@dataclass(frozen=True)
class GraphBuildParams:
    """k-NN Gaussian graph settings; k = floor(mu * n)."""

    mu: float
    sigma: float
    symmetrization: str = "union"
    on_disconnect: str = "fail"

    def __post_init__(self):
        if not (0 < self.mu <= 1):
            raise InvalidParams(f"mu must be in (0, 1], got {self.mu}")
        if self.sigma <= 0:
            raise InvalidParams(f"sigma must be positive, got {self.sigma}")
        if self.symmetrization not in ("union", "mutual"):
            raise InvalidParams(f"unknown symmetrization {self.symmetrization!r}")
        if self.on_disconnect not in ("fail", "largest_component"):
            raise InvalidParams(f"unknown on_disconnect {self.on_disconnect!r}")


def knn_gaussian_graph(ds, params):
    """Build the k-NN graph with Gaussian kernel weights.

    Neighbor ranking ties break toward the lower index. Union keeps an edge
    when either endpoint selected the other; mutual requires both.
    """
    n = ds.n
    if n < 2:
        raise InvalidParams("need at least two points")
    k = int(np.floor(params.mu * n))
    if k < 1:
        raise InvalidParams(f"mu={params.mu} gives k=0 neighbors for n={n}")
    sq = ((ds.X[:, None, :] - ds.X[None, :, :]) ** 2).sum(axis=2)
    order = np.argsort(sq, axis=1, kind="stable")  # ties resolve to lower index
    selected = set()
    for i in range(n):
        neigh = [v for v in order[i] if v != i][:k]
        for j in neigh:
            selected.add((i, int(j)))
    pairs = set()
    for i, j in selected:
        a, b = max(i, j), min(i, j)
        if params.symmetrization == "union":
            pairs.add((a, b))
        elif (j, i) in selected:
            pairs.add((a, b))
    if not pairs:
        raise Disconnected([[v] for v in range(n)])
    weights = {}
    for a, b in sorted(pairs):
        weights[(a, b)] = float(np.exp(-params.sigma * sq[a, b]))
    if all(w < 1e-300 for w in weights.values()):
        raise DegenerateKernel(
            f"all kernel weights vanished (sigma={params.sigma}); rescale features"
        )
    edges = [(a, b, max(w, 1e-300)) for (a, b), w in weights.items()]
    return build_graph(
        n, edges, largest_component=params.on_disconnect == "largest_component"
    )


@dataclass(frozen=True)
class BenchRecord:
    """One clustering run: a grid cell, a method, and one repetition seed."""

    mu: float
    sigma: float
    p: float  # 0 marks methods without a p parameter
    method: str
    seed: int
    error: float
    wall_time: float
    failed: str = ""


@dataclass(frozen=True)
class BenchResult:
    """Per-seed grid records plus the best configuration per method.

    Byte-for-byte reproducibility is promised for the results view only;
    wall-clock timings are reported separately because they can never be
    deterministic.
    """

    dataset: str
    seed: int
    repetitions: int
    records: tuple
    best: dict = field(default_factory=dict)

    def config_means(self):
        """Aggregate records to {(method, mu, sigma, p): (mean, sd, n)}."""
        groups = {}
        for r in self.records:
            if r.failed:
                continue
            groups.setdefault((r.method, r.mu, r.sigma, r.p), []).append(r.error)
        return {
            key: (float(np.mean(errs)), float(np.std(errs)), len(errs))
            for key, errs in groups.items()
        }

    def results_csv(self):
        out = io.StringIO()
        out.write("method,mu,sigma,p,seed,error,failed\n")
        for r in self.records:
            err = "" if np.isnan(r.error) else repr(r.error)
            out.write(
                f"{r.method},{r.mu!r},{r.sigma!r},{r.p!r},{r.seed},{err},{r.failed}\n"
            )
        return out.getvalue()

    def timing_csv(self):
        out = io.StringIO()
        out.write("method,mu,sigma,p,seed,wall_time\n")
        for r in self.records:
            out.write(
                f"{r.method},{r.mu!r},{r.sigma!r},{r.p!r},{r.seed},{r.wall_time!r}\n"
            )
        return out.getvalue()


PAPER_MU_GRID = (0.04, 0.06, 0.08, 0.1, 1.0)
PAPER_SIGMA_GRID = (1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0)
PAPER_P_GRID = (1.1, 1.4, 1.7, 2.0, 2.3, 2.6, 2.9, 5.0, 10.0, 100.0, 1000.0)

_METHODS = ("kmed_approx", "kmed_p2", "ff_approx", "sc2")


def _method_p_values(method, p_grid):
    return tuple(p_grid) if method in ("kmed_approx", "ff_approx") else (0.0,)


def _run_cell(D, k, truth, method, rep_seed):
    t0 = time.perf_counter()
    if method.startswith("kmed"):
        res = k_medoids(D, k, seed=rep_seed, restarts=3)
    else:
        rng = np.random.default_rng(rep_seed)
        res = farthest_first(D, k, start=int(rng.integers(0, D.shape[0])))
    err = error_rate(res.assignments, truth).error_rate
    return err, time.perf_counter() - t0


def bench_grid(
    ds,
    mu_grid=PAPER_MU_GRID,
    sigma_grid=PAPER_SIGMA_GRID,
    p_grid=PAPER_P_GRID,
    methods=("kmed_approx", "kmed_p2"),
    repetitions=10,
    seed=0,
):
    """Sweep the parameter grids, cluster at k = number of true classes,
    and record the error of every seeded repetition.

    Cells that fail (disconnected graph, degenerate kernel) are recorded
    with the failure reason and the sweep continues. The best configuration
    per method is chosen by mean error over the repetitions.
    """
    if ds.labels is None:
        raise InvalidParams("bench_grid needs a labeled dataset")
    for method in methods:
        if method not in _METHODS:
            raise InvalidParams(f"unknown method {method!r}")
    k = ds.n_classes
    records = []
    for mu in mu_grid:
        for sigma in sigma_grid:
            t0 = time.perf_counter()
            try:
                g = knn_gaussian_graph(ds, GraphBuildParams(mu=mu, sigma=sigma))
                pinv = laplacian_pinv(g)
            except Exception as exc:
                build_time = time.perf_counter() - t0
                for method in methods:
                    for p in _method_p_values(method, p_grid):
                        for rep in range(repetitions):
                            records.append(
                                BenchRecord(
                                    mu=mu, sigma=sigma, p=p, method=method,
                                    seed=seed + rep, error=np.nan,
                                    wall_time=build_time,
                                    failed=type(exc).__name__,
                                )
                            )
                continue
            for method in methods:
                for p in _method_p_values(method, p_grid):
                    if method == "sc2":
                        for rep in range(repetitions):
                            t1 = time.perf_counter()
                            res = sc2_baseline(g, k, seed=seed + rep)
                            err = error_rate(res.assignments, ds.labels).error_rate
                            records.append(
                                BenchRecord(
                                    mu=mu, sigma=sigma, p=0.0, method=method,
                                    seed=seed + rep, error=err,
                                    wall_time=time.perf_counter() - t1,
                                )
                            )
                        continue
                    p_eff = p if p > 0 else 2.0
                    D = distance_matrix(g, p_eff, mode="approx", form="metric",
                                        pinv=pinv)
                    for rep in range(repetitions):
                        err, wall = _run_cell(
                            D.matrix, k, ds.labels, method, seed + rep
                        )
                        records.append(
                            BenchRecord(
                                mu=mu, sigma=sigma, p=p, method=method,
                                seed=seed + rep, error=err, wall_time=wall,
                            )
                        )
    result = BenchResult(
        dataset=ds.name,
        seed=seed,
        repetitions=repetitions,
        records=tuple(records),
    )
    best = {}
    for (method, mu, sigma, p), (mean, sd, count) in result.config_means().items():
        cur = best.get(method)
        if cur is None or mean < cur["error_mean"] - 1e-15:
            best[method] = {
                "mu": mu, "sigma": sigma, "p": p,
                "error_mean": mean, "error_sd": sd, "repetitions": count,
            }
    return BenchResult(
        dataset=ds.name,
        seed=seed,
        repetitions=repetitions,
        records=tuple(records),
        best=best,
    )


def ratio_sweep(g, p_grid, sample_pairs=10, seed=0, cfg=None):
    """Measure approximated/exact metric ratios for sampled pairs.

    Emits one row per (p, pair): the two metric values, their ratio, and the
    theoretical ceiling (bound factor to the q). Nothing is asserted; the
    data is meant for plotting and for the verification suites.
    """
    cfg = cfg or SolverConfig(grad_tol=1e-10)
    rng = np.random.default_rng(seed)
    pairs = set()
    limit = g.n * (g.n - 1) // 2
    while len(pairs) < min(sample_pairs, limit):
        i, j = rng.integers(0, g.n, size=2)
        if i != j:
            pairs.add((max(int(i), int(j)), min(int(i), int(j))))
    pairs = sorted(pairs)
    pinv = laplacian_pinv(g)
    rows = []
    for p in p_grid:
        q = conjugate_exponent(p)
        bound = approximation_bound(g, p, seed=seed)
        # the estimator is a lower estimate of the true factor; the emitted
        # hard ceiling uses the exactly computable interpolation bound
        est_ceiling = max(bound.value, 1.0) ** q
        hard_ceiling = min(bound.one_norm_ceiling, bound.worst_case) ** q
        for i, j in pairs:
            approx = approx_metric(pinv, g, PairQuery(i=i, j=j, p=p))
            report = ssl_solve(g, p, i, j, cfg)
            exact = (1.0 / report.energy) ** (1.0 / (p - 1.0))
            rows.append(
                {
                    "p": p,
                    "i": i,
                    "j": j,
                    "approx_metric": approx,
                    "exact_metric": exact,
                    "ratio": approx / exact,
                    "bound_est_pow_q": est_ceiling,
                    "bound_pow_q": hard_ceiling,
                    "converged": report.converged,
                }
            )
    return rows


def ratio_rows_csv(rows):
    out = io.StringIO()
    out.write(
        "p,i,j,approx_metric,exact_metric,ratio,bound_est_pow_q,bound_pow_q,converged\n"
    )
    for r in rows:
        out.write(
            f"{r['p']!r},{r['i']},{r['j']},{r['approx_metric']!r},"
            f"{r['exact_metric']!r},{r['ratio']!r},{r['bound_est_pow_q']!r},"
            f"{r['bound_pow_q']!r},{int(r['converged'])}\n"
        )
    return out.getvalue()
