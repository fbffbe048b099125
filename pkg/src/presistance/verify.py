"""Self-contained invariant suites runnable from the command line.

Each suite generates its own graphs from a seed, checks one family of
invariants, and returns a list of human-readable failure strings (empty
means the suite passed). The `verify` CLI command runs them and exits
nonzero if anything failed.

Negative control: `inject_fault('approx-sign')` flips the sign of every
approximated metric value (a deliberate bug behind a documented hook in the
resistance module), which must make several suites fail. Use it to confirm
the suites actually have teeth.
"""

import itertools
import time

import numpy as np

from . import resistance as _resistance_mod
from .clustering import error_rate, k_medoids
from .errors import PresistanceError
from .graph import build_graph, generate, incidence, laplacian
from .numerics import (
    approximation_bound,
    conjugate_exponent,
    graph_p_seminorm,
    laplacian_pinv,
    matrix_op_pnorm,
)
from .pipeline import ratio_sweep
from .resistance import (
    PairQuery,
    SolverConfig,
    approx_presistance,
    distance_matrix,
    exact_presistance,
    mincut,
    p_energy,
    p_energy_gradient,
    shortest_path,
    ssl_solve,
)

FAULTS = ("approx-sign",)


def inject_fault(name):
    if name not in FAULTS:
        raise PresistanceError(f"unknown fault {name!r}; known: {FAULTS}")
    _resistance_mod.FAULT_FLIP_APPROX_SIGN = True


def clear_faults():
    _resistance_mod.FAULT_FLIP_APPROX_SIGN = False


def _random_connected(n, seed, edge_prob=0.4):
    return generate("gnp_connected", n=n, edge_prob=edge_prob, seed=seed)


def suite_laplacian_identities(seed=0, n_max=20, cases=20):
    fails = []
    rng = np.random.default_rng(seed)
    for c in range(cases):
        n = int(rng.integers(2, n_max + 1))
        g = _random_connected(n, seed * 1000 + c)
        L = laplacian(g)
        C = incidence(g)
        W = np.diag(g.weights())
        if np.abs(L - C.T @ W @ C).max() > 1e-12:
            fails.append(f"case {c}: D-A and C^T W C disagree")
        if np.abs(L @ np.ones(n)).max() > 1e-12:
            fails.append(f"case {c}: L 1 != 0")
        if np.abs(C.sum(axis=1)).max() != 0.0:
            fails.append(f"case {c}: incidence row sums nonzero")
        if np.linalg.eigvalsh(L).min() < -1e-10:
            fails.append(f"case {c}: Laplacian not PSD")
    return fails


def suite_pinv_moore_penrose(seed=0, n_max=30, cases=100):
    fails = []
    rng = np.random.default_rng(seed)
    for c in range(cases):
        n = int(rng.integers(2, n_max + 1))
        g = _random_connected(n, seed * 77 + c)
        L = laplacian(g)
        Lp = laplacian_pinv(g).matrix
        scale = max(np.linalg.norm(L), 1.0)
        checks = [
            np.linalg.norm(L @ Lp @ L - L) / scale,
            np.linalg.norm(Lp @ L @ Lp - Lp) / max(np.linalg.norm(Lp), 1.0),
            np.linalg.norm((L @ Lp).T - L @ Lp) / scale,
            np.linalg.norm((Lp @ L).T - Lp @ L) / scale,
        ]
        if max(checks) > 1e-9:
            fails.append(f"case {c} (n={n}): Moore-Penrose residual {max(checks):.2e}")
        if np.abs(Lp @ np.ones(n)).max() > 1e-9:
            fails.append(f"case {c} (n={n}): L+ 1 != 0")
    return fails


def suite_seminorm(seed=0, cases=30):
    fails = []
    rng = np.random.default_rng(seed)
    for c in range(cases):
        n = int(rng.integers(3, 16))
        g = _random_connected(n, seed * 31 + c)
        L = laplacian(g)
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        s2 = graph_p_seminorm(g, x, 2.0)
        if abs(s2**2 - x @ L @ x) > 1e-10 * max(1.0, x @ L @ x):
            fails.append(f"case {c}: 2-seminorm vs quadratic form")
        if graph_p_seminorm(g, np.ones(n) * rng.standard_normal(), 3.0) > 1e-12:
            fails.append(f"case {c}: seminorm of constant not zero")
        for p in (1.5, 2.0, 3.0):
            q = conjugate_exponent(p)
            lhs = x @ L @ y
            rhs = graph_p_seminorm(g, x, p) * graph_p_seminorm(g, y, q)
            if lhs > rhs + 1e-10:
                fails.append(f"case {c}: Hoelder violated at p={p}")
    return fails


def suite_pnorm_estimator(seed=0, cases=15):
    fails = []
    rng = np.random.default_rng(seed)
    for c in range(cases):
        m = int(rng.integers(2, 12))
        M = rng.standard_normal((m, m))
        S = M + M.T
        cap = max(np.abs(S).sum(axis=0).max(), np.abs(S).sum(axis=1).max())
        prev = 0.0
        for restarts in (0, 2, 5):
            est = matrix_op_pnorm(S, 3.0, restarts=restarts, seed=seed)
            if est.value < prev - 1e-12:
                fails.append(f"case {c}: estimate not monotone in restarts")
            prev = est.value
        if prev > cap + 1e-9:
            fails.append(f"case {c}: estimate exceeds symmetric 1/inf-norm cap")
        if abs(matrix_op_pnorm(M, 1).value - np.abs(M).sum(axis=0).max()) > 1e-12:
            fails.append(f"case {c}: p=1 closed form wrong")
        if abs(matrix_op_pnorm(M, np.inf).value - np.abs(M).sum(axis=1).max()) > 1e-12:
            fails.append(f"case {c}: p=inf closed form wrong")
    return fails


def suite_alpha_range(seed=0):
    fails = []
    graphs = [
        ("complete8", generate("complete", n=8)),
        ("cycle12", generate("cycle", n=12)),
        ("gnp10", _random_connected(10, seed + 5)),
        ("tree9", generate("random_tree", n=9, seed=seed)),
    ]
    for name, g in graphs:
        for p in (1.5, 2.0, 3.0, 5.0):
            b = approximation_bound(g, p, seed=seed)
            if not (1 - 1e-9 <= b.value <= b.worst_case + 1e-9):
                fails.append(f"{name} p={p}: estimate {b.value} outside [1, m^|1/2-1/p|]")
    for n in (5, 10, 20):
        for fam in ("complete", "cycle"):
            g = generate(fam, n=n)
            for p in (1.5, 3.0, 5.0):
                b = approximation_bound(g, p, seed=seed)
                if b.value > 4 + 1e-9:
                    fails.append(f"{fam}{n} p={p}: estimate {b.value} above 4")
    return fails


def suite_tree_exactness(seed=0, trees=12, n_max=50, pairs=8):
    fails = []
    rng = np.random.default_rng(seed)
    cfg = SolverConfig(grad_tol=1e-10)
    for t in range(trees):
        n = int(rng.integers(5, n_max + 1))
        g = generate("random_tree", n=n, seed=seed * 13 + t, weight_range=(0.5, 2.0))
        pinv = laplacian_pinv(g)
        for _ in range(pairs):
            i, j = rng.choice(n, size=2, replace=False)
            q = PairQuery(int(i), int(j), float(rng.choice([1.5, 2.0, 3.0, 10.0])))
            exact, _ = exact_presistance(g, q, cfg)
            approx = approx_presistance(pinv, g, q)
            if abs(approx - exact) / exact > 1e-4:
                fails.append(
                    f"tree {t} pair ({q.i},{q.j}) p={q.p}: gap {abs(approx - exact) / exact:.2e}"
                )
    return fails


def suite_sandwich(seed=0, graphs=10, n_max=12):
    # two-sided bound: the hard ceiling uses the exactly computable
    # interpolation bound on the projector norm; the power-iteration value
    # is a lower estimate of the true factor and cannot gate the upper side
    fails = []
    rng = np.random.default_rng(seed)
    cfg = SolverConfig(grad_tol=1e-10)
    for c in range(graphs):
        n = int(rng.integers(4, n_max + 1))
        g = _random_connected(n, seed * 7 + c)
        pinv = laplacian_pinv(g)
        for p in (1.5, 2.0, 3.0, 5.0):
            b = approximation_bound(g, p, seed=seed)
            if not (1 - 1e-9 <= b.value <= b.one_norm_ceiling + 1e-9):
                fails.append(f"graph {c} p={p}: estimator outside [1, ceiling]")
            alpha_hard = min(b.one_norm_ceiling, b.worst_case)
            for i in range(n):
                for j in range(i + 1, n):
                    q = PairQuery(i, j, p)
                    exact, _ = exact_presistance(g, q, cfg)
                    approx = approx_presistance(pinv, g, q)
                    if approx < exact * (1 - 1e-6):
                        fails.append(f"graph {c} ({i},{j}) p={p}: approx below exact")
                    if approx > alpha_hard**p * exact * (1 + 1e-6):
                        fails.append(f"graph {c} ({i},{j}) p={p}: approx above bound")
    return fails


def suite_metric_triangle(seed=0, graphs=6, n_max=10):
    fails = []
    rng = np.random.default_rng(seed)
    cfg = SolverConfig(grad_tol=1e-10)
    for c in range(graphs):
        n = int(rng.integers(4, n_max + 1))
        g = _random_connected(n, seed * 3 + c)
        for p in (1.5, 3.0):
            D = distance_matrix(g, p, mode="exact", form="metric", cfg=cfg)
            M = D.matrix
            for a, b, mid in itertools.permutations(range(n), 3):
                if M[a, b] > M[a, mid] + M[mid, b] + 1e-8:
                    fails.append(f"graph {c} p={p}: triangle violated at ({a},{mid},{b})")
    return fails


def suite_gradient_check(seed=0, cases=20):
    fails = []
    rng = np.random.default_rng(seed)
    for c in range(cases):
        n = int(rng.integers(3, 12))
        g = _random_connected(n, seed * 11 + c)
        # keep coordinates away from ties so the kink never interferes
        x = rng.permutation(n) * 0.37 + rng.uniform(0.01, 0.02, size=n)
        for p in (1.5, 2.0, 3.0):
            analytic = p_energy_gradient(g, x, p)
            h = 1e-6
            for v in range(n):
                xp, xm = x.copy(), x.copy()
                xp[v] += h
                xm[v] -= h
                fd = (p_energy(g, xp, p) - p_energy(g, xm, p)) / (2 * h)
                denom = max(abs(fd), abs(analytic[v]), 1e-8)
                if abs(analytic[v] - fd) / denom > 1e-5:
                    fails.append(f"case {c} p={p} vertex {v}: gradient mismatch")
    return fails


def ssl_ordering_agreement(g, p, cfg=None, threshold=1e-6):
    """Fraction of informative triples where the two-pole potential ordering
    matches the pairwise resistance ordering, plus the disagreeing triples.

    At p = 2 the orderings coincide by an exact pseudoinverse identity. For
    general p the correspondence is only approximate: solid counterexamples
    exist (see the disagreement list on random graphs), so callers should
    treat the agreement rate as a measurement, not an invariant.
    """
    cfg = cfg or SolverConfig(grad_tol=1e-11)
    n = g.n
    r = np.zeros((n, n))
    pots = {}
    for i in range(n):
        for j in range(i + 1, n):
            rep = ssl_solve(g, p, i, j, cfg)
            r[i, j] = r[j, i] = 1.0 / rep.energy
            pots[(i, j)] = rep.potentials
    agree = 0
    total = 0
    disagreements = []
    for (i, j), x in pots.items():
        for ell in range(n):
            if ell in (i, j):
                continue
            lhs = (x[ell] - x[j]) - (x[i] - x[ell])
            rhs = r[j, ell] - r[ell, i]
            if abs(lhs) <= threshold or abs(rhs) <= threshold:
                continue
            total += 1
            if np.sign(lhs) == np.sign(rhs):
                agree += 1
            else:
                disagreements.append((i, j, ell, float(lhs), float(rhs)))
    rate = 1.0 if total == 0 else agree / total
    return rate, disagreements


def suite_ssl_ordering(seed=0, graphs=6, n_max=9):
    # asserts the exact identity at p = 2; for p != 2 the equivalence fails
    # on concrete graphs, so the rate is only reported through the
    # acceptance harness rather than gated here
    fails = []
    rng = np.random.default_rng(seed)
    for c in range(graphs):
        n = int(rng.integers(4, n_max + 1))
        g = _random_connected(n, seed * 17 + c)
        rate, bad = ssl_ordering_agreement(g, 2.0)
        if rate < 1.0:
            fails.append(f"graph {c} p=2: identity violated on {len(bad)} triple(s)")
    return fails


def suite_limits(seed=0):
    fails = []
    cases = [
        ("broom_a33", generate("broom_a", delta=3, zeta=3), [(0, 7)]),
        ("broom_b33", generate("broom_b", delta=3, zeta=3), [(0, 7)]),
        ("cycle6", generate("cycle", n=6), [(0, 3), (0, 2)]),
        ("cycle8", generate("cycle", n=8), [(0, 4), (0, 2)]),
        ("complete5", generate("complete", n=5), [(0, 1)]),
        ("complete8", generate("complete", n=8), [(0, 1)]),
        ("star6", generate("star", n=6), [(1, 2), (0, 1)]),
        ("path5", generate("path", n=5), [(0, 4), (1, 3)]),
        ("example_g1", generate("example_g1"), [(0, 1), (0, 5), (4, 6)]),
        ("example_g2", generate("example_g2"), [(0, 1), (0, 7)]),
    ]
    cfg = SolverConfig(grad_tol=1e-10)
    for name, g, pairs in cases:
        for i, j in pairs:
            r_small, _ = exact_presistance(g, PairQuery(i, j, 1.05), cfg)
            target = 1.0 / mincut(g, i, j)
            if abs(r_small / target - 1.0) > 0.10:
                fails.append(f"{name} ({i},{j}): p->1 limit off by {r_small / target:.3f}")
            r_large, _ = exact_presistance(g, PairQuery(i, j, 50.0), cfg)
            hop = shortest_path(g, i, j, weighted=False)
            metric = r_large ** (1.0 / 49.0)
            if abs(metric / hop - 1.0) > 0.10:
                fails.append(f"{name} ({i},{j}): p->inf limit off by {metric / hop:.3f}")
    return fails


def suite_rayleigh_monotonicity(seed=0, cases=10):
    fails = []
    rng = np.random.default_rng(seed)
    cfg = SolverConfig(grad_tol=1e-10)
    for c in range(cases):
        n = int(rng.integers(4, 10))
        g = _random_connected(n, seed * 29 + c)
        present = {(i, j) for i, j, _ in g.edges}
        missing = [
            (i, j)
            for i in range(n)
            for j in range(i)
            if (i, j) not in present
        ]
        if not missing:
            continue
        add = missing[int(rng.integers(0, len(missing)))]
        g2 = build_graph(n, list(g.edges) + [(add[0], add[1], float(rng.uniform(0.5, 2.0)))])
        i, j = rng.choice(n, size=2, replace=False)
        for p in (1.5, 2.0, 3.0):
            q = PairQuery(int(i), int(j), p)
            r1, _ = exact_presistance(g, q, cfg)
            r2, _ = exact_presistance(g2, q, cfg)
            if r2 > r1 * (1 + 1e-6):
                fails.append(f"case {c} p={p}: resistance increased after adding an edge")
    return fails


def suite_distance_shape(seed=0, cases=8):
    fails = []
    rng = np.random.default_rng(seed)
    for c in range(cases):
        n = int(rng.integers(4, 14))
        g = _random_connected(n, seed * 41 + c)
        for p, form in ((1.5, "metric"), (3.0, "resistance"), (100.0, "metric")):
            D = distance_matrix(g, p, mode="approx", form=form)
            M = D.matrix
            if np.abs(M - M.T).max() > 1e-10:
                fails.append(f"case {c} p={p}: matrix not symmetric")
            if np.abs(np.diag(M)).max() != 0.0:
                fails.append(f"case {c} p={p}: diagonal not zero")
            if not np.all(np.isfinite(M)) or M.min() < 0:
                fails.append(f"case {c} p={p}: entries not finite nonnegative")
    return fails


def suite_ratio_shape(seed=0):
    fails = []
    g = _random_connected(10, seed + 123)
    rows = ratio_sweep(g, (1.5, 2.0, 3.0, 5.0), sample_pairs=8, seed=seed)
    for r in rows:
        if r["ratio"] < 1 - 1e-6:
            fails.append(f"p={r['p']} pair ({r['i']},{r['j']}): ratio below 1")
        if r["p"] == 2.0 and abs(r["ratio"] - 1.0) > 1e-9:
            fails.append(f"pair ({r['i']},{r['j']}): ratio at p=2 not 1")
        if r["ratio"] > r["bound_pow_q"] + 1e-9:
            fails.append(f"p={r['p']} pair ({r['i']},{r['j']}): ratio above ceiling")
    return fails


def suite_clustering_invariants(seed=0, cases=10):
    fails = []
    rng = np.random.default_rng(seed)
    for c in range(cases):
        n = int(rng.integers(5, 25))
        pts = rng.standard_normal((n, 2))
        D = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
        k = int(rng.integers(2, min(6, n)))
        res = k_medoids(D, k, seed=c, restarts=3)
        if sorted(set(res.assignments.tolist())) != list(range(k)):
            fails.append(f"case {c}: empty cluster")
        if any(not (0 <= m < n) for m in res.centers):
            fails.append(f"case {c}: center not a data point")
        sub = D[:, res.centers]
        realized = sub[np.arange(n), res.assignments]
        if np.any(realized > sub.min(axis=1) + 1e-12):
            fails.append(f"case {c}: assignment not nearest-center")
        labels = rng.integers(0, 4, size=30)
        noisy = labels.copy()
        noisy[rng.integers(0, 30, size=5)] = rng.integers(0, 4, size=5)
        base = error_rate(noisy, labels).error_rate
        sigma_map = rng.permutation(4)
        tau_map = rng.permutation(4)
        relabeled = error_rate(sigma_map[noisy], tau_map[labels]).error_rate
        if abs(base - relabeled) > 1e-12:
            fails.append(f"case {c}: error rate not relabel-invariant")
    return fails


SUITES = {
    "laplacian-identities": suite_laplacian_identities,
    "pinv-moore-penrose": suite_pinv_moore_penrose,
    "seminorm": suite_seminorm,
    "pnorm-estimator": suite_pnorm_estimator,
    "alpha-range": suite_alpha_range,
    "tree-exactness": suite_tree_exactness,
    "sandwich": suite_sandwich,
    "metric-triangle": suite_metric_triangle,
    "gradient-check": suite_gradient_check,
    "ssl-ordering": suite_ssl_ordering,
    "limits": suite_limits,
    "rayleigh-monotonicity": suite_rayleigh_monotonicity,
    "distance-shape": suite_distance_shape,
    "ratio-shape": suite_ratio_shape,
    "clustering-invariants": suite_clustering_invariants,
}


def run_suites(names=None, seed=0, n=None, verbose=True):
    """Run the named suites (all by default); returns a machine-readable
    report dict with a top-level `passed` flag. `n` overrides the graph
    size ceiling of suites that take one."""
    import inspect

    names = list(names) if names else list(SUITES)
    report = {"seed": seed, "suites": {}, "passed": True}
    for name in names:
        if name not in SUITES:
            raise PresistanceError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
        kwargs = {"seed": seed}
        if n is not None and "n_max" in inspect.signature(SUITES[name]).parameters:
            kwargs["n_max"] = n
        t0 = time.perf_counter()
        failures = SUITES[name](**kwargs)
        duration = time.perf_counter() - t0
        ok = not failures
        report["suites"][name] = {
            "passed": ok,
            "failures": failures[:20],
            "failure_count": len(failures),
            "seconds": round(duration, 3),
        }
        report["passed"] = report["passed"] and ok
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'} {name} ({duration:.1f}s)"
                  + (f" - {len(failures)} failure(s)" if failures else ""))
            for f in failures[:5]:
                print(f"    {f}")
    return report
