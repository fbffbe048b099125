"""Exact vs approximated p-resistance on small graphs.

The exact value minimizes the edge energy with a unit potential drop pinned
between the pair; the approximation evaluates a conjugate-exponent seminorm
of two pseudoinverse columns and reuses one pseudoinverse for every pair.
"""

import numpy as np

from presistance import (
    PairQuery,
    SolverConfig,
    approx_metric,
    approx_presistance,
    exact_presistance,
    generate,
    laplacian_pinv,
)

cfg = SolverConfig(grad_tol=1e-10)

print("== path 0-1-2, unit weights ==")
g = generate("path", n=3)
pinv = laplacian_pinv(g)
for p in (1.5, 2.0, 3.0, 5.0):
    q = PairQuery(0, 2, p)
    exact, rep = exact_presistance(g, q, cfg)
    approx = approx_presistance(pinv, g, q)
    print(f"p={p}: exact r = {exact:.6f} = 2^(p-1), approx = {approx:.6f}, "
          f"metric r^(1/(p-1)) = {approx_metric(pinv, g, q):.6f}")

print("\n== triangle, all pairs equivalent ==")
k3 = generate("complete", n=3)
pinv = laplacian_pinv(k3)
q = PairQuery(0, 1, 2.0)
exact, _ = exact_presistance(k3, q, cfg)
print(f"p=2: exact = {exact:.6f} (series-parallel oracle: 1 || 2 = 2/3), "
      f"approx = {approx_presistance(pinv, k3, q):.6f}")

print("\n== trees: the approximation is exact ==")
tree = generate("random_tree", n=20, seed=7, weight_range=(0.5, 2.0))
pinv = laplacian_pinv(tree)
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(10):
    i, j = map(int, rng.choice(20, size=2, replace=False))
    p = float(rng.choice([1.5, 3.0, 10.0]))
    q = PairQuery(i, j, p)
    exact, _ = exact_presistance(tree, q, cfg)
    approx = approx_presistance(pinv, tree, q)
    worst = max(worst, abs(approx - exact) / exact)
print(f"worst relative gap over 10 random pairs: {worst:.2e}")
