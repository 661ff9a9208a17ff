"""Reference values for tests/frozen.rs, computed with cvxpy + Clarabel.

Run: python3 tools/oracle_values.py
"""
import itertools
import cvxpy as cp
import numpy as np

V8 = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 1), (1, 5), (2, 6), (3, 7), (4, 8)]
C5XC2 = [(1, 2), (1, 3), (1, 9), (2, 4), (2, 10), (3, 4), (3, 5), (4, 6), (5, 6), (5, 7),
         (6, 8), (7, 8), (7, 9), (8, 10), (9, 10)]


def zero_based(edges):
    return [(a - 1, b - 1) for a, b in edges]


def graphs():
    c5 = [(i, (i + 1) % 5) for i in range(5)]
    k222 = [(i, j) for i in range(6) for j in range(i + 1, 6) if j != i + 3]
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    petersen = outer + inner + [(i, i + 5) for i in range(5)]
    k5 = list(itertools.combinations(range(5), 2))
    return {
        "C5": (5, c5),
        "K5": (5, k5),
        "K222": (6, k222),
        "V8": (8, zero_based(V8)),
        "C5xC2": (10, zero_based(C5XC2)),
        "Petersen": (10, petersen),
    }


def solve(prob):
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    return prob.value


def maxcut(n, edges):
    lap = np.zeros((n, n))
    for i, j in edges:
        lap[i, i] += 1
        lap[j, j] += 1
        lap[i, j] -= 1
        lap[j, i] -= 1
    x = cp.Variable((n, n), symmetric=True)
    return solve(cp.Problem(cp.Maximize(cp.trace(lap @ x) / 4), [x >> 0, cp.diag(x) == 1]))


def instance(n, edges, seed):
    rng = np.random.default_rng(seed)
    p = rng.uniform(-0.4, 0.4, size=(n, n))
    g = p @ p.T
    vals = {(i, i): round(float(g[i, i]), 6) for i in range(n)}
    vals.update({(min(i, j), max(i, j)): round(float(g[i, j]), 6) for i, j in edges})
    return vals


def constraints(x, vals):
    return [x >> 0] + [x[i, j] == v for (i, j), v in vals.items()]


def stretch(n, vals, e0):
    x = cp.Variable((n, n), symmetric=True)
    return solve(cp.Problem(cp.Maximize(x[e0]), constraints(x, vals)))


def margin(n, vals):
    x = cp.Variable((n, n), symmetric=True)
    t = cp.Variable()
    cons = [x - t * np.eye(n) >> 0, t <= 1] + [x[i, j] == v for (i, j), v in vals.items()]
    return solve(cp.Problem(cp.Maximize(t), cons))


def main():
    g = graphs()
    for name in ["C5", "K5", "K222", "V8", "C5xC2", "Petersen"]:
        print(f"maxcut {name} {maxcut(*g[name]):.10f}")
    for name, e0, seed in [("V8", (0, 3), 11), ("C5xC2", (2, 7), 12), ("C5", (0, 2), 13)]:
        n, edges = g[name]
        vals = instance(n, edges, seed)
        print(f"instance {name} seed {seed}")
        for (i, j), v in sorted(vals.items()):
            print(f"  ({i}, {j}, {v!r}),")
        print(f"  stretch {e0} {stretch(n, vals, e0):.10f}")
        print(f"  margin {margin(n, vals):.10f}")


if __name__ == "__main__":
    main()
