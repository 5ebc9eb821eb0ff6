"""Reference computations used only by the tests.

None of these reuse the closed forms under test: they enumerate grids,
active sets or finite orders directly.
"""

import itertools
import math

import numpy as np

SQRT2 = math.sqrt(2.0)


def witness_ratio_exact():
    # diff = (sqrt2/2, 1/2 + sqrt2/4, -sqrt2/4); |diff|^2 = 1 + sqrt2/4, <diff, e1>^2 = 1/2
    return math.sqrt(2.0 / (4.0 + SQRT2))


def quarter_grid(lo, hi):
    return np.arange(round(lo * 4), round(hi * 4) + 1) / 4.0


def sup_membership_grid(xs, zs):
    """``member[i, j]`` for x = xs[i], z = zs[j], by brute force over the z grid.

    The nearest distance is taken as the minimum of ``max|z - x|`` over grid
    points ``z >= 0``; the grid must contain a true nearest point.
    """
    dev = np.abs(zs[None, :, :] - xs[:, None, :]).max(axis=2)
    feasible = np.all(zs >= 0.0, axis=1)
    best = np.where(feasible[None, :], dev, np.inf).min(axis=1)
    return feasible[None, :] & (dev == best[:, None]), best


def lcp_fixed_point(A, b):
    """The unique ``x = (A x + b)+`` for ``A >= 0`` with spectral radius < 1,
    found by enumerating supports."""
    n = len(b)
    for k in range(n + 1):
        for support in itertools.combinations(range(n), k):
            s = list(support)
            x = np.zeros(n)
            if s:
                x[s] = np.linalg.solve(np.eye(k) - A[np.ix_(s, s)], b[s])
            y = A @ x + b
            off = [i for i in range(n) if i not in support]
            if np.all(x[s] >= -1e-12) and np.all(y[off] <= 1e-12):
                return np.maximum(x, 0.0)
    raise AssertionError("no complementary support found")


def lp_box_minimizer(x, p):
    """Constrained minimiser of ``||x - z||_p`` over ``z >= 0`` via scipy."""
    from scipy.optimize import minimize

    x = np.asarray(x, dtype=float)
    res = minimize(
        lambda z: np.sum(np.abs(x - z) ** p),
        np.abs(x),
        method="L-BFGS-B",
        bounds=[(0.0, None)] * x.size,
        options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10_000},
    )
    return res.x


def downward_increasing_brute(leq, elements, images):
    for x, y in itertools.product(elements, repeat=2):
        if not leq(x, y):
            continue
        for w in images[y]:
            if not any(leq(z, w) for z in images[x]):
                return False
    return True


def least_fixed_points_by_chain(leq, elements, images, start):
    """Walk down from ``start`` choosing members below the current point;
    returns every point reachable this way that is fixed."""
    seen, stack, fixed = set(), [start], set()
    while stack:
        z = stack.pop()
        if z in seen:
            continue
        seen.add(z)
        if z in images[z]:
            fixed.add(z)
        stack.extend(v for v in images[z] if leq(v, z))
    return fixed
