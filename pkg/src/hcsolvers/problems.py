"""Benchmark problem instances and enumeration-style reference tools.

Three families are provided:

* ``make_cnls``   -- 2-d piecewise-linear least-squares residual fit with an
  l1 residual constraint; non-smooth, hidden-convex through a piecewise
  linear bijection.
* ``make_cgp2d``  -- 2-d constrained geometric program; smooth, hidden-convex
  through the coordinate-wise log map.
* ``make_random_cgp`` -- seed-reproducible d-dimensional geometric program
  with posynomial objective and a normalized posynomial constraint.
* ``make_cos1d``  -- 1-d cosine bump used by the bundle-step failure demo.

The random generator is a splitmix-style 64-bit PRNG with a documented
recurrence so instances are bit-reproducible across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .core import ConstrainedProblem, HiddenConvexMeta, HiddenMap
from .errors import NoFeasibleGridPointError
from .geometry import BoxSet

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator.

    State update: ``s += 0x9E3779B97F4A7C15 (mod 2^64)``; output finalizer:
    ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
    z *= 0x94D049BB133111EB; z ^= z >> 31``.
    Uniforms take the top 53 bits; normals use the Box-Muller transform with
    two uniforms per draw (the first mapped into (0, 1]).
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def normal(self) -> float:
        u1 = ((self.next_u64() >> 11) + 1) * 2.0 ** -53  # in (0, 1]
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


# ---------------------------------------------------------------------------
# CNLS: piecewise-linear residual fit
# ---------------------------------------------------------------------------

_CNLS_B2 = np.array([-0.5, -0.6])


def _cnls_forward(x):
    return np.array([x[0] - 1.0, 2.0 * abs(x[0]) - x[1] - 1.0])


def _cnls_inverse(u):
    x1 = u[0] + 1.0
    return np.array([x1, 2.0 * abs(x1) - u[1] - 1.0])


def _cnls_jac_rows(x):
    s = np.sign(x[0])
    return np.array([1.0, 0.0]), np.array([2.0 * s, -1.0])


def make_cnls() -> ConstrainedProblem:
    """2-d non-smooth instance: F1 = ||c(x)||_inf, F2 = ||c(x) - b||_1 - 0.8
    over [-1, 2.5]^2 with c(x) = (x1 - 1, 2|x1| - x2 - 1).

    The max/abs tie-break picks the lowest-index active branch, with
    sign(0) := 0.
    """
    box = BoxSet(np.array([-1.0, -1.0]), np.array([2.5, 2.5]))

    def f1(x):
        u = _cnls_forward(x)
        return float(np.max(np.abs(u)))

    def g1(x):
        u = _cnls_forward(x)
        r0, r1 = _cnls_jac_rows(x)
        i = int(np.argmax(np.abs(u)))  # lowest index on ties
        s = np.sign(u[i])
        return s * (r0 if i == 0 else r1)

    def f2(x):
        u = _cnls_forward(x)
        return float(np.sum(np.abs(u - _CNLS_B2))) - 0.8

    def g2(x):
        u = _cnls_forward(x)
        r0, r1 = _cnls_jac_rows(x)
        s = np.sign(u - _CNLS_B2)
        return s[0] * r0 + s[1] * r1

    def f1_batch(pts):
        u1 = pts[:, 0] - 1.0
        u2 = 2.0 * np.abs(pts[:, 0]) - pts[:, 1] - 1.0
        return np.maximum(np.abs(u1), np.abs(u2))

    def f2_batch(pts):
        u1 = pts[:, 0] - 1.0
        u2 = 2.0 * np.abs(pts[:, 0]) - pts[:, 1] - 1.0
        return np.abs(u1 - _CNLS_B2[0]) + np.abs(u2 - _CNLS_B2[1]) - 0.8

    # Certified inverse-map modulus: c^{-1} is piecewise linear with blocks
    # [[1, 0], [+-2, -1]] whose largest singular value is 1 + sqrt(2), hence
    # ||c(x) - c(y)|| >= (sqrt(2) - 1) ||x - y|| globally.
    mu_c = math.sqrt(2.0) - 1.0
    # Image diameter: extremes of c over the box occur at corners / the
    # x1 = 0 kink; the farthest image pair is c(0, 2.5) vs c(2.5, -1).
    d_u = math.sqrt(78.5)
    meta = HiddenConvexMeta(mu_c=mu_c, d_u=d_u, rho=2.0,
                            g_bound=math.sqrt(10.0),
                            f1_lower=0.0, f1_upper=5.0, f2_lower=-0.8)
    hmap = HiddenMap(
        forward=_cnls_forward, inverse=_cnls_inverse,
        u_box=BoxSet(np.array([-2.0, -3.5]), np.array([1.5, 5.0])),
        h1_value=lambda u: float(np.max(np.abs(u))),
        h2_value=lambda u: float(np.sum(np.abs(u - _CNLS_B2))) - 0.8,
    )
    return ConstrainedProblem(
        "cnls", box, f1, g1, f2, g2, smooth=False, meta=meta, hidden_map=hmap,
        f1_batch=f1_batch, f2_batch=f2_batch,
        x_star=np.array([0.85, 0.85]), f1_star=0.15, lambda_star=0.5)


# ---------------------------------------------------------------------------
# CGP-2D: two-variable geometric program
# ---------------------------------------------------------------------------

def make_cgp2d() -> ConstrainedProblem:
    """F1 = x1 x2 + 4/x1 + 1/x2,  F2 = x1 x2 - 1  over [0.4, 3]^2."""
    box = BoxSet(np.array([0.4, 0.4]), np.array([3.0, 3.0]))

    def f1(x):
        return x[0] * x[1] + 4.0 / x[0] + 1.0 / x[1]

    def g1(x):
        return np.array([x[1] - 4.0 / x[0] ** 2, x[0] - 1.0 / x[1] ** 2])

    def f2(x):
        return x[0] * x[1] - 1.0

    def g2(x):
        return np.array([x[1], x[0]])

    def f1_batch(pts):
        return pts[:, 0] * pts[:, 1] + 4.0 / pts[:, 0] + 1.0 / pts[:, 1]

    def f2_batch(pts):
        return pts[:, 0] * pts[:, 1] - 1.0

    # Gradient Lipschitz constant: the objective Hessian [[8/x1^3, 1],
    # [1, 2/x2^3]] has its largest eigenvalue at the (0.4, 0.4) corner.
    a, c = 8.0 / 0.4 ** 3, 2.0 / 0.4 ** 3
    l_smooth = 0.5 * (a + c) + math.sqrt(0.25 * (a - c) ** 2 + 1.0)
    # Largest gradient norm is also attained at (0.4, 0.4).
    g_bound = math.hypot(0.4 - 4.0 / 0.16, 0.4 - 1.0 / 0.16)
    meta = HiddenConvexMeta(mu_c=1.0 / 3.0, d_u=math.sqrt(2.0) * math.log(7.5),
                            rho=1.0, g_bound=g_bound, l_smooth=l_smooth,
                            f1_lower=3.0 * 4.0 ** (1.0 / 3.0), f1_upper=12.66,
                            f2_lower=-0.84)
    hmap = HiddenMap(
        forward=lambda x: np.log(x), inverse=lambda u: np.exp(u),
        u_box=BoxSet(np.log(box.lower), np.log(box.upper)),
        h1_value=lambda u: float(np.exp(u[0] + u[1]) + 4.0 * np.exp(-u[0])
                                 + np.exp(-u[1])),
        h2_value=lambda u: float(np.exp(u[0] + u[1]) - 1.0),
    )
    return ConstrainedProblem(
        "cgp2d", box, f1, g1, f2, g2, smooth=True, meta=meta, hidden_map=hmap,
        f1_batch=f1_batch, f2_batch=f2_batch,
        x_star=np.array([2.0, 0.5]), f1_star=5.0, lambda_star=1.0)


# ---------------------------------------------------------------------------
# Random high-dimensional geometric program
# ---------------------------------------------------------------------------

@dataclass
class RandomCgpSpec:
    seed: int
    dim: int = 100
    k1: int = 10
    k2: int = 8


def _draw_cgp_data(spec: RandomCgpSpec):
    """Draw order (fixed): F1 exponents row-major (k1 x dim, uniform in
    [-0.5, 0.5]), F1 coefficients (k1 log-normals exp(0.5 * N(0,1))), then the
    same for F2, whose coefficients are finally normalized to sum to one."""
    rng = SplitMix64(spec.seed)
    a1 = np.array([[rng.uniform() - 0.5 for _ in range(spec.dim)]
                   for _ in range(spec.k1)])
    b1 = np.array([math.exp(0.5 * rng.normal()) for _ in range(spec.k1)])
    a2 = np.array([[rng.uniform() - 0.5 for _ in range(spec.dim)]
                   for _ in range(spec.k2)])
    b2 = np.array([math.exp(0.5 * rng.normal()) for _ in range(spec.k2)])
    b2 = b2 / b2.sum()
    return a1, b1, a2, b2


def make_random_cgp(seed: int, dim: int = 100, k1: int = 10, k2: int = 8
                    ) -> ConstrainedProblem:
    """Posynomial objective / normalized posynomial constraint over
    [0.5, 2]^dim.  The constraint satisfies F2(1) = 0 by construction."""
    spec = RandomCgpSpec(seed, dim, k1, k2)
    a1, b1, a2, b2 = _draw_cgp_data(spec)
    box = BoxSet(np.full(dim, 0.5), np.full(dim, 2.0))

    def _terms(a, b, x):
        return b * np.exp(a @ np.log(x))

    def f1(x):
        return float(np.sum(_terms(a1, b1, x)))

    def g1(x):
        t = _terms(a1, b1, x)
        return (t @ a1) / x

    def f2(x):
        return float(np.sum(_terms(a2, b2, x))) - 1.0

    def g2(x):
        t = _terms(a2, b2, x)
        return (t @ a2) / x

    def f1_batch(pts):
        return np.exp(np.log(pts) @ a1.T) @ b1

    def f2_batch(pts):
        return np.exp(np.log(pts) @ a2.T) @ b2 - 1.0

    # Curvature/gradient scales estimated along random chords of the box
    # (sub-stream of the same generator); these feed only default schedules,
    # never the benchmark configurations.
    est_rng = SplitMix64(spec.seed ^ 0xDA3E39CB94B95BDB)
    g_est, curv_est = 0.0, 0.0
    for _ in range(64):
        p = np.array([0.5 + 1.5 * est_rng.uniform() for _ in range(dim)])
        q = np.array([0.5 + 1.5 * est_rng.uniform() for _ in range(dim)])
        g_est = max(g_est, float(np.linalg.norm(g1(p))))
        h = q - p
        nh2 = float(h @ h)
        for fv, gv in ((f1, g1), (f2, g2)):
            curv = abs(fv(q) - fv(p) - float(gv(p) @ h)) * 2.0 / nh2
            curv_est = max(curv_est, curv)
    meta = HiddenConvexMeta(mu_c=0.5, d_u=math.sqrt(dim) * math.log(4.0),
                            rho=curv_est, g_bound=None, l_smooth=curv_est,
                            f1_lower=0.0, f1_upper=float(np.sum(b1)) * 4.0,
                            f2_lower=-1.0)
    hmap = HiddenMap(
        forward=lambda x: np.log(x), inverse=lambda u: np.exp(u),
        u_box=BoxSet(np.log(box.lower), np.log(box.upper)),
        h1_value=lambda u: float(b1 @ np.exp(a1 @ u)),
        h2_value=lambda u: float(b2 @ np.exp(a2 @ u)) - 1.0,
    )
    prob = ConstrainedProblem(
        f"cgp-rand-{seed}", box, f1, g1, f2, g2, smooth=True, meta=meta,
        hidden_map=hmap, f1_batch=f1_batch, f2_batch=f2_batch)
    prob.extras = {"a1": a1, "b1": b1, "a2": a2, "b2": b2, "spec": spec}
    return prob


# ---------------------------------------------------------------------------
# 1-d cosine bump for the bundle-step failure demo
# ---------------------------------------------------------------------------

def make_cos1d() -> ConstrainedProblem:
    """F1 = 1 - cos(pi x) on [-0.95, 0.95] with a vacuous constraint.

    Hidden-convex through u = sin(pi x / 2): F1 = 2 u^2, so the hidden
    objective is 4-strongly convex.
    """
    box = BoxSet(np.array([-0.95]), np.array([0.95]))

    def f1(x):
        return 1.0 - math.cos(math.pi * x[0])

    def g1(x):
        return np.array([math.pi * math.sin(math.pi * x[0])])

    def f2(x):
        return 0.0

    def g2(x):
        return np.zeros(1)

    u_hi = math.sin(0.475 * math.pi)
    meta = HiddenConvexMeta(
        mu_c=0.5 * math.pi * math.cos(0.475 * math.pi),
        d_u=2.0 * u_hi,
        rho=math.pi ** 2,  # |F1''| <= pi^2 everywhere
        g_bound=math.pi, l_smooth=math.pi ** 2, mu_h=4.0,
        f1_lower=0.0, f1_upper=1.0 + math.cos(0.05 * math.pi), f2_lower=0.0)
    hmap = HiddenMap(
        forward=lambda x: np.array([math.sin(0.5 * math.pi * x[0])]),
        inverse=lambda u: np.array([2.0 / math.pi * math.asin(u[0])]),
        u_box=BoxSet(np.array([-u_hi]), np.array([u_hi])),
        h1_value=lambda u: 2.0 * float(u[0]) ** 2,
        h2_value=lambda u: 0.0,
    )
    return ConstrainedProblem(
        "cos1d", box, f1, g1, f2, g2, smooth=True, meta=meta, hidden_map=hmap,
        f1_batch=lambda pts: 1.0 - np.cos(math.pi * pts[:, 0]),
        f2_batch=lambda pts: np.zeros(len(pts)),
        x_star=np.zeros(1), f1_star=0.0)


# ---------------------------------------------------------------------------
# Utilities
# ---------------------------------------------------------------------------

def equality_to_inequality(components: Sequence[Tuple[Callable, Callable]]):
    """Turn equality residuals ``r_i(x) = 0`` into the single function
    ``max_i |r_i(x)|`` with a deterministic sub-gradient tie-break.

    Branches are ordered (r_0, +), (r_0, -), (r_1, +), ...; the sub-gradient
    comes from the first branch attaining the max.
    """

    def value(x):
        return max(abs(float(v(x))) for v, _ in components)

    def subgrad(x):
        best, best_g = -math.inf, None
        for v, g in components:
            val = float(v(x))
            for sign in (1.0, -1.0):
                if sign * val > best:
                    best = sign * val
                    best_g = sign * np.asarray(g(x), dtype=float)
        return best_g

    return value, subgrad


def grid_oracle(problem, resolution: float, constraint_slack: float = 0.0,
                count: bool = False):
    """Exhaustive grid scan: best F1 over grid points with F2 <= slack.

    Grid axes include both box endpoints with spacing <= ``resolution``; ties
    resolve to the lexicographically smallest grid index (row-major order).
    Intended for low dimension; evaluation is chunked and vectorized when the
    problem provides batch oracles.  Returns ``(x_best, f1_best)``.
    """
    box = problem.domain
    axes = []
    for lo, hi in zip(box.lower, box.upper):
        n = max(2, int(math.ceil((hi - lo) / resolution)) + 1)
        axes.append(np.linspace(lo, hi, n))
    shape = tuple(len(ax) for ax in axes)
    total = int(np.prod(shape))

    f1b = problem.f1_batch
    f2b = problem.f2_batch
    if f1b is None or f2b is None:
        f1b = lambda pts: np.array([problem.peek_f1(p) for p in pts])
        f2b = lambda pts: np.array([problem.peek_f2(p) for p in pts])

    best_val, best_idx = math.inf, None
    chunk = 1 << 19
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        idx = np.arange(start, stop)
        pts = np.empty((stop - start, len(axes)))
        rem = idx
        for d in range(len(axes) - 1, -1, -1):
            pts[:, d] = axes[d][rem % shape[d]]
            rem = rem // shape[d]
        feas = f2b(pts) <= constraint_slack
        if not np.any(feas):
            continue
        vals = f1b(pts[feas])
        j = int(np.argmin(vals))
        v = float(vals[j])
        if v < best_val - 0.0:  # strict: keeps the first (lexicographic) argmin
            best_val = v
            best_idx = int(idx[feas][j])
    if count and hasattr(problem, "counter"):
        problem.counter.f1_values += total
        problem.counter.f2_values += total
    if best_idx is None:
        raise NoFeasibleGridPointError(
            f"no grid point with F2 <= {constraint_slack}")
    coords = []
    rem = best_idx
    for d in range(len(axes) - 1, -1, -1):
        coords.append(axes[d][rem % shape[d]])
        rem //= shape[d]
    return np.array(coords[::-1]), best_val


_FACTORIES = {
    "cnls": make_cnls,
    "cgp2d": make_cgp2d,
    "cos1d": make_cos1d,
}


def make_problem(name: str, seed: int = 42) -> ConstrainedProblem:
    if name in _FACTORIES:
        return _FACTORIES[name]()
    if name == "cgp-rand":
        return make_random_cgp(seed)
    raise ValueError(f"unknown problem {name!r}")
