"""Certified reference optima via the convex hidden-variable reformulation.

Every benchmark problem is convex after the substitution ``u = c(x)``; this
module builds that convex program explicitly and solves it with a mature
interior-point stack (cvxpy), then certifies the result with an internally
computed duality gap: the constraint multiplier is recovered and the
Lagrangian ``H1 + lam * H2`` is minimized over the hidden box, giving a true
lower bound.  The certified value is what solver tests compare against; the
iterative solvers under test never touch this code path.

Frozen values for the shipped high-dimensional instance live in
``_fixtures/`` so the CLI can answer without a conic solve.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from typing import Dict, Optional

import numpy as np

from .core import ConstrainedProblem

_CNLS_B2 = np.array([-0.5, -0.6])


def _cvxpy():
    import cvxpy as cp
    return cp


def _solve_model(objective, constraint_expr, u, u_box, extra_feas_tol):
    cp = _cvxpy()
    cons = [constraint_expr <= 0, u >= u_box.lower, u <= u_box.upper]
    prob = cp.Problem(cp.Minimize(objective), cons)
    prob.solve(solver=cp.CLARABEL)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"reference solve failed: {prob.status}")
    lam = float(cons[0].dual_value)
    u_star = np.asarray(u.value, dtype=float).ravel()
    # Duality-gap certificate: minimize the Lagrangian over the box alone.
    lag = cp.Problem(cp.Minimize(objective + lam * constraint_expr),
                     [u >= u_box.lower, u <= u_box.upper])
    lag.solve(solver=cp.CLARABEL)
    lower = float(lag.value)
    return u_star, float(prob.value), lam, lower


def reference_convex(problem: ConstrainedProblem, eps: float = 1e-6) -> Dict:
    """Solve the hidden convex program to within ``eps`` (certified).

    Returns a dict with ``f1_star_ref``, ``x_star``, ``lambda_dual`` and the
    certified ``gap``.  Requires the problem to expose its hidden structure.
    """
    cp = _cvxpy()
    hm = problem.hidden_map
    if hm is None or hm.u_box is None:
        raise ValueError("problem has no hidden convex reformulation")
    name = problem.name
    u = cp.Variable(problem.dim)
    if name == "cnls":
        obj = cp.norm_inf(u)
        con = cp.norm1(u - _CNLS_B2) - 0.8
    elif name == "cgp2d":
        obj = cp.exp(u[0] + u[1]) + 4.0 * cp.exp(-u[0]) + cp.exp(-u[1])
        con = cp.exp(u[0] + u[1]) - 1.0
    elif name.startswith("cgp-rand"):
        a1, b1 = problem.extras["a1"], problem.extras["b1"]
        a2, b2 = problem.extras["a2"], problem.extras["b2"]
        obj = b1 @ cp.exp(a1 @ u)
        con = b2 @ cp.exp(a2 @ u) - 1.0
    else:
        raise ValueError(f"no reference model for problem {name!r}")
    u_star, val, lam, lower = _solve_model(obj, con, u, hm.u_box, eps)
    x_star = hm.inverse(u_star)
    # Evaluate feasibly: report the true value at the recovered point.
    f1 = problem.peek_f1(x_star)
    f2 = problem.peek_f2(x_star)
    gap = f1 - lower
    if f2 > eps or gap > max(10.0 * eps, 1e-6 * (1.0 + abs(f1))):
        raise RuntimeError(
            f"reference certificate too loose: feasibility {f2:.3e}, gap {gap:.3e}")
    return {"f1_star_ref": min(f1, val), "x_star": x_star,
            "lambda_dual": lam, "gap": gap, "f2_at_ref": f2}


def frozen_reference(name: str, seed: int) -> Optional[Dict]:
    """Look up a frozen reference value shipped with the package."""
    fname = f"{name.replace('-', '_')}_{seed}.json"
    try:
        path = resources.files("hcsolvers._fixtures").joinpath(fname)
        with path.open() as fh:
            return json.load(fh)
    except (FileNotFoundError, ModuleNotFoundError):
        return None


def reference_value(problem: ConstrainedProblem, seed: int = 42,
                    eps: float = 1e-6, allow_solve: bool = True
                    ) -> Optional[float]:
    """Best available reference optimum: analytic, frozen, or solved."""
    if problem.f1_star is not None:
        return float(problem.f1_star)
    base = problem.name.rsplit("-", 1)[0] if problem.name.startswith("cgp-rand") \
        else problem.name
    frozen = frozen_reference(base, seed)
    if frozen is not None:
        return float(frozen["f1_star_ref"])
    if allow_solve:
        return float(reference_convex(problem, eps)["f1_star_ref"])
    return None
