"""Projected sub-gradient loops, including the switching variant (SwSG).

The switching loop solves a strongly convex proximal subproblem
``min phi1(x) s.t. phi2(x) <= tau`` by tightening the constraint to
``phi2 <= tau - alpha*tau/3`` and, at each iterate, stepping on the
constraint when the tightened value exceeds ``eps_in`` and on the objective
otherwise.  The output is the (t+1)-weighted average of the objective-step
iterates, which is feasible for the original ``phi2 <= tau`` whenever
``eps_in <= alpha*tau/3`` and ``phi2`` is convex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .core import CallBudget, Oracle
from .errors import EmptyFeasibleSetError
from .geometry import BoxSet


@dataclass
class InnerResult:
    x: np.ndarray
    steps: int
    n_objective_steps: int = 0
    diagnostics: dict = field(default_factory=dict)


def swsg_stepsize(mu_strong: float, t: int) -> float:
    """Step size 2 / (mu (t+2) + 144 mu / (t+1)) for the strongly convex
    switching loop (t counted from 0)."""
    if mu_strong <= 0:
        raise ValueError("mu_strong must be positive")
    return 2.0 / (mu_strong * (t + 2) + 144.0 * mu_strong / (t + 1))


def swsg(phi1: Oracle, phi2: Oracle, x_k: np.ndarray, box: BoxSet,
         t_in: int, tau: float, alpha: float, eps_in: float,
         mu_strong: float, stepsize: Optional[Callable[[int], float]] = None,
         budget: Optional[CallBudget] = None) -> InnerResult:
    """Switching sub-gradient loop started at ``x_k``.

    Each step consumes two oracle calls (one constraint value for the
    switch test, one sub-gradient).  Raises
    :class:`EmptyFeasibleSetError` when no iterate passed the switch test.
    """
    if stepsize is None:
        stepsize = lambda t: swsg_stepsize(mu_strong, t)
    shift = -tau + alpha * tau / 3.0
    z = np.asarray(x_k, dtype=float).copy()
    x_bar = None
    weight_sum = 0.0
    n_obj = 0
    t = 0
    for t in range(t_in):
        if budget is not None and budget.exhausted(upcoming=2):
            break
        v2_shifted = phi2.value(z) + shift
        if v2_shifted <= eps_in:
            g = phi1.subgrad(z)
            w = float(t + 1)
            weight_sum += w
            if x_bar is None:
                x_bar = z.copy()
            else:
                x_bar += (w / weight_sum) * (z - x_bar)
            n_obj += 1
        else:
            g = phi2.subgrad(z)
        z = box.project(z - stepsize(t) * g)
    if x_bar is None:
        raise EmptyFeasibleSetError(
            "switching loop produced no iterate passing the feasibility test")
    return InnerResult(x=x_bar, steps=t + 1, n_objective_steps=n_obj,
                       diagnostics={"weight_sum": weight_sum})


def projected_subgradient(oracle: Oracle, box: BoxSet, x0: np.ndarray,
                          steps: int, stepsize: Callable[[int], float],
                          mu_strong: Optional[float] = None,
                          budget: Optional[CallBudget] = None,
                          average: bool = True) -> InnerResult:
    """Plain projected sub-gradient descent on a single function.

    With ``average=True`` the output is the (t+1)-weighted running average
    (the right choice for strongly convex objectives); otherwise the last
    iterate is returned.  One sub-gradient call per step.
    """
    z = np.asarray(x0, dtype=float).copy()
    x_bar = z.copy()
    weight_sum = 0.0
    t = -1
    for t in range(steps):
        if budget is not None and budget.exhausted(upcoming=1):
            break
        g = oracle.subgrad(z)
        z = box.project(z - stepsize(t) * g)
        if average:
            w = float(t + 1)
            weight_sum += w
            x_bar += (w / weight_sum) * (z - x_bar)
        else:
            x_bar = z
    return InnerResult(x=x_bar, steps=t + 1)


def descend_to_feasibility(value: Callable[[np.ndarray], float],
                           subgrad: Callable[[np.ndarray], np.ndarray],
                           box: BoxSet, x0: np.ndarray, target: float,
                           max_steps: int, stepsize: Callable[[int], float],
                           budget: Optional[CallBudget] = None):
    """Projected sub-gradient descent on a constraint function until its
    value drops to ``target``.  Returns (point, reached, steps)."""
    z = np.asarray(x0, dtype=float).copy()
    best = z.copy()
    best_v = np.inf
    for t in range(max_steps):
        if budget is not None and budget.exhausted(upcoming=2):
            break
        v = value(z)
        if v < best_v:
            best_v = v
            best = z.copy()
        if v <= target:
            return z, True, t
        z = box.project(z - stepsize(t) * subgrad(z))
    return best, best_v <= target, max_steps
