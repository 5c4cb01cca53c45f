"""Bundle-level methods: shifted cuts, level projections, adaptive levels.

One bundle step projects the current point onto the box intersected with two
shifted linear cuts,

    l_F1(x; x_t) <= (1 - alpha*beta) F1(x_t) + alpha*beta*eta
                    + (1 - beta) alpha lam [F2(x_t)]_+ + tau
    l_F2(x; x_t) <= (1 - alpha) F2(x_t) + tau,

where ``l_F`` is the first-order minorant at ``x_t``.  The shifts (the
``(1 - alpha)`` retention of current values plus the slack ``tau``) are what
keep the projection target non-empty on hidden-convex problems; the level
parameter ``eta`` is either the known optimal value (star variant, beta = 1)
or adapted across epochs from observed penalties (adaptive level search).

The unshifted variant is retained only as a demonstration of failure: on a
cosine bump its projection target collapses and the iterates oscillate
between the box corners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .core import (CallBudget, ConstrainedProblem, Oracle, SolveReport,
                   TraceRecord)
from .errors import NonSmoothProblemError, QpInfeasibleError, InfeasibleError
from .geometry import Halfspace, project_box_halfspaces
from .subgrad import projected_subgradient


def linear_minorant(value: float, grad: np.ndarray, y: np.ndarray,
                    rhs: float) -> Halfspace:
    """Halfspace form of ``F(y) + <g, x - y> <= rhs``."""
    grad = np.asarray(grad, dtype=float)
    y = np.asarray(y, dtype=float)
    return Halfspace(grad, rhs - value + float(grad @ y))


def sbl_step(problem: ConstrainedProblem, x_t: np.ndarray, eta: float,
             alpha: float, beta: float, lam: float, tau: float,
             qp_tol: float = 1e-9):
    """One shifted bundle-level projection (four counted oracle calls).

    Returns ``(x_next, f1_t, f2_t)``; raises :class:`QpInfeasibleError` when
    the cut intersection is empty.
    """
    f1 = problem.f1(x_t)
    f2 = problem.f2(x_t)
    g1 = problem.g1(x_t)
    g2 = problem.g2(x_t)
    rhs1 = ((1.0 - alpha * beta) * f1 + alpha * beta * eta
            + (1.0 - beta) * alpha * lam * max(f2, 0.0) + tau)
    rhs2 = (1.0 - alpha) * f2 + tau
    cuts = [linear_minorant(f1, g1, x_t, rhs1),
            linear_minorant(f2, g2, x_t, rhs2)]
    try:
        x_next = project_box_halfspaces(problem.domain, x_t, cuts, tol=qp_tol)
    except InfeasibleError as exc:
        raise QpInfeasibleError(str(exc)) from exc
    return x_next, f1, f2


def s_star_bl(problem: ConstrainedProblem, x0, f1_star: float, t_steps: int,
              alpha: float, tau: float = 0.0, budget: Optional[int] = None,
              stop_level: Optional[float] = None) -> SolveReport:
    """Shifted star bundle-level method (beta = 1, level = known F1*).

    Stops early when ``max(F1 - f1_star, F2) <= stop_level`` (if given) or
    when a projection target is empty.  Returns the best iterate by that
    merit, with all visited points kept for step-length diagnostics.
    """
    x = np.asarray(x0, dtype=float).copy()
    cap = CallBudget(problem.counter, budget)
    points = [x.copy()]
    trace: List[TraceRecord] = []
    best_x, best_v = x.copy(), math.inf
    truncated = False
    for _t in range(t_steps):
        if cap.exhausted(upcoming=4):
            break
        try:
            x_next, f1, f2 = sbl_step(problem, x, f1_star, alpha, 1.0, 0.0, tau)
        except QpInfeasibleError:
            truncated = True
            break
        v = max(f1 - f1_star, f2)
        if v < best_v:
            best_v, best_x = v, x.copy()
        trace.append(TraceRecord(problem.counter.total, f1, f2,
                                 f1 + max(f2, 0.0), eta=f1_star,
                                 iter_kind="bundle"))
        x = x_next
        points.append(x.copy())
        if stop_level is not None and v <= stop_level:
            break
    f1_last = problem.peek_f1(x)
    f2_last = problem.peek_f2(x)
    if max(f1_last - f1_star, f2_last) < best_v:
        best_x = x.copy()
    return SolveReport(
        method="s-starbl", problem=problem.name, x_final=best_x,
        f1_final=problem.peek_f1(best_x), f2_final=problem.peek_f2(best_x),
        oracle_calls_total=problem.counter.total, trace=trace,
        params={"alpha": alpha, "tau": tau, "f1_star": f1_star,
                "t_steps": t_steps},
        extras={"points": points, "truncated": truncated})


def star_bl_unshifted_demo(problem: ConstrainedProblem, x0, f1_star: float,
                           t_steps: int, shifted: bool = False,
                           alpha: float = 0.615, tau: float = 0.0
                           ) -> List[np.ndarray]:
    """Bundle-level iterates without (or with) the value shift.

    The unshifted cut is ``l_F1(x; x_t) <= f1_star``.  When the cut misses
    the box entirely, the step falls back to the raw halfspace projection
    clamped to the box, which is what produces the corner-to-corner
    oscillation this demo exists to exhibit.  The shifted variant retains a
    ``(1 - alpha)`` fraction of the current gap and stays in the interior.
    """
    x = np.asarray(x0, dtype=float).copy()
    box = problem.domain
    out = [x.copy()]
    for _t in range(t_steps):
        f1 = problem.f1(x)
        g1 = problem.g1(x)
        if shifted:
            rhs = f1_star + (1.0 - alpha) * (f1 - f1_star) + tau
        else:
            rhs = f1_star
        cut = linear_minorant(f1, g1, x, rhs)
        try:
            x = project_box_halfspaces(box, x, [cut])
        except InfeasibleError:
            gn2 = float(cut.normal @ cut.normal)
            if gn2 == 0.0:
                break
            v = float(cut.normal @ x) - cut.offset
            x = box.project(x - (v / gn2) * cut.normal)
        out.append(x.copy())
    return out


def s_bl(problem: ConstrainedProblem, x0, eta: float, t_steps: int,
         alpha: float, beta: float, lam: float, tau: float,
         budget: Optional[CallBudget] = None):
    """One epoch of the shifted bundle-level method at a fixed level ``eta``.

    Returns ``(best_x, best_penalty, trace, truncated)`` where best is by
    exact penalty ``F1 + lam [F2]_+`` over visited iterates; an empty
    projection target truncates the epoch.
    """
    x = np.asarray(x0, dtype=float).copy()
    trace: List[TraceRecord] = []
    best_x, best_pen = None, math.inf
    truncated = False
    for _t in range(t_steps):
        if budget is not None and budget.exhausted(upcoming=4):
            break
        try:
            x_next, f1, f2 = sbl_step(problem, x, eta, alpha, beta, lam, tau)
        except QpInfeasibleError:
            truncated = True
            break
        pen = f1 + lam * max(f2, 0.0)
        if pen < best_pen:
            best_pen, best_x = pen, x.copy()
        trace.append(TraceRecord(problem.counter.total, f1, f2, pen, eta=eta,
                                 iter_kind="bundle"))
        x = x_next
    if best_x is None:
        best_x = x.copy()
        best_pen = problem.peek_f1(x) + lam * max(problem.peek_f2(x), 0.0)
    return best_x, best_pen, trace, truncated


@dataclass
class EtaState:
    eta: float
    history: List[Tuple[float, float]] = field(default_factory=list)

    def update(self, beta: float, penalty: float) -> float:
        """Level recursion eta <- (1-beta)(eta + penalty) - (1-2 beta) eta."""
        new = (1.0 - beta) * (self.eta + penalty) - (1.0 - 2.0 * beta) * self.eta
        self.history.append((self.eta, penalty))
        self.eta = new
        return new


def ada_ls(problem: ConstrainedProblem, x0, eta0: float, eps: float,
           lam: float, beta: float = 0.5, alpha: Optional[float] = None,
           t_steps: Optional[int] = None, n_epochs: Optional[int] = None,
           tau: float = 0.0, budget: Optional[int] = None) -> SolveReport:
    """Adaptive level search: repeat fixed-level epochs from the same start,
    feeding the best observed penalty back into the level.

    Unspecified knobs default to their worst-case formulas through
    A = (rho + L) D_U^2 / (2 mu_c^2); benchmark configurations always set
    them explicitly.
    """
    meta = problem.meta
    x0 = np.asarray(x0, dtype=float)
    if alpha is None or t_steps is None or n_epochs is None:
        if meta is None or meta.l_smooth is None:
            raise NonSmoothProblemError("default level schedule needs l_smooth")
        a_const = (meta.rho + meta.l_smooth) * meta.d_u ** 2 / (2.0 * meta.mu_c ** 2)
        gap0 = max(problem.peek_f1(x0) - eta0, 2.0 * eps)
        logterm = math.log(max(8.0 * gap0 / eps, math.e))
        if alpha is None:
            alpha = min(eps / (16.0 * a_const),
                        eps / (8.0 * max(lam, 1e-12) * a_const * logterm))
        if t_steps is None:
            t_steps = int(math.ceil(2.0 / alpha * logterm))
        if n_epochs is None:
            n_epochs = int(math.ceil(math.log2(max(gap0 / eps, 2.0))))
    cap = CallBudget(problem.counter, budget)
    state = EtaState(eta0)
    trace: List[TraceRecord] = []
    best_x, best_pen = x0.copy(), math.inf
    for _k in range(n_epochs):
        if cap.exhausted(upcoming=4):
            break
        xk, pen_k, epoch_trace, _trunc = s_bl(problem, x0, state.eta, t_steps,
                                              alpha, beta, lam, tau, budget=cap)
        trace.extend(epoch_trace)
        if pen_k < best_pen:
            best_pen, best_x = pen_k, xk.copy()
        f1k = problem.peek_f1(xk)
        f2k = problem.peek_f2(xk)
        trace.append(TraceRecord(problem.counter.total, f1k, f2k, pen_k,
                                 eta=state.eta, iter_kind="epoch"))
        state.update(beta, pen_k)
    return SolveReport(
        method="s-bl-adals", problem=problem.name, x_final=best_x,
        f1_final=problem.peek_f1(best_x), f2_final=problem.peek_f2(best_x),
        oracle_calls_total=problem.counter.total, trace=trace,
        params={"eta0": eta0, "eps": eps, "lambda": lam, "alpha": alpha,
                "beta": beta, "t_steps": t_steps, "n_epochs": n_epochs,
                "tau": tau},
        extras={"eta_history": state.history, "best_penalty": best_pen})


def init_lower_bound(problem: ConstrainedProblem, eps: float, x0=None,
                     max_steps: int = 20000):
    """Initial level from unconstrained descent on F1.

    Runs projected gradient descent on F1 alone; if the result happens to be
    eps-feasible it is already a solution (returned as the second element),
    otherwise ``F1(z) - eps`` is a valid lower bound on the constrained
    optimum.  Returns ``(eta0, solution_or_None)``.
    """
    meta = problem.meta
    if meta is None or meta.l_smooth is None:
        raise NonSmoothProblemError("init_lower_bound needs l_smooth")
    box = problem.domain
    if x0 is None:
        x0 = box.center()
    step = 1.0 / (meta.l_smooth + meta.rho)
    res = projected_subgradient(
        Oracle(value=problem.f1, subgrad=problem.g1), box,
        np.asarray(x0, dtype=float), max_steps, lambda t: step, average=False)
    z = res.x
    if problem.f2(z) <= eps:
        return None, z
    return problem.f1(z) - eps, None
