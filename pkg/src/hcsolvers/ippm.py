"""Inexact proximal point method over hidden-convex problems.

Each outer iteration builds the proximal subproblem

    phi1(x) = F1(x) + (rho_hat/2) ||x - x_k||^2
    phi2(x) = F2(x) + (rho_hat/2) ||x - x_k||^2     with   phi2 <= tau,

solves it approximately with a switching sub-gradient loop (non-smooth), the
accelerated constrained loop (smooth), or plain sub-gradient descent
(unconstrained mode), and recenters.  Constraint slack ``tau`` keeps every
subproblem strictly feasible through the hidden geometry, so no external
Slater point is needed.

Formula-derived iteration counts are pessimistic worst-case bounds; every
count is exposed as a config override and the benchmark configurations set
them explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .acgd import AcgdSchedule, acgd, choose_shift
from .core import (CallBudget, ConstrainedProblem, Oracle, SolveReport,
                   TraceRecord)
from .errors import (InfeasibleStartError, FeasibilityNotReachedError,
                     MissingMuHError, NonSmoothProblemError,
                     PreconditionViolatedError)
from .subgrad import InnerResult, descend_to_feasibility, projected_subgradient, swsg


class ProxSubproblem:
    """Counted oracles for one proximal recentering."""

    def __init__(self, problem: ConstrainedProblem, center: np.ndarray,
                 rho_hat: float):
        self.problem = problem
        self.center = np.asarray(center, dtype=float).copy()
        self.rho_hat = float(rho_hat)

    def _quad(self, x):
        d = x - self.center
        return 0.5 * self.rho_hat * float(d @ d)

    @property
    def phi1(self) -> Oracle:
        return Oracle(
            value=lambda x: self.problem.f1(x) + self._quad(x),
            subgrad=lambda x: self.problem.g1(x) + self.rho_hat * (x - self.center))

    @property
    def phi2(self) -> Oracle:
        return Oracle(
            value=lambda x: self.problem.f2(x) + self._quad(x),
            subgrad=lambda x: self.problem.g2(x) + self.rho_hat * (x - self.center))

    # Uncounted access for measurement and grid comparisons.
    def peek_phi1(self, x):
        return self.problem.peek_f1(x) + self._quad(x)

    def peek_phi2(self, x):
        return self.problem.peek_f2(x) + self._quad(x)

    def phi1_batch(self, pts):
        q = 0.5 * self.rho_hat * np.sum((pts - self.center) ** 2, axis=1)
        return self.problem.f1_batch(pts) + q

    def phi2_batch(self, pts):
        q = 0.5 * self.rho_hat * np.sum((pts - self.center) ** 2, axis=1)
        return self.problem.f2_batch(pts) + q

    def as_grid_view(self):
        """Uncounted problem-like view for the grid oracle."""
        sub = self

        class _View:
            domain = sub.problem.domain
            f1_batch = staticmethod(sub.phi1_batch
                                    if sub.problem.f1_batch else None)
            f2_batch = staticmethod(sub.phi2_batch
                                    if sub.problem.f2_batch else None)
            peek_f1 = staticmethod(sub.peek_phi1)
            peek_f2 = staticmethod(sub.peek_phi2)

        return _View()


def build_prox_subproblem(problem, center, rho_hat) -> ProxSubproblem:
    return ProxSubproblem(problem, center, rho_hat)


@dataclass
class IppmConfig:
    rho_hat: float
    tau: float
    eps: float
    n_outer: int
    t_in: int
    inner: str = "swsg"              # "swsg" | "acgd" | "sm"
    alpha: float = 0.0
    eps_in: float = 0.0
    mu_strong: Optional[float] = None
    stepsize: Optional[Callable[[int], float]] = None
    schedule: Optional[AcgdSchedule] = None
    shift_b: Optional[float] = None
    budget: Optional[int] = None
    acgd_output: str = "average"
    penalty_lambda: float = 1.0
    formula_n_outer: Optional[int] = None
    formula_t_in: Optional[int] = None

    def with_overrides(self, **kw) -> "IppmConfig":
        return replace(self, **kw)


def _delta0(meta) -> float:
    if meta.f1_upper is not None and meta.f1_lower is not None:
        return max(meta.f1_upper - meta.f1_lower, 1e-12)
    return 1.0


def _check_ranges(meta, rho_hat, eps, tau):
    cap_eps = 3.0 * rho_hat * meta.d_u ** 2 / (2.0 * meta.mu_c ** 2)
    cap_tau = rho_hat * meta.d_u ** 2 / (2.0 * meta.mu_c ** 2)
    if eps > cap_eps or tau > cap_tau:
        raise PreconditionViolatedError(
            f"schedule valid for eps <= {cap_eps:.3g}, tau <= {cap_tau:.3g}")


def schedule_nonsmooth(meta, eps: float, tau: float) -> IppmConfig:
    """Switching-inner schedule: rho_hat = 2 rho, contraction coefficient
    alpha = min{1, 2 mu_c^2 eps / (3 rho_hat D_U^2), mu_c^2 tau /
    (rho_hat D_U^2)}, inner target eps_in = (alpha/3) min{eps, tau}."""
    rho_hat = 2.0 * meta.rho
    _check_ranges(meta, rho_hat, eps, tau)
    d2 = meta.d_u ** 2
    mc2 = meta.mu_c ** 2
    alpha = min(1.0, 2.0 * mc2 * eps / (3.0 * rho_hat * d2),
                mc2 * tau / (rho_hat * d2))
    eps_in = (alpha / 3.0) * min(eps, tau)
    n_outer = int(math.ceil(
        max(3.0 * meta.rho * d2 / (mc2 * eps), 2.0 * meta.rho * d2 / (mc2 * tau))
        * math.log(max(3.0 * _delta0(meta) / eps, math.e))))
    m = min(eps, tau)
    g2 = (meta.g_bound or 1.0) ** 2
    f2_low = meta.f2_lower if meta.f2_lower is not None else 0.0
    d_x = meta.d_x_bound()
    t_in = int(math.ceil(max(
        216.0 * (3.0 * g2 - 4.0 * meta.rho * f2_low) * d2 / (mc2 * m * m),
        51.0 * meta.rho * d_x * meta.d_u / (meta.mu_c * m))))
    return IppmConfig(rho_hat=rho_hat, tau=tau, eps=eps, n_outer=n_outer,
                      t_in=t_in, inner="swsg", alpha=alpha, eps_in=eps_in,
                      mu_strong=rho_hat - meta.rho,
                      formula_n_outer=n_outer, formula_t_in=t_in)


def schedule_smooth(meta, eps: float, tau: float) -> IppmConfig:
    """Accelerated-inner schedule for smooth problems (shared alpha/eps_in
    with the non-smooth schedule; linear inner rate through kappa)."""
    if meta.l_smooth is None:
        raise NonSmoothProblemError("accelerated schedule needs l_smooth")
    base = schedule_nonsmooth(meta, eps, tau)
    rho_hat = base.rho_hat
    sched = AcgdSchedule.strongly_convex(meta.l_smooth, rho_hat, meta.rho)
    kappa = (meta.l_smooth + rho_hat) / (rho_hat - meta.rho)
    d_x = meta.d_x_bound()
    gap0 = 0.5 * rho_hat * d_x ** 2 + _delta0(meta)
    t_in = int(math.ceil(math.sqrt(kappa)
                         * math.log(max(gap0 / max(base.eps_in, 1e-16), math.e))))
    return base.with_overrides(inner="acgd", t_in=t_in, schedule=sched,
                               shift_b=choose_shift(tau, base.alpha),
                               formula_t_in=t_in)


def schedule_smooth_slater(meta, eps: float, tau: float, slater_theta: float
                           ) -> IppmConfig:
    """Variant using a theta-strictly-feasible start: margin coefficient
    beta = min{1, mu_c^2 theta / (rho_hat D_U^2)} and shift -tau +
    beta*theta/3."""
    cfg = schedule_smooth(meta, eps, tau)
    beta = min(1.0, meta.mu_c ** 2 * slater_theta / (cfg.rho_hat * meta.d_u ** 2))
    eps_in = min(cfg.alpha * eps, beta * slater_theta) / 3.0
    return cfg.with_overrides(
        eps_in=eps_in,
        shift_b=choose_shift(tau, cfg.alpha, slater_theta=slater_theta,
                             slater_beta=beta))


def schedule_hsc(meta, eps: float) -> IppmConfig:
    """Hidden strong convexity: contraction alpha = mu_c^2 mu_h /
    (rho_hat + mu_c^2 mu_h) and a logarithmic outer count."""
    if meta.mu_h is None:
        raise MissingMuHError("schedule_hsc needs the hidden modulus mu_h")
    rho_hat = 2.0 * meta.rho
    mterm = meta.mu_c ** 2 * meta.mu_h
    alpha = mterm / (rho_hat + mterm)
    eps_in = alpha * eps / 2.0
    n_outer = int(math.ceil((rho_hat + mterm) / mterm
                            * math.log(max(2.0 * _delta0(meta) / eps, math.e))))
    g2 = (meta.g_bound or 1.0) ** 2
    t_in = int(math.ceil(max(4.0 * g2 / ((rho_hat - meta.rho) * eps_in), 16.0)))
    return IppmConfig(rho_hat=rho_hat, tau=math.inf, eps=eps, n_outer=n_outer,
                      t_in=t_in, inner="sm", alpha=alpha, eps_in=eps_in,
                      mu_strong=rho_hat - meta.rho,
                      formula_n_outer=n_outer, formula_t_in=t_in)


def init_feasible(problem: ConstrainedProblem, x0, tau: float,
                  max_steps: int = 20000,
                  stepsize: Optional[Callable[[int], float]] = None,
                  budget: Optional[CallBudget] = None) -> np.ndarray:
    """Projected sub-gradient descent on F2 until F2 <= tau."""
    box = problem.domain
    if stepsize is None:
        g = problem.meta.g_bound if problem.meta and problem.meta.g_bound else 1.0
        d_x = box.diameter()
        stepsize = lambda t: d_x / (g * math.sqrt(t + 1.0))
    x, ok, _ = descend_to_feasibility(problem.f2, problem.g2, box,
                                      np.asarray(x0, dtype=float), tau,
                                      max_steps, stepsize, budget=budget)
    if not ok:
        raise FeasibilityNotReachedError(
            f"F2 did not reach {tau} within {max_steps} steps")
    return x


def ippm_run(problem: ConstrainedProblem, x0, cfg: IppmConfig) -> SolveReport:
    """Outer proximal-point loop.  Requires F2(x0) <= tau (checked, one
    counted call).  Returns the last outer iterate with a per-outer trace."""
    box = problem.domain
    x = np.asarray(x0, dtype=float).copy()
    budget = CallBudget(problem.counter, cfg.budget)
    constrained = cfg.inner != "sm"
    if constrained:
        if problem.f2(x) > cfg.tau + 1e-12:
            raise InfeasibleStartError(
                f"starting point violates F2 <= tau = {cfg.tau}")
    lam = cfg.penalty_lambda
    trace = [_record(problem, x, lam, kind="outer")]
    outer_points = [x.copy()]
    inner_reports = []
    for _k in range(cfg.n_outer):
        if budget.exhausted(upcoming=2):
            break
        sub = build_prox_subproblem(problem, x, cfg.rho_hat)
        if cfg.inner == "swsg":
            mu = cfg.mu_strong
            if mu is None:
                mu = cfg.rho_hat - (problem.meta.rho if problem.meta else 0.0)
            res = swsg(sub.phi1, sub.phi2, x, box, cfg.t_in, cfg.tau,
                       cfg.alpha, cfg.eps_in, mu, stepsize=cfg.stepsize,
                       budget=budget)
        elif cfg.inner == "acgd":
            shift = cfg.shift_b
            if shift is None:
                shift = choose_shift(cfg.tau, cfg.alpha)
            res = acgd(sub.phi1, sub.phi2, x, box, cfg.t_in, shift,
                       cfg.schedule, budget=budget, output=cfg.acgd_output)
        elif cfg.inner == "sm":
            mu = cfg.mu_strong or cfg.rho_hat
            step = cfg.stepsize or (lambda t: 2.0 / (mu * (t + 2)))
            res = projected_subgradient(sub.phi1, box, x, cfg.t_in, step,
                                        budget=budget)
        else:
            raise ValueError(f"unknown inner solver {cfg.inner!r}")
        if res.steps == 0:
            break
        x = res.x
        outer_points.append(x.copy())
        inner_reports.append(res)
        trace.append(_record(problem, x, lam, kind="outer"))
    return SolveReport(
        method=f"ippm-{cfg.inner}", problem=problem.name, x_final=x,
        f1_final=problem.peek_f1(x), f2_final=problem.peek_f2(x),
        oracle_calls_total=problem.counter.total, trace=trace,
        params={"rho_hat": cfg.rho_hat, "tau": cfg.tau, "eps": cfg.eps,
                "alpha": cfg.alpha, "eps_in": cfg.eps_in,
                "n_outer": cfg.n_outer, "t_in": cfg.t_in, "inner": cfg.inner},
        extras={"outer_points": outer_points, "inner_reports": inner_reports})


def _record(problem, x, lam, kind, eta=None):
    f1 = problem.peek_f1(x)
    f2 = problem.peek_f2(x)
    return TraceRecord(oracle_calls=problem.counter.total, f1=f1, f2=f2,
                       penalty=f1 + lam * max(f2, 0.0), eta=eta,
                       iter_kind=kind)
