"""Accelerated constrained gradient descent for smooth proximal subproblems.

Each iteration extrapolates, averages toward a prediction point, takes the
two gradients there, and solves a small QP: the projection of a gradient
step onto the box intersected with the linearized, shifted constraint.  The
output is an omega-weighted average of the QP solutions.

With the strongly convex schedule (condition number
``kappa = (L + rho_hat) / (rho_hat - rho)``) the loop contracts linearly.
Setting ``theta = tau_t = 0`` and ``omega = 1`` reduces one iteration to a
single projected-gradient step with a linearized constraint, which is the
degenerate case used by the unit tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import CallBudget, Oracle
from .errors import PreconditionViolatedError
from .geometry import BoxSet, solve_acgd_qp
from .subgrad import InnerResult


@dataclass
class AcgdSchedule:
    """Per-iteration coefficients, indexed from t = 1.

    ``omega_ratio(t)`` is omega_t / omega_{t-1} (>= 1); the average is kept
    in normalized form so geometrically growing weights never overflow.
    """

    theta: Callable[[int], float]
    tau: Callable[[int], float]
    eta: Callable[[int], float]
    omega_ratio: Callable[[int], float]

    @staticmethod
    def strongly_convex(l_smooth: float, rho_hat: float, rho: float
                        ) -> "AcgdSchedule":
        if rho_hat <= rho:
            raise PreconditionViolatedError(
                "strongly convex schedule needs rho_hat > rho")
        kappa = (l_smooth + rho_hat) / (rho_hat - rho)
        sq = math.sqrt(max(kappa, 1.0))
        theta = (sq - 1.0) / (sq + 1.0)
        tau_t = 1.0 / (sq - 1.0) if sq > 1.0 else 0.0
        eta = (l_smooth + rho_hat) / sq
        ratio = 1.0 / (1.0 - 1.0 / sq) if sq > 1.0 else 1.0
        return AcgdSchedule(theta=lambda t: theta, tau=lambda t: tau_t,
                            eta=lambda t: eta, omega_ratio=lambda t: ratio)

    @staticmethod
    def degenerate(eta: float) -> "AcgdSchedule":
        return AcgdSchedule(theta=lambda t: 0.0, tau=lambda t: 0.0,
                            eta=lambda t: eta, omega_ratio=lambda t: 1.0)


def choose_shift(tau: float, alpha: float, slater_theta: Optional[float] = None,
                 slater_beta: Optional[float] = None) -> float:
    """Additive constraint shift b so the loop enforces phi2 + b <= 0.

    Without an external strictly feasible point: b = -tau + alpha*tau/3.
    With a theta-Slater point and margin coefficient beta: b = -tau +
    beta*theta/3.
    """
    if slater_theta is not None:
        if slater_beta is None:
            raise ValueError("slater_beta required with slater_theta")
        return -tau + slater_beta * slater_theta / 3.0
    return -tau + alpha * tau / 3.0


def acgd(phi1: Oracle, phi2: Oracle, x_k: np.ndarray, box: BoxSet,
         t_in: int, shift_b: float, schedule: AcgdSchedule,
         budget: Optional[CallBudget] = None, qp_tol: float = 1e-9,
         output: str = "average") -> InnerResult:
    """Run ``t_in`` accelerated iterations from ``x_k``.

    Each iteration consumes three oracle calls: one shifted constraint value
    at the prediction point and the two gradients there.  ``output`` selects
    the omega-weighted average (the analyzed choice) or the last QP solution
    (useful under very tight budgets).
    """
    z_prev2 = np.asarray(x_k, dtype=float).copy()
    z_prev = z_prev2.copy()
    z_bar = z_prev2.copy()
    x_avg = z_prev2.copy()
    s = 0.0  # normalized weight mass W_t / omega_t
    t_done = 0
    for t in range(1, t_in + 1):
        if budget is not None and budget.exhausted(upcoming=3):
            break
        # Clamp the extrapolation so oracles are only queried inside the box
        # (posynomial oracles are undefined for non-positive coordinates).
        z_tilde = box.project(z_prev + schedule.theta(t) * (z_prev - z_prev2))
        tau_t = schedule.tau(t)
        z_bar = (tau_t * z_bar + z_tilde) / (1.0 + tau_t)
        c0 = phi2.value(z_bar) + shift_b
        pi = phi1.subgrad(z_bar)
        nu = phi2.subgrad(z_bar)
        x_new = solve_acgd_qp(box, z_prev, pi, schedule.eta(t), nu, c0, z_bar,
                              tol=qp_tol)
        z_prev2, z_prev = z_prev, x_new
        s = s / schedule.omega_ratio(t) + 1.0
        x_avg = x_avg + (1.0 / s) * (z_prev - x_avg) if t > 1 else z_prev.copy()
        t_done = t
    x_out = z_prev if output == "last" else x_avg
    return InnerResult(x=x_out, steps=t_done)
