"""Problem containers, oracle accounting, and shared bookkeeping.

A :class:`ConstrainedProblem` bundles first-order oracles for an objective
``F1`` and a single inequality constraint ``F2 <= 0`` over a box, together
with an :class:`OracleCounter` through which every solver-visible evaluation
is routed.  Problems with an invertible reparameterization ``u = c(x)`` that
makes both functions convex in ``u`` additionally carry a :class:`HiddenMap`
and a :class:`HiddenConvexMeta` of certified constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .errors import DimensionMismatchError
from .geometry import BoxSet


class OracleCounter:
    """Counts first-order oracle calls: one call = one value or one
    sub-gradient evaluation of F1 or F2."""

    __slots__ = ("f1_values", "f1_subgrads", "f2_values", "f2_subgrads")

    def __init__(self):
        self.reset()

    def reset(self):
        self.f1_values = 0
        self.f1_subgrads = 0
        self.f2_values = 0
        self.f2_subgrads = 0

    @property
    def total(self) -> int:
        return self.f1_values + self.f1_subgrads + self.f2_values + self.f2_subgrads

    def snapshot(self) -> Dict[str, int]:
        return {
            "f1_values": self.f1_values,
            "f1_subgrads": self.f1_subgrads,
            "f2_values": self.f2_values,
            "f2_subgrads": self.f2_subgrads,
            "total": self.total,
        }


@dataclass
class HiddenConvexMeta:
    """Certified constants of a hidden-convex instance.

    mu_c   -- inverse-map modulus: ||c(x) - c(y)|| >= mu_c * ||x - y||
    d_u    -- diameter of the image set U = c(X)
    rho    -- weak-convexity modulus of F1 and F2
    g_bound -- uniform bound on sub-gradient norms (None if not certified)
    l_smooth -- gradient Lipschitz constant (None for non-smooth problems)
    mu_h   -- strong-convexity modulus of the hidden objective (None if absent)
    f1_lower / f1_upper -- bounds on F1 over the box
    f2_lower -- lower bound on F2 over the box (None if unknown)
    """

    mu_c: float
    d_u: float
    rho: float
    g_bound: Optional[float] = None
    l_smooth: Optional[float] = None
    mu_h: Optional[float] = None
    f1_lower: Optional[float] = None
    f1_upper: Optional[float] = None
    f2_lower: Optional[float] = None

    def d_x_bound(self) -> float:
        """Diameter bound on the box induced by the hidden geometry."""
        return self.d_u / self.mu_c


@dataclass
class HiddenMap:
    """Invertible reparameterization ``u = c(x)`` with convex hidden images.

    ``interpolate(x, y, alpha)`` returns the hidden-segment point
    ``c^{-1}((1 - alpha) c(x) + alpha c(y))``, the curve along which both
    F1 and F2 satisfy the convex-combination inequality.
    """

    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    u_box: Optional[BoxSet] = None
    h1_value: Optional[Callable[[np.ndarray], float]] = None
    h2_value: Optional[Callable[[np.ndarray], float]] = None

    def interpolate(self, x: np.ndarray, y: np.ndarray, alpha: float) -> np.ndarray:
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        ux = self.forward(np.asarray(x, dtype=float))
        uy = self.forward(np.asarray(y, dtype=float))
        return self.inverse((1.0 - alpha) * ux + alpha * uy)


class ConstrainedProblem:
    """F1/F2 first-order oracles over a box, with counted access.

    ``f1/g1/f2/g2`` increment the attached counter; ``peek_f1/peek_f2`` do
    not and exist only for measurement (traces, tests).  Optional vectorized
    evaluators ``f1_batch/f2_batch`` (rows = points) back the grid oracle and
    are likewise uncounted unless the caller accounts for them explicitly.
    """

    def __init__(self, name, domain, f1_value, f1_subgrad, f2_value, f2_subgrad,
                 smooth=False, meta=None, hidden_map=None,
                 f1_batch=None, f2_batch=None, x_star=None, f1_star=None,
                 lambda_star=None):
        self.name = name
        self.domain = domain
        self.smooth = smooth
        self.meta: Optional[HiddenConvexMeta] = meta
        self.hidden_map: Optional[HiddenMap] = hidden_map
        self.counter = OracleCounter()
        self._f1 = f1_value
        self._g1 = f1_subgrad
        self._f2 = f2_value
        self._g2 = f2_subgrad
        self.f1_batch = f1_batch
        self.f2_batch = f2_batch
        self.x_star = None if x_star is None else np.asarray(x_star, dtype=float)
        self.f1_star = f1_star
        self.lambda_star = lambda_star

    @property
    def dim(self) -> int:
        return self.domain.dim

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatchError(
                f"expected point of shape ({self.dim},), got {x.shape}")
        return x

    def f1(self, x) -> float:
        self.counter.f1_values += 1
        return float(self._f1(self._check(x)))

    def g1(self, x) -> np.ndarray:
        self.counter.f1_subgrads += 1
        return np.asarray(self._g1(self._check(x)), dtype=float)

    def f2(self, x) -> float:
        self.counter.f2_values += 1
        return float(self._f2(self._check(x)))

    def g2(self, x) -> np.ndarray:
        self.counter.f2_subgrads += 1
        return np.asarray(self._g2(self._check(x)), dtype=float)

    def peek_f1(self, x) -> float:
        return float(self._f1(self._check(x)))

    def peek_f2(self, x) -> float:
        return float(self._f2(self._check(x)))


@dataclass
class TraceRecord:
    oracle_calls: int
    f1: float
    f2: float
    penalty: float
    eta: Optional[float] = None
    iter_kind: str = "outer"

    def as_row(self):
        eta = "" if self.eta is None else f"{self.eta:.12g}"
        return [str(self.oracle_calls), f"{self.f1:.12g}", f"{self.f2:.12g}",
                f"{self.penalty:.12g}", eta, self.iter_kind]


@dataclass
class SolveReport:
    method: str
    problem: str
    x_final: np.ndarray
    f1_final: float
    f2_final: float
    oracle_calls_total: int
    trace: List[TraceRecord] = field(default_factory=list)
    params: Dict[str, Any] = field(default_factory=dict)
    extras: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Oracle:
    """A (value, sub-gradient) pair; calls are counted by whoever built it."""

    value: Callable[[np.ndarray], float]
    subgrad: Callable[[np.ndarray], np.ndarray]


class CallBudget:
    """Hard cap on counted oracle calls shared by nested solver loops."""

    def __init__(self, counter: OracleCounter, cap: Optional[int]):
        self.counter = counter
        self.cap = cap

    def exhausted(self, upcoming: int = 0) -> bool:
        return self.cap is not None and self.counter.total + upcoming > self.cap


def exact_penalty(problem: ConstrainedProblem, x, lam: float) -> float:
    """F1(x) + lam * max(F2(x), 0); two counted value calls."""
    if lam < 0:
        raise ValueError("penalty weight must be nonnegative")
    return problem.f1(x) + lam * max(problem.f2(x), 0.0)


def value_function_v(problem: ConstrainedProblem, x, eta: float) -> float:
    """Level-set merit max{F1(x) - eta, F2(x)}; two counted value calls."""
    return max(problem.f1(x) - eta, problem.f2(x))
