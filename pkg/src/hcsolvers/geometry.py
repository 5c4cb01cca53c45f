"""Box and box-plus-halfspace projections used by every solver.

The workhorse is :func:`project_box_halfspaces`, the Euclidean projection of a
point onto the intersection of a coordinate box with at most two halfspaces.
It is solved through the two-variable concave dual: for multipliers
``lam >= 0`` the inner minimizer is the box clamp of
``y - 0.5 * (lam[0] * g0 + lam[1] * g1)``, and the dual gradient is the
constraint violation at that clamp.  The dual is maximized by monotone
bisection (a nested bisection when both cuts are active), warm-started at
``lam = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InfeasibleError, QpInfeasibleError

# Multipliers above this level with remaining violation mean the primal
# intersection is (numerically) empty.
_LAMBDA_CAP = 1e12
_BISECT_ITERS = 96


@dataclass
class BoxSet:
    """Axis-aligned box ``{x : lower <= x <= upper}`` (entries may be +-inf)."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise DimensionMismatchError("box bounds must be 1-d arrays of equal length")
        if np.any(self.lower > self.upper):
            raise InfeasibleError("box has lower > upper in some coordinate")

    @property
    def dim(self) -> int:
        return self.lower.size

    def project(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != self.lower.shape:
            raise DimensionMismatchError(f"expected point of dim {self.dim}")
        return np.clip(y, self.lower, self.upper)

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)


@dataclass
class Halfspace:
    """Halfspace ``{x : <normal, x> <= offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        self.normal = np.asarray(self.normal, dtype=float)
        self.offset = float(self.offset)

    def violation(self, x: np.ndarray) -> float:
        return float(self.normal @ x - self.offset)


@dataclass
class ProjectionResult:
    point: np.ndarray
    multipliers: np.ndarray = field(default_factory=lambda: np.zeros(0))


def project_box(box: BoxSet, y: np.ndarray) -> np.ndarray:
    """Clamp ``y`` to the box (exact Euclidean projection)."""
    return box.project(y)


def _clamp_point(box, y, normals, lam):
    return np.clip(y - 0.5 * (lam @ normals), box.lower, box.upper)


def _violation(box, y, normals, offsets, lam, i):
    x = _clamp_point(box, y, normals, lam)
    return float(normals[i] @ x - offsets[i])


def _bisect_coord(box, y, normals, offsets, lam, i, tol_abs):
    """Maximize the dual over lam[i] >= 0 (others fixed).

    The dual derivative in lam[i] is the violation of constraint i at the
    clamped point, which is non-increasing in lam[i]; a sign change is
    bracketed by geometric growth and then bisected.  Returns the new lam[i]
    (capped at _LAMBDA_CAP when no bracket exists, i.e. the constraint cannot
    be satisfied by pushing on this multiplier alone).
    """
    lam = lam.copy()
    lam[i] = 0.0
    if _violation(box, y, normals, offsets, lam, i) <= 0.0:
        return 0.0
    hi = 1.0
    while True:
        lam[i] = hi
        if _violation(box, y, normals, offsets, lam, i) <= 0.0:
            break
        hi *= 4.0
        if hi > _LAMBDA_CAP:
            return _LAMBDA_CAP
    lo = 0.0 if hi == 1.0 else hi / 4.0
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        lam[i] = mid
        if _violation(box, y, normals, offsets, lam, i) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * (1.0 + hi):
            break
    return hi


def project_box_halfspaces(box, y, halfspaces, tol=1e-9, return_multipliers=False):
    """Euclidean projection of ``y`` onto ``box`` intersected with <=2 halfspaces.

    Raises :class:`InfeasibleError` when the intersection is empty (detected
    by multipliers exceeding 1e12 while a violation persists).

    Parameters
    ----------
    halfspaces : sequence of Halfspace (length 0, 1 or 2)
    tol : float
        Feasibility tolerance, applied relative to ``1 + ||y||``.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != box.lower.shape:
        raise DimensionMismatchError("point/box dimension mismatch")
    if len(halfspaces) > 2:
        raise ValueError("at most two halfspaces are supported")
    tol_abs = tol * (1.0 + float(np.linalg.norm(y)))

    kept = []
    for hs in halfspaces:
        if hs.normal.shape != y.shape:
            raise DimensionMismatchError("halfspace/point dimension mismatch")
        if np.linalg.norm(hs.normal) == 0.0:
            if hs.offset < -tol_abs:
                raise InfeasibleError("degenerate halfspace 0 <= b with b < 0")
            continue  # vacuous constraint
        kept.append(hs)

    x0 = box.project(y)
    if all(hs.violation(x0) <= tol_abs for hs in kept):
        out = ProjectionResult(x0, np.zeros(len(kept)))
        return (out.point, out.multipliers) if return_multipliers else out.point

    normals = np.array([hs.normal for hs in kept])
    offsets = np.array([hs.offset for hs in kept])
    m = len(kept)
    lam = np.zeros(m)

    if m == 1:
        lam[0] = _bisect_coord(box, y, normals, offsets, lam, 0, tol_abs)
    else:
        # Fast paths: one active cut often suffices.
        solo_best = None
        for i in (0, 1):
            trial = np.zeros(2)
            trial[i] = _bisect_coord(box, y, normals, offsets, trial, i, tol_abs)
            if trial[i] < _LAMBDA_CAP:
                xt = _clamp_point(box, y, normals, trial)
                j = 1 - i
                if float(normals[j] @ xt - offsets[j]) <= tol_abs:
                    solo_best = trial
                    break
        if solo_best is not None:
            lam = solo_best
        else:
            # Nested bisection: outer loop over lam[0], inner maximization over
            # lam[1].  The envelope derivative (violation of constraint 0 at
            # the inner optimum) is non-increasing in lam[0].
            def outer_h(l0):
                work = np.array([l0, 0.0])
                work[1] = _bisect_coord(box, y, normals, offsets, work, 1, tol_abs)
                return _violation(box, y, normals, offsets, work, 0), work[1]

            h0, l1 = outer_h(0.0)
            if h0 <= 0.0:
                lam = np.array([0.0, l1])
            else:
                hi = 1.0
                while True:
                    h, l1 = outer_h(hi)
                    if h <= 0.0:
                        break
                    hi *= 4.0
                    if hi > _LAMBDA_CAP:
                        hi = _LAMBDA_CAP
                        break
                lo = 0.0 if hi == 1.0 else min(hi / 4.0, hi)
                if hi >= _LAMBDA_CAP and outer_h(_LAMBDA_CAP)[0] > 0.0:
                    lam = np.array([_LAMBDA_CAP, outer_h(_LAMBDA_CAP)[1]])
                else:
                    for _ in range(_BISECT_ITERS):
                        mid = 0.5 * (lo + hi)
                        h, _l1 = outer_h(mid)
                        if h > 0.0:
                            lo = mid
                        else:
                            hi = mid
                        if hi - lo <= 1e-14 * (1.0 + hi):
                            break
                    lam = np.array([hi, outer_h(hi)[1]])

    x = _clamp_point(box, y, normals, lam)
    viol = np.array([float(normals[i] @ x - offsets[i]) for i in range(m)])
    check_tol = max(tol_abs, 1e-7 * (1.0 + float(np.abs(offsets).max(initial=0.0))))
    if np.any(viol > check_tol):
        if np.max(lam) >= 0.9 * _LAMBDA_CAP:
            raise InfeasibleError("box/halfspace intersection is empty")
        raise InfeasibleError(
            f"projection failed to reach feasibility (residual {viol.max():.3e})"
        )
    if return_multipliers:
        return x, lam
    return x


def kkt_residual(box, y, halfspaces, x, lam):
    """Max KKT residual of a candidate projection (stationarity via re-clamp,
    primal feasibility, complementarity).  Used by tests as a certificate."""
    kept = [hs for hs in halfspaces if np.linalg.norm(hs.normal) > 0.0]
    normals = np.array([hs.normal for hs in kept]) if kept else np.zeros((0, box.dim))
    lam = np.asarray(lam, dtype=float)
    x_re = np.clip(y - 0.5 * (lam @ normals) if kept else y, box.lower, box.upper)
    res = float(np.max(np.abs(x_re - x))) if x.size else 0.0
    for i, hs in enumerate(kept):
        v = hs.violation(x)
        res = max(res, v)
        res = max(res, abs(lam[i] * v))
    res = max(res, float(np.max(box.lower - x, initial=0.0)))
    res = max(res, float(np.max(x - box.upper, initial=0.0)))
    return res


def solve_acgd_qp(box, z_prev, pi, eta_t, nu, phi2_shifted_value, z_bar, tol=1e-9):
    """One accelerated-step QP: minimize <pi, x> + (eta_t/2)||x - z_prev||^2
    subject to the linearized shifted constraint and the box.

    Completing the square, this is the projection of ``z_prev - pi / eta_t``
    onto the box intersected with ``{x : <nu, x> <= <nu, z_bar> - c0}`` where
    ``c0 = phi2_shifted_value``.
    """
    z_prev = np.asarray(z_prev, dtype=float)
    pi = np.asarray(pi, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if eta_t <= 0.0:
        raise ValueError("eta_t must be positive")
    y = z_prev - pi / eta_t
    c0 = float(phi2_shifted_value)
    if np.linalg.norm(nu) == 0.0:
        if c0 > tol * (1.0 + abs(float(nu @ z_bar))):
            raise QpInfeasibleError("zero constraint gradient with positive value")
        return box.project(y)
    hs = Halfspace(nu, float(nu @ z_bar) - c0)
    try:
        return project_box_halfspaces(box, y, [hs], tol=tol)
    except InfeasibleError as exc:
        raise QpInfeasibleError(str(exc)) from exc
