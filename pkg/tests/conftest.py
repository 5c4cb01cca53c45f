"""Shared test helpers: independent oracles used to cross-check the solvers."""
import itertools

import numpy as np
import pytest

from hcsolvers.geometry import BoxSet, Halfspace


def enum_project(box, y, halfspaces, tol=1e-9):
    """Projection onto box + halfspaces by exhaustive active-set enumeration.

    Enumerates every combination of active box faces (lower/upper/free per
    coordinate) and active halfspaces, solves the equality-constrained
    least-squares candidate for each pattern, and returns the feasible
    candidate closest to ``y``.  Exponential in the dimension, so only usable
    for small ``dim`` (or with a box so large that no face can be active).
    Returns ``None`` when no candidate is feasible.
    """
    y = np.asarray(y, dtype=float)
    d = y.size
    lo, hi = box.lower, box.upper
    # Treat coordinates with enormous bounds as never-active to keep the
    # enumeration tractable in higher dimension.
    face_options = []
    for i in range(d):
        opts = [None]
        if hi[i] - lo[i] < 1e5:
            opts += [lo[i], hi[i]]
        face_options.append(opts)

    best, best_d2 = None, np.inf
    hs_patterns = []
    for r in range(len(halfspaces) + 1):
        hs_patterns.extend(itertools.combinations(range(len(halfspaces)), r))

    for faces in itertools.product(*face_options):
        fixed = [i for i in range(d) if faces[i] is not None]
        free = [i for i in range(d) if faces[i] is None]
        x_fixed = np.array([faces[i] for i in fixed], dtype=float)
        for active in hs_patterns:
            x = np.empty(d)
            x[fixed] = x_fixed
            if not free:
                x_free = np.zeros(0)
            elif not active:
                x_free = y[free]
                x[free] = x_free
            else:
                G = np.array([halfspaces[j].normal for j in active], dtype=float)
                b = np.array([halfspaces[j].offset for j in active], dtype=float)
                Gf = G[:, free]
                rhs = Gf @ y[free] - (b - (G[:, fixed] @ x_fixed if fixed else 0.0))
                M = 0.5 * Gf @ Gf.T
                lam, *_ = np.linalg.lstsq(M, rhs, rcond=None)
                if not np.all(np.isfinite(lam)):
                    continue
                x_free = y[free] - 0.5 * Gf.T @ lam
                x[free] = x_free
            if free:
                x[free] = x_free
            if np.any(x < lo - tol) or np.any(x > hi + tol):
                continue
            if any(h.normal @ x > h.offset + tol for h in halfspaces):
                continue
            d2 = float(np.sum((x - y) ** 2))
            if d2 < best_d2 - 1e-15:
                best, best_d2 = x.copy(), d2
    return best


def random_projection_instance(rng, dim, n_cuts, box_half=None):
    """A random box + halfspace instance guaranteed to be feasible.

    Both halfspaces are anchored to pass on the feasible side of a random
    interior point, so the intersection is nonempty by construction.
    """
    if box_half is None:
        lo = -1.0 - 3.0 * rng.random(dim)
        hi = 1.0 + 3.0 * rng.random(dim)
    else:
        lo = np.full(dim, -box_half)
        hi = np.full(dim, box_half)
    box = BoxSet(lo, hi)
    anchor = lo + (hi - lo) * rng.random(dim)
    if box_half is not None:
        # keep the action near the origin so huge-box faces never activate
        anchor = rng.standard_normal(dim)
    halfspaces = []
    for _ in range(n_cuts):
        g = rng.standard_normal(dim)
        margin = 0.5 * rng.random()
        halfspaces.append(Halfspace(g, float(g @ anchor) + margin))
    y = anchor + 2.5 * rng.standard_normal(dim)
    return box, y, halfspaces


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260826)
