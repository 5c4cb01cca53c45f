"""Bundle-level methods: cuts, level recursion, safety invariants."""
import numpy as np
import pytest

import hcsolvers as hc
from hcsolvers import bundle
from hcsolvers.core import CallBudget
from hcsolvers.errors import QpInfeasibleError
from hcsolvers.geometry import BoxSet


def test_linear_minorant_halfspace_algebra():
    # f(x) + g.(z - y) <= rhs  <=>  g.z <= rhs - f + g.y
    g = np.array([2.0, -1.0])
    y = np.array([0.5, 0.5])
    h = bundle.linear_minorant(3.0, g, y, 4.5)
    np.testing.assert_allclose(h.normal, g)
    assert h.offset == pytest.approx(4.5 - 3.0 + float(g @ y))
    # the anchor point satisfies the cut iff f(y) <= rhs
    assert float(h.normal @ y) <= h.offset + 1e-12


def test_sbl_step_cut_levels_and_cost():
    p = hc.make_cgp2d()
    x = np.array([1.0, 1.0])
    eta, alpha, beta, lam, tau = 4.0, 0.3, 0.5, 2.0, 0.1
    f1, f2 = p.peek_f1(x), p.peek_f2(x)
    x_next, f1_t, f2_t = bundle.sbl_step(p, x, eta, alpha, beta, lam, tau)
    assert p.counter.total == 4
    assert (f1_t, f2_t) == (pytest.approx(f1), pytest.approx(f2))
    # the step lands inside both shifted cuts (linearized levels)
    g1, g2 = p.g1(x), p.g2(x)
    lvl1 = ((1 - alpha * beta) * f1 + alpha * beta * eta
            + (1 - beta) * alpha * lam * max(f2, 0.0) + tau)
    lvl2 = (1 - alpha) * f2 + tau
    assert f1 + g1 @ (x_next - x) <= lvl1 + 1e-8
    assert f2 + g2 @ (x_next - x) <= lvl2 + 1e-8


def test_sbl_step_beta_one_ignores_penalty_term():
    # with beta = 1 the objective cut level is (1-alpha) F1 + alpha eta + tau
    p = hc.make_cgp2d()
    x = np.array([1.2, 0.9])
    f1 = p.peek_f1(x)
    g1 = p.g1(x)
    x_next, _, _ = bundle.sbl_step(p, x, eta=5.0, alpha=0.4, beta=1.0,
                                   lam=99.0, tau=0.0)
    lvl = 0.6 * f1 + 0.4 * 5.0
    assert f1 + g1 @ (x_next - x) <= lvl + 1e-8


def test_sbl_step_raises_on_empty_cut_intersection():
    # an absurdly low level makes the objective cut miss the box entirely
    p = hc.make_cos1d()
    with pytest.raises(QpInfeasibleError):
        bundle.sbl_step(p, np.array([0.891]), eta=-1e6, alpha=1.0,
                        beta=1.0, lam=0.0, tau=0.0)


def test_eta_state_recursion():
    st = bundle.EtaState(eta=1.0)
    beta, pen = 0.4, 2.5
    new = st.update(beta, pen)
    assert new == pytest.approx((1 - beta) * (1.0 + pen) - (1 - 2 * beta) * 1.0)
    assert st.eta == new
    assert st.history == [(1.0, 2.5)]


def test_s_star_bl_converges_on_smooth_program():
    p = hc.make_cgp2d()
    rep = bundle.s_star_bl(p, np.array([1.0, 1.0]), p.f1_star, t_steps=600,
                           alpha=0.3, tau=1e-6)
    assert abs(rep.f1_final - 5.0) <= 1e-2
    assert rep.f2_final <= 1e-2
    assert rep.oracle_calls_total == p.counter.total
    assert rep.oracle_calls_total % 4 == 0


def test_s_star_bl_stop_level_terminates_early():
    p = hc.make_cgp2d()
    rep = bundle.s_star_bl(p, np.array([1.0, 1.0]), p.f1_star, t_steps=600,
                           alpha=0.3, tau=1e-6, stop_level=0.5)
    full = bundle.s_star_bl(hc.make_cgp2d(), np.array([1.0, 1.0]), 5.0,
                            t_steps=600, alpha=0.3, tau=1e-6)
    assert rep.oracle_calls_total < full.oracle_calls_total
    assert max(rep.f1_final - 5.0, rep.f2_final) <= 0.5 + 1e-9


def test_s_star_bl_respects_budget():
    p = hc.make_cgp2d()
    rep = bundle.s_star_bl(p, np.array([1.0, 1.0]), p.f1_star, t_steps=10000,
                           alpha=0.3, tau=1e-6, budget=100)
    assert rep.oracle_calls_total <= 100


def test_s_bl_epoch_truncates_on_infeasible_level():
    p = hc.make_cos1d()
    best_x, best_pen, trace, truncated = bundle.s_bl(
        p, np.array([0.891]), eta=-1e6, t_steps=50, alpha=1.0, beta=1.0,
        lam=0.0, tau=0.0)
    assert truncated
    assert len(trace) == 0 or len(trace) < 50


def test_ada_ls_levels_never_exceed_optimum():
    # starting from a valid lower bound, every level in the recursion stays
    # below the true optimal value while the gap closes
    p = hc.make_cgp2d()
    rep = bundle.ada_ls(p, np.array([1.0, 1.0]), eta0=0.0, eps=1e-2, lam=1.0,
                        beta=0.5, alpha=0.3, t_steps=120, n_epochs=14,
                        tau=1e-6)
    levels = [h[0] for h in rep.extras["eta_history"]]
    assert all(lv <= p.f1_star + 1e-12 for lv in levels)
    assert levels == sorted(levels)  # the level sequence is nondecreasing
    assert abs(rep.f1_final - 5.0) <= 1e-2
    assert rep.f2_final <= 1e-2


def test_init_lower_bound_paths():
    p = hc.make_cgp2d()
    eta0, sol = bundle.init_lower_bound(p, eps=1e-2)
    assert sol is None
    # F1(z) - eps lower-bounds the constrained optimum
    assert eta0 <= p.f1_star + 1e-9
    assert eta0 >= p.meta.f1_lower - 1e-2 - 1e-9  # F1(z) - eps at the box min
    # when the unconstrained minimizer is already feasible there is nothing
    # to do and the point itself is returned
    q = hc.make_cos1d()
    eta0b, solb = bundle.init_lower_bound(q, eps=1e-2)
    assert solb is not None
    assert q.peek_f2(np.asarray(solb)) <= 1e-2
