"""Benchmark problem definitions: frozen values, RNG, grid oracle."""
import numpy as np
import pytest

import hcsolvers as hc
from hcsolvers.errors import NoFeasibleGridPointError
from hcsolvers.problems import (SplitMix64, equality_to_inequality,
                                grid_oracle, make_problem)


def test_splitmix64_frozen_stream():
    # first three uniforms of the portable generator, frozen once
    s = SplitMix64(42)
    got = [s.uniform() for _ in range(3)]
    np.testing.assert_allclose(
        got,
        [0.7415648787718233, 0.1599103928769201, 0.27860113025513866],
        rtol=0, atol=0)
    assert SplitMix64(42).normal() == pytest.approx(0.4147197504315305, abs=0)


def test_splitmix64_uniform_in_unit_interval():
    s = SplitMix64(7)
    xs = [s.uniform() for _ in range(2000)]
    assert min(xs) >= 0.0 and max(xs) < 1.0
    assert abs(np.mean(xs) - 0.5) < 0.05


def test_cnls_frozen_values():
    p = hc.make_cnls()
    cases = [
        ([0.85, 0.85], 0.15, 0.0),
        ([0.5, 0.5], 0.5, -0.7),
        ([2.5, -1.0], 5.0, 6.8),
        ([0.0, 0.0], 1.0, 0.1),
    ]
    for x, f1, f2 in cases:
        x = np.asarray(x, float)
        assert p.peek_f1(x) == pytest.approx(f1, abs=1e-12)
        assert p.peek_f2(x) == pytest.approx(f2, abs=1e-12)
    assert p.f1_star == pytest.approx(0.15)
    np.testing.assert_allclose(p.x_star, [0.85, 0.85])


def test_cgp2d_frozen_values():
    p = hc.make_cgp2d()
    x = np.array([2.0, 0.5])
    assert p.peek_f1(x) == pytest.approx(5.0, abs=1e-12)
    assert p.peek_f2(x) == pytest.approx(0.0, abs=1e-12)
    assert p.peek_f1(np.array([1.0, 1.0])) == pytest.approx(6.0)
    assert p.peek_f2(np.array([0.4, 0.4])) == pytest.approx(-0.84)
    assert p.f1_star == pytest.approx(5.0)
    # AM-GM: x1 x2 + 4/x1 + 1/x2 >= 3 (4)^(1/3), tight at the box-free min
    assert p.meta.f1_lower == pytest.approx(3.0 * 4.0 ** (1.0 / 3.0))
    assert p.lambda_star == pytest.approx(1.0)


def test_random_cgp_reproducible_and_normalized():
    a = hc.make_random_cgp(42)
    b = hc.make_random_cgp(42)
    x = np.full(100, 1.3)
    assert a.peek_f1(x) == b.peek_f1(x)
    np.testing.assert_allclose(a.g2(x), b.g2(x))
    # the constraint posynomial is normalized so that x = 1 is on the boundary
    assert a.peek_f2(np.ones(100)) == pytest.approx(0.0, abs=1e-12)
    c = hc.make_random_cgp(43)
    assert a.peek_f1(x) != c.peek_f1(x)


def test_random_cgp_dimensions_and_extras():
    p = hc.make_random_cgp(1, dim=12, k1=4, k2=3)
    assert p.dim == 12
    assert p.extras["a1"].shape == (4, 12)
    assert p.extras["b2"].shape == (3,)
    assert p.meta.rho > 0 and p.meta.l_smooth > 0


def test_hidden_contraction_lower_bound():
    # the hidden map expands distances by at least mu_c on every problem
    rng = np.random.default_rng(2)
    for p in (hc.make_cnls(), hc.make_cgp2d(), hc.make_random_cgp(42)):
        hm, mu = p.hidden_map, p.meta.mu_c
        lo, hi = p.domain.lower, p.domain.upper
        for _ in range(300):
            x = lo + (hi - lo) * rng.random(p.dim)
            y = lo + (hi - lo) * rng.random(p.dim)
            lhs = np.linalg.norm(hm.forward(x) - hm.forward(y))
            assert lhs >= mu * np.linalg.norm(x - y) - 1e-9


def test_hidden_images_inside_u_box():
    for p in (hc.make_cnls(), hc.make_cgp2d()):
        rng = np.random.default_rng(4)
        lo, hi = p.domain.lower, p.domain.upper
        ub = p.hidden_map.u_box
        us = [p.hidden_map.forward(lo + (hi - lo) * rng.random(p.dim))
              for _ in range(200)]
        for u in us:
            assert ub.contains(u)
        # d_u bounds the diameter of the image of the box (not of u_box,
        # which is a loose bounding rectangle)
        for u in us[:50]:
            for v in us[:50]:
                assert np.linalg.norm(u - v) <= p.meta.d_u + 1e-9


def test_grid_oracle_finds_documented_optima():
    xg, fg = grid_oracle(hc.make_cgp2d(), 2e-3)
    np.testing.assert_allclose(xg, [2.0, 0.5], atol=4e-3)
    assert fg == pytest.approx(5.0, abs=2e-2)
    xg, fg = grid_oracle(hc.make_cnls(), 2e-3)
    assert fg == pytest.approx(0.15, abs=1e-2)


def test_grid_oracle_respects_slack_and_raises_when_empty():
    p = hc.make_cgp2d()
    _, f_tight = grid_oracle(p, 1e-2, constraint_slack=0.0)
    _, f_loose = grid_oracle(p, 1e-2, constraint_slack=0.5)
    assert f_loose <= f_tight + 1e-12
    with pytest.raises(NoFeasibleGridPointError):
        grid_oracle(p, 1e-2, constraint_slack=-10.0)


def test_grid_oracle_counting_modes():
    p = hc.make_cgp2d()
    grid_oracle(p, 0.2, count=False)
    assert p.counter.total == 0
    grid_oracle(p, 0.2, count=True)
    assert p.counter.total > 0


def test_equality_to_inequality_max_abs_form():
    f, g = equality_to_inequality([
        (lambda x: x[0] - 1.0, lambda x: np.array([1.0, 0.0])),
        (lambda x: x[1], lambda x: np.array([0.0, 1.0])),
    ])
    x = np.array([2.0, -3.0])
    assert f(x) == pytest.approx(3.0)          # max(|1|, |-3|)
    np.testing.assert_allclose(g(x), [0.0, -1.0])  # sign(-3) * grad of x2
    # tie at the solution: subgradient of the first maximizer, sign(0) -> 0
    assert f(np.array([1.0, 0.0])) == pytest.approx(0.0)


def test_make_problem_dispatch():
    assert make_problem("cnls").name == "cnls"
    assert make_problem("cgp2d").name == "cgp2d"
    p = make_problem("cgp-rand", seed=7)
    assert p.dim == 100
    with pytest.raises(Exception):
        make_problem("nope")


def test_cos1d_demo_problem():
    p = hc.make_cos1d()
    assert p.peek_f1(np.array([0.0])) == pytest.approx(0.0)
    assert p.peek_f2(np.array([0.5])) == pytest.approx(0.0)
    assert p.domain.lower[0] == pytest.approx(-0.95)
    assert p.meta.mu_h == pytest.approx(4.0)
