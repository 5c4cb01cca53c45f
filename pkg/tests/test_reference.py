"""Certified reference values for the benchmark problems."""
import numpy as np
import pytest

import hcsolvers as hc
from hcsolvers.reference import frozen_reference, reference_value

cvxpy = pytest.importorskip("cvxpy")
from hcsolvers.reference import reference_convex  # noqa: E402


def test_reference_value_analytic_shortcuts():
    assert reference_value(hc.make_cnls()) == pytest.approx(0.15)
    assert reference_value(hc.make_cgp2d()) == pytest.approx(5.0)


def test_frozen_reference_for_random_program():
    rec = frozen_reference("cgp-rand", 42)
    assert rec["f1_star_ref"] == pytest.approx(0.07341320151219796, abs=0)
    assert rec["dim"] == 100
    p = hc.make_random_cgp(42)
    assert reference_value(p) == pytest.approx(rec["f1_star_ref"], abs=0)


def test_frozen_reference_missing_seed():
    assert frozen_reference("cgp-rand", 31415) is None


def test_reference_convex_certifies_2d_programs():
    for p, truth in ((hc.make_cnls(), 0.15), (hc.make_cgp2d(), 5.0)):
        res = reference_convex(p)
        assert res["f1_star_ref"] == pytest.approx(truth, abs=1e-6)
        assert res["gap"] <= 1e-6
        assert res["lambda_dual"] >= -1e-9
    # dual multiplier matches the documented one on the smooth program
    res = reference_convex(hc.make_cgp2d())
    assert res["lambda_dual"] == pytest.approx(1.0, abs=5e-3)


def test_reference_feasibility_of_recovered_point():
    res = reference_convex(hc.make_cgp2d())
    x = np.asarray(res["x_star"])
    p = hc.make_cgp2d()
    assert p.peek_f2(x) <= 1e-6
    assert p.peek_f1(x) == pytest.approx(5.0, abs=1e-5)
