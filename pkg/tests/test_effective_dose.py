import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import bisect

from toxdesign import (
    DoseResponseModel,
    NoRootInInterval,
    ed_grad_overall,
    ed_grad_weibull,
    ed_numeric,
    ed_overall,
    ed_overall_numeric,
    ed_weibull,
    overall_prob,
    prob,
)

W = DoseResponseModel.weibull
RP = DoseResponseModel.rational_power
L3 = DoseResponseModel.logistic3


def excess(p, d):
    return (p(d) - p(0.0)) / (1 - p(0.0))


def test_table_values():
    assert ed_weibull(0.27, 3.33, 0.05) == pytest.approx(0.607, abs=5e-4)
    assert ed_weibull(0.15, 3.33, 0.05) == pytest.approx(0.725, abs=5e-4)
    assert ed_weibull(0.27, 3.33, 0.1) == pytest.approx(0.754, abs=5e-4)


@settings(max_examples=50)
@given(st.floats(0.01, 0.5), st.floats(0.2, 2.0), st.floats(0.5, 5.0), st.floats(0.01, 0.15))
def test_weibull_ed_solves_excess_risk(a, b, g, alpha):
    model = W(a, b, g)
    try:
        ed = ed_weibull(b, g, alpha)
    except NoRootInInterval:
        return
    if ed <= 1:
        assert excess(model.prob, ed) == pytest.approx(alpha, abs=1e-12)


def test_ed_does_not_depend_on_baseline():
    grad = ed_grad_weibull(0.27, 3.33, 0.05)
    assert grad[0] == 0


def test_overall_reduces_to_single_curve():
    # a vanishing malformation slope leaves the death curve alone
    ed = ed_overall((0.06, 1e-13, 3.37), (0.13, 0.27, 3.33), 0.05)
    assert ed == pytest.approx(ed_weibull(0.27, 3.33, 0.05), abs=1e-9)


def test_overall_matches_bisection():
    m1, m2 = W(0.06, 0.7, 3.37), W(0.13, 0.3, 3.33)
    ed = ed_overall(m1, m2, 0.05)
    oracle = bisect(lambda x: excess(lambda d: overall_prob(m1, m2, d), x) - 0.05, 0, 1, xtol=1e-15)
    assert ed == pytest.approx(oracle, abs=1e-12)
    assert abs(excess(lambda d: overall_prob(m1, m2, d), ed) - 0.05) < 1e-12


def test_overall_root_beyond_interval():
    with pytest.raises(NoRootInInterval):
        ed_overall((0.06, 0.01, 3), (0.13, 0.01, 3), 0.05)


@pytest.mark.parametrize("model", [W(0.13, 0.27, 3.33), RP(0.88, 0.25, 2.8), L3(0.91, 4.3, 3.5), RP(0.94, 1.3, 5.1)])
def test_numeric_ed_solves_excess_risk(model):
    ed, _ = ed_numeric(model, 0.05)
    assert excess(model.prob, ed) == pytest.approx(0.05, abs=1e-12)


def test_numeric_matches_closed_form():
    ed, grad = ed_numeric(W(0.13, 0.27, 3.33), 0.05)
    assert ed == pytest.approx(ed_weibull(0.27, 3.33, 0.05), abs=1e-12)
    np.testing.assert_allclose(grad, ed_grad_weibull(0.27, 3.33, 0.05), atol=1e-10)


def test_overall_numeric_matches_closed_form():
    m1, m2 = W(0.06, 0.7, 3.37), W(0.13, 0.3, 3.33)
    ed, grad = ed_overall_numeric(m1, m2, 0.05)
    assert ed == pytest.approx(ed_overall(m1, m2, 0.05), abs=1e-12)
    np.testing.assert_allclose(grad, ed_grad_overall(m1, m2, 0.05), atol=1e-10)


def test_alpha_must_be_in_unit_interval():
    with pytest.raises(ValueError):
        ed_weibull(0.27, 3.33, 0.0)
