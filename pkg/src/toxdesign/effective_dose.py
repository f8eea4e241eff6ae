"""Effective doses ED_alpha and their parameter gradients.

The effective dose of a curve p is the dose whose excess risk
(p(d) - p(0)) / (1 - p(0)) equals ``alpha``. Weibull curves have closed
forms; other curves are solved numerically and differentiated implicitly.
"""
from __future__ import annotations

import enum

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NoRootInInterval
from .models import DoseResponseModel, ModelKind

_ROOT_TOL = 1e-12


class Endpoint(str, enum.Enum):
    PRENATAL_DEATH = "prenatal"
    MALFORMATION = "malformation"
    OVERALL_TOXICITY = "overall"


def _check_alpha(alpha):
    alpha = float(alpha)
    if not 0 < alpha < 1:
        raise DomainError(f"excess risk alpha must lie in (0, 1), got {alpha}")
    return alpha


def _triple(theta):
    if isinstance(theta, DoseResponseModel):
        if theta.kind is not ModelKind.WEIBULL:
            raise DomainError("closed-form effective doses need Weibull models")
        return theta.a, theta.b, theta.gamma
    a, b, gamma = (float(x) for x in theta)
    return a, b, gamma


def ed_weibull(b: float, gamma: float, alpha: float) -> float:
    """Effective dose of a Weibull curve, (-ln(1 - alpha) / b)^(1 / gamma).

    The baseline parameter cancels from the excess risk, so only the slope and
    shape enter.
    """
    alpha = _check_alpha(alpha)
    return float((-np.log1p(-alpha) / b) ** (1.0 / gamma))


def ed_grad_weibull(b: float, gamma: float, alpha: float) -> np.ndarray:
    """Gradient of :func:`ed_weibull` over ``(a, b, gamma)``; the first entry is 0."""
    alpha = _check_alpha(alpha)
    ratio = -np.log1p(-alpha) / b
    ed = ratio ** (1.0 / gamma)
    return -ed / gamma * np.array([0.0, 1.0 / b, np.log(ratio) / gamma])


def _polished_root(h, dh, lo=0.0, hi=1.0):
    hi_val = h(hi)
    if abs(hi_val) <= _ROOT_TOL:
        return hi
    if hi_val < 0:
        raise NoRootInInterval("the effective dose exceeds the dose interval [0, 1]")
    x = brentq(h, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    for _ in range(2):
        slope = dh(x)
        if slope > 0:
            x = min(max(x - h(x) / slope, lo), hi)
    return float(x)


def ed_overall(theta1, theta2, alpha: float) -> float:
    """Effective dose for overall toxicity under two Weibull curves.

    Solves b1 x^gamma1 + b2 x^gamma2 = -ln(1 - alpha); the left side is
    strictly increasing so the root is unique.
    """
    alpha = _check_alpha(alpha)
    _, b1, g1 = _triple(theta1)
    _, b2, g2 = _triple(theta2)
    target = -np.log1p(-alpha)
    if b1 + b2 < target * (1 - 1e-15):
        raise NoRootInInterval("b1 + b2 < -ln(1 - alpha): effective dose beyond dose 1")

    def h(x):
        return b1 * x**g1 + b2 * x**g2 - target

    def dh(x):
        return b1 * g1 * x ** (g1 - 1) + b2 * g2 * x ** (g2 - 1)

    return _polished_root(h, dh)


def ed_grad_overall(theta1, theta2, alpha: float) -> np.ndarray:
    """Gradient of :func:`ed_overall` over ``(a1, b1, gamma1, a2, b2, gamma2)``."""
    _, b1, g1 = _triple(theta1)
    _, b2, g2 = _triple(theta2)
    ed = ed_overall(theta1, theta2, alpha)
    log_ed = np.log(ed)
    e1, e2 = ed**g1, ed**g2
    scale = -1.0 / (b1 * g1 * ed ** (g1 - 1) + b2 * g2 * ed ** (g2 - 1))
    return scale * np.array([0.0, e1, b1 * e1 * log_ed, 0.0, e2, b2 * e2 * log_ed])


def _excess_risk_root(p, dp, grad_p, alpha):
    """Root of the excess-risk equation and its implicit parameter gradient."""
    p0 = float(p(0.0))
    q0 = 1.0 - p0

    def h(x):
        return (float(p(x)) - p0) / q0 - alpha

    def dh(x):
        return float(dp(x)) / q0

    ed = _polished_root(h, dh)
    g0 = grad_p(0.0)
    dh_dtheta = (grad_p(ed) - g0) / q0 + (float(p(ed)) - p0) * g0 / q0**2
    slope = dh(ed)
    if not slope > 0:
        raise NoRootInInterval("the excess-risk curve is flat at the effective dose")
    return ed, -dh_dtheta / slope


def ed_numeric(model: DoseResponseModel, alpha: float):
    """Effective dose of any single curve, solved numerically.

    Returns ``(dose, gradient)`` with the gradient over ``(a, b, gamma)``
    obtained from the implicit function theorem at the root.
    """
    alpha = _check_alpha(alpha)
    return _excess_risk_root(model.prob, model.dprob_ddose, model.grad, alpha)


def ed_overall_numeric(model1: DoseResponseModel, model2: DoseResponseModel, alpha: float):
    """Overall-toxicity effective dose for arbitrary curves, with a 6-vector gradient."""
    alpha = _check_alpha(alpha)

    def p(x):
        return 1.0 - (1.0 - model1.prob(x)) * (1.0 - model2.prob(x))

    def dp(x):
        return (1.0 - model2.prob(x)) * model1.dprob_ddose(x) + (1.0 - model1.prob(x)) * model2.dprob_ddose(x)

    def grad_p(x):
        return np.concatenate([(1.0 - model2.prob(x)) * model1.grad(x), (1.0 - model1.prob(x)) * model2.grad(x)])

    return _excess_risk_root(p, dp, grad_p, alpha)
