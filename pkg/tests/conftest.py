import numpy as np
import pytest

from toxdesign import CorrelationSpec, DoseResponseModel, Endpoint, ImplantSpec, Scenario

W = DoseResponseModel.weibull


@pytest.fixture
def canonical():
    """Death curve (0.13, 0.27, 3.33), alpha 0.05, ten implants, no correlation."""
    return Scenario(W(0.13, 0.27, 3.33), implants=ImplantSpec.constant(10))


@pytest.fixture
def overall():
    return Scenario(
        W(0.13, 0.3, 3.33),
        W(0.06, 0.7, 3.37),
        implants=ImplantSpec.constant(10),
        endpoint=Endpoint.OVERALL_TOXICITY,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_scenario(rng, endpoint=None):
    """Weibull scenario with random curves, correlation and implant count."""
    endpoint = endpoint or list(Endpoint)[rng.integers(3)]
    theta2 = W(rng.uniform(0.02, 0.3), rng.uniform(0.15, 0.6), rng.uniform(1.0, 4.5))
    theta1 = W(rng.uniform(0.01, 0.1), rng.uniform(0.3, 1.5), rng.uniform(1.0, 4.0))
    corr = ("constant", "two", "one")[rng.integers(3)]
    if corr == "constant":
        correlation = CorrelationSpec.constant(rng.uniform(0, 0.5))
    elif corr == "two":
        # u1 + u2 d <= 0 keeps the correlation nonnegative
        u1 = rng.uniform(-2, 0)
        correlation = CorrelationSpec.two_param_logistic(u1, rng.uniform(-2, -u1))
    else:
        correlation = CorrelationSpec.one_param_logistic(rng.uniform(0, 2))
    return Scenario(
        theta2,
        None if endpoint is Endpoint.PRENATAL_DEATH else theta1,
        correlation=correlation,
        implants=ImplantSpec.constant(rng.integers(1, 15)),
        alpha=rng.uniform(0.01, 0.1),
        endpoint=endpoint,
    )


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def record_criterion(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
