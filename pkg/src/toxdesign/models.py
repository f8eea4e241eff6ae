"""Dose-response curves, intra-litter correlation and implant-count functions.

All dose arguments live on the normalized interval [0, 1] and every function
accepts scalars or arrays. Array input gives array output with the same
leading shape; gradients gain a trailing axis of length 3 ordered
``(a, b, gamma)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError

_DOSE_TOL = 1e-12


class ModelKind(str, enum.Enum):
    WEIBULL = "weibull"
    RATIONAL_POWER = "rational_power"
    LOGISTIC3 = "logistic3"


def _check_doses(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.size:
        lo, hi = d.min(), d.max()
        # NaN fails both comparisons
        if not (lo >= -_DOSE_TOL and hi <= 1 + _DOSE_TOL):
            raise DomainError(f"doses must lie in [0, 1], got {d}")
        if lo < 0 or hi > 1:
            d = np.clip(d, 0.0, 1.0)
    return d


def _pow_and_log(d: np.ndarray, gamma: float):
    """Return d**gamma and d**gamma * ln(d), the latter with its limit 0 at d = 0."""
    dg = d**gamma
    pos = d > 0
    dlog = np.where(pos, dg * np.log(np.where(pos, d, 1.0)), 0.0)
    return dg, dlog


@dataclass(frozen=True)
class DoseResponseModel:
    """Probability of response as a function of dose.

    ``weibull``:        1 - exp(-a - b d^gamma)
    ``rational_power``: 1 - a / (1 + b d^gamma)
    ``logistic3``:      1 - a / (1 + exp(-b + gamma d))
    """

    kind: ModelKind
    a: float
    b: float
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        for name in ("a", "b", "gamma"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0:
                raise DomainError(f"parameter {name} must be positive, got {value}")
            object.__setattr__(self, name, value)
        if self.kind is ModelKind.RATIONAL_POWER and self.a > 1:
            raise DomainError(f"rational_power needs a in (0, 1], got {self.a}")
        if self.kind is ModelKind.LOGISTIC3 and self.a > 1 + np.exp(-self.b):
            # the curve is increasing, so checking d = 0 covers the interval
            raise DomainError("logistic3 parameters give a negative probability at dose 0")

    @classmethod
    def weibull(cls, a, b, gamma):
        return cls(ModelKind.WEIBULL, a, b, gamma)

    @classmethod
    def rational_power(cls, a, b, gamma):
        return cls(ModelKind.RATIONAL_POWER, a, b, gamma)

    @classmethod
    def logistic3(cls, a, b, gamma):
        return cls(ModelKind.LOGISTIC3, a, b, gamma)

    @property
    def params(self) -> np.ndarray:
        return np.array([self.a, self.b, self.gamma])

    def with_params(self, params: Sequence[float]) -> "DoseResponseModel":
        a, b, gamma = params
        return DoseResponseModel(self.kind, a, b, gamma)

    def prob(self, d):
        return prob(self, d)

    def grad(self, d):
        return prob_grad(self, d)

    def dprob_ddose(self, d):
        return prob_ddose(self, d)


def prob(model: DoseResponseModel, d):
    """Response probability at dose ``d``."""
    d = _check_doses(d)
    a, b, g = model.a, model.b, model.gamma
    if model.kind is ModelKind.WEIBULL:
        return -np.expm1(-a - b * d**g)
    if model.kind is ModelKind.RATIONAL_POWER:
        return 1.0 - a / (1.0 + b * d**g)
    return 1.0 - a / (1.0 + np.exp(-b + g * d))


def prob_grad(model: DoseResponseModel, d):
    """Gradient of :func:`prob` with respect to ``(a, b, gamma)``."""
    d = _check_doses(d)
    a, b, g = model.a, model.b, model.gamma
    if model.kind is ModelKind.WEIBULL:
        dg, dlog = _pow_and_log(d, g)
        surv = np.exp(-a - b * dg)
        parts = (surv, surv * dg, surv * b * dlog)
    elif model.kind is ModelKind.RATIONAL_POWER:
        dg, dlog = _pow_and_log(d, g)
        den = 1.0 + b * dg
        parts = (-1.0 / den, a * dg / den**2, a * b * dlog / den**2)
    else:
        e = np.exp(-b + g * d)
        den = 1.0 + e
        parts = (-1.0 / den, -a * e / den**2, a * d * e / den**2)
    return np.stack(np.broadcast_arrays(*parts), axis=-1)


def prob_ddose(model: DoseResponseModel, d):
    """Derivative of :func:`prob` with respect to dose."""
    d = _check_doses(d)
    a, b, g = model.a, model.b, model.gamma
    if model.kind is ModelKind.LOGISTIC3:
        e = np.exp(-b + g * d)
        return a * g * e / (1.0 + e) ** 2
    pos = d > 0
    at_zero = 0.0 if g > 1 else (1.0 if g == 1 else np.inf)
    dgm1 = np.where(pos, np.where(pos, d, 1.0) ** (g - 1.0), at_zero)
    if model.kind is ModelKind.WEIBULL:
        return np.exp(-a - b * d**g) * b * g * dgm1
    return a * b * g * dgm1 / (1.0 + b * d**g) ** 2


def overall_prob(model1: DoseResponseModel, model2: DoseResponseModel, d):
    """Probability of death or malformation: 1 - (1 - p1)(1 - p2)."""
    return 1.0 - (1.0 - prob(model1, d)) * (1.0 - prob(model2, d))


class CorrelationKind(str, enum.Enum):
    CONSTANT = "constant"
    TWO_PARAM_LOGISTIC = "two_param_logistic"
    ONE_PARAM_LOGISTIC = "one_param_logistic"


@dataclass(frozen=True)
class CorrelationSpec:
    """Intra-litter correlation as a function of dose.

    ``two_param_logistic``: 2 / (1 + exp(u1 + u2 d)) - 1
    ``one_param_logistic``: 2 / (1 + exp(-u d)) - 1
    """

    kind: CorrelationKind = CorrelationKind.CONSTANT
    phi0: float = 0.0
    u1: float = 0.0
    u2: float = 0.0
    u: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", CorrelationKind(self.kind))
        for name in ("phi0", "u1", "u2", "u"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.kind is CorrelationKind.CONSTANT and not -1 < self.phi0 < 1:
            raise DomainError(f"constant correlation must lie in (-1, 1), got {self.phi0}")

    @classmethod
    def constant(cls, phi0=0.0):
        return cls(CorrelationKind.CONSTANT, phi0=phi0)

    @classmethod
    def two_param_logistic(cls, u1, u2):
        return cls(CorrelationKind.TWO_PARAM_LOGISTIC, u1=u1, u2=u2)

    @classmethod
    def one_param_logistic(cls, u):
        return cls(CorrelationKind.ONE_PARAM_LOGISTIC, u=u)

    @property
    def is_constant(self) -> bool:
        if self.kind is CorrelationKind.CONSTANT:
            return True
        if self.kind is CorrelationKind.TWO_PARAM_LOGISTIC:
            return self.u2 == 0
        return self.u == 0

    def __call__(self, d):
        return correlation_at(self, d)


def correlation_at(spec: CorrelationSpec, d):
    d = _check_doses(d)
    if spec.kind is CorrelationKind.CONSTANT:
        return np.full_like(d, spec.phi0)
    if spec.kind is CorrelationKind.TWO_PARAM_LOGISTIC:
        return 2.0 / (1.0 + np.exp(spec.u1 + spec.u2 * d)) - 1.0
    return 2.0 / (1.0 + np.exp(-spec.u * d)) - 1.0


class ImplantKind(str, enum.Enum):
    CONSTANT = "constant"
    TABLE = "table"


@dataclass(frozen=True)
class ImplantSpec:
    """Number of implants per litter as a function of dose.

    A ``table`` spec interpolates linearly between ``(dose, m)`` knots.
    """

    kind: ImplantKind = ImplantKind.CONSTANT
    m0: float = 10.0
    table: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ImplantKind(self.kind))
        if self.kind is ImplantKind.CONSTANT:
            if not self.m0 >= 1:
                raise DomainError(f"implant count must be >= 1, got {self.m0}")
            object.__setattr__(self, "m0", float(self.m0))
            return
        knots = tuple((float(x), float(m)) for x, m in self.table)
        if len(knots) < 2:
            raise DomainError("implant table needs at least two knots")
        doses = np.array([x for x, _ in knots])
        if np.any(np.diff(doses) <= 0):
            raise DomainError("implant table doses must be strictly increasing")
        if doses[0] > 0 or doses[-1] < 1:
            raise DomainError("implant table must span the dose interval [0, 1]")
        if min(m for _, m in knots) < 1:
            raise DomainError("implant counts must be >= 1")
        object.__setattr__(self, "table", knots)

    @classmethod
    def constant(cls, m0=10.0):
        return cls(ImplantKind.CONSTANT, m0=m0)

    @classmethod
    def from_table(cls, table):
        return cls(ImplantKind.TABLE, table=tuple(table))

    def __call__(self, d):
        return implants_at(self, d)


def implants_at(spec: ImplantSpec, d):
    d = _check_doses(d)
    if spec.kind is ImplantKind.CONSTANT:
        return np.full_like(d, spec.m0)
    xs, ms = zip(*spec.table)
    return np.interp(d, xs, ms)
