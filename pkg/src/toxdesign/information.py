"""Information matrices, the c-optimality criterion and design efficiency.

A :class:`Scenario` fixes everything the criterion depends on. Internally the
information matrix is assembled from *Elfving vectors*

    f(d) = D(d) / sqrt(variance denominator at d),

one per block: a single 3-vector for prenatal death or malformation, and a
pair of 3-vectors (malformation block, death block) for overall toxicity,
whose information matrix is block diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .design import Design
from .effective_dose import (
    Endpoint,
    ed_grad_overall,
    ed_grad_weibull,
    ed_numeric,
    ed_overall,
    ed_overall_numeric,
    ed_weibull,
)
from .errors import DegenerateDenominator, DomainError, NotEstimable
from .models import CorrelationSpec, DoseResponseModel, ImplantSpec, ModelKind

ESTIMABILITY_TOL = 1e-8


@dataclass(frozen=True)
class Scenario:
    """Nominal parameters of one locally optimal design problem.

    ``theta2`` is the prenatal-death curve and ``theta1`` the malformation
    curve. Overall toxicity with non-Weibull curves needs ``numeric_ed=True``.
    """

    theta2: DoseResponseModel
    theta1: DoseResponseModel | None = None
    correlation: CorrelationSpec = field(default_factory=CorrelationSpec)
    implants: ImplantSpec = field(default_factory=ImplantSpec)
    alpha: float = 0.05
    endpoint: Endpoint = Endpoint.PRENATAL_DEATH
    numeric_ed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "endpoint", Endpoint(self.endpoint))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.endpoint is not Endpoint.PRENATAL_DEATH and self.theta1 is None:
            raise DomainError(f"endpoint {self.endpoint.value} needs theta1")
        if self.endpoint is Endpoint.OVERALL_TOXICITY and not self.numeric_ed:
            if ModelKind.WEIBULL != self.theta1.kind or ModelKind.WEIBULL != self.theta2.kind:
                raise DomainError("overall toxicity with non-Weibull curves needs numeric_ed=True")

    def replace(self, **changes) -> "Scenario":
        return replace(self, **changes)

    @property
    def block_count(self) -> int:
        return 2 if self.endpoint is Endpoint.OVERALL_TOXICITY else 1

    @property
    def dim(self) -> int:
        return 3 * self.block_count

    @cached_property
    def _ed_and_gradient(self):
        alpha = self.alpha
        if self.endpoint is Endpoint.OVERALL_TOXICITY:
            if self.numeric_ed:
                return ed_overall_numeric(self.theta1, self.theta2, alpha)
            return ed_overall(self.theta1, self.theta2, alpha), ed_grad_overall(self.theta1, self.theta2, alpha)
        model = self.theta2 if self.endpoint is Endpoint.PRENATAL_DEATH else self.theta1
        if model.kind is ModelKind.WEIBULL and not self.numeric_ed:
            return ed_weibull(model.b, model.gamma, alpha), ed_grad_weibull(model.b, model.gamma, alpha)
        return ed_numeric(model, alpha)

    @property
    def ed(self) -> float:
        """Effective dose of the scenario's endpoint."""
        return self._ed_and_gradient[0]

    @property
    def target(self) -> np.ndarray:
        """Gradient of the effective dose: the vector c of the c-criterion."""
        return self._ed_and_gradient[1]

    @property
    def target_blocks(self) -> list:
        c = self.target
        return [c[3 * j : 3 * j + 3] for j in range(self.block_count)]

    def variance_scale(self, d):
        """m(d) * (1 + (m(d) - 1) * phi(d)), the litter over-dispersion factor."""
        m = self.implants(d)
        s = m * (1.0 + (m - 1.0) * self.correlation(d))
        if s.min() <= 0:
            raise DegenerateDenominator("m (1 + (m - 1) phi) must be positive")
        return s

    def elfving_vectors(self, d) -> list:
        """Elfving vectors at doses ``d``: one ``(len(d), 3)`` array per block."""
        d = np.atleast_1d(np.asarray(d, dtype=float))
        s = self.variance_scale(d)
        p2 = self.theta2.prob(d)
        if not (p2.min() > 0 and p2.max() < 1):
            raise DegenerateDenominator("the death probability must lie strictly inside (0, 1)")
        blocks = []
        if self.endpoint is not Endpoint.PRENATAL_DEATH:
            p1 = self.theta1.prob(d)
            den1 = s * p1 * (1.0 - p2) * (1.0 - p1 * (1.0 - p2))
            if not den1.min() > 0:
                raise DegenerateDenominator("malformation variance vanished")
            blocks.append(self.theta1.grad(d) / np.sqrt(den1)[:, None])
        if self.endpoint is not Endpoint.MALFORMATION:
            den2 = s * p2 * (1.0 - p2)
            blocks.append(self.theta2.grad(d) / np.sqrt(den2)[:, None])
        return blocks


def info_blocks(design: Design, scenario: Scenario) -> list:
    """Diagonal blocks of the information matrix (one 3x3 array per block)."""
    return [(f * design.weights[:, None]).T @ f for f in scenario.elfving_vectors(design.doses)]


def info_matrix(design: Design, scenario: Scenario) -> np.ndarray:
    """Information matrix of ``design``: 3x3, or 6x6 block diagonal for overall toxicity."""
    blocks = info_blocks(design, scenario)
    if len(blocks) == 1:
        return blocks[0]
    out = np.zeros((6, 6))
    out[:3, :3] = blocks[0]
    out[3:, 3:] = blocks[1]
    return out


def ginv_solve(M: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Return x = M^+ c, raising :class:`NotEstimable` if c is not in range(M)."""
    U, S, Vt = np.linalg.svd(M)
    cutoff = S[0] * max(M.shape) * np.finfo(float).eps if S.size and S[0] > 0 else 0.0
    inv = np.where(S > cutoff, 1.0 / np.where(S > cutoff, S, 1.0), 0.0)
    x = Vt.T @ (inv * (U.T @ c))
    norm_c = np.linalg.norm(c)
    if norm_c > 0 and np.linalg.norm(M @ x - c) > ESTIMABILITY_TOL * norm_c:
        raise NotEstimable("the effective dose is not estimable under this design")
    return x


def criterion_parts(design: Design, scenario: Scenario) -> list:
    """Per-block quadratic forms c_j' M_j^- c_j; they sum to the criterion."""
    return [
        float(c @ ginv_solve(M, c))
        for M, c in zip(info_blocks(design, scenario), scenario.target_blocks)
    ]


def criterion_value(design: Design, scenario: Scenario) -> float:
    """Asymptotic variance proxy c' M^- c of the estimated effective dose."""
    return sum(criterion_parts(design, scenario))


def efficiency(design: Design, scenario: Scenario, optimal_value: float) -> float:
    """optimal_value / criterion_value(design); non-estimable designs score 0."""
    try:
        value = criterion_value(design, scenario)
    except NotEstimable:
        return 0.0
    return float(optimal_value / value)
