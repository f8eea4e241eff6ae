"""Standardized maximin designs over a box of nominal parameters.

The worst-case efficiency is taken over a finite grid of the box. Each grid
scenario's locally optimal criterion value is computed once and cached.
"""
from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import cvxpy as cp
import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .design import Design, make_design, uniform_design
from .effective_dose import Endpoint
from .errors import CertificationFailed, DomainError
from .information import Scenario, efficiency
from .local import OptimizerConfig, _cluster, _fit_to_size, locally_optimal
from .models import CorrelationKind, CorrelationSpec, ImplantKind, ModelKind

log = logging.getLogger(__name__)

MAXIMIN_CONFIG = OptimizerConfig(support_sizes=(3, 4, 5), restarts=8)
SCENARIO_CONFIG = OptimizerConfig(support_sizes=(2, 3), restarts=1)


def _interval(value, name):
    lo, hi = (float(x) for x in value)
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise DomainError(f"{name} must be a finite interval with lower <= upper, got {value}")
    return (lo, hi)


@dataclass(frozen=True)
class ParamBox:
    """Box of death-curve parameters and correlation slopes u.

    ``u = (0, 0)`` means constant zero correlation.
    """

    a2: tuple
    b2: tuple
    gamma2: tuple
    u: tuple = (0.0, 0.0)
    grid_levels: int = 3

    def __post_init__(self):
        for name in ("a2", "b2", "gamma2", "u"):
            object.__setattr__(self, name, _interval(getattr(self, name), name))
        if int(self.grid_levels) < 2:
            raise DomainError("grid_levels must be at least 2")
        object.__setattr__(self, "grid_levels", int(self.grid_levels))

    def axes(self):
        return [
            np.linspace(lo, hi, self.grid_levels) if hi > lo else np.array([lo])
            for lo, hi in (self.a2, self.b2, self.gamma2, self.u)
        ]


def scenario_grid(box: ParamBox, base: Scenario) -> list:
    """Scenarios on the box grid: equally spaced levels per non-degenerate dimension.

    Each grid point replaces the death-curve parameters of ``base`` (keeping
    its model family) and sets the correlation to 2 / (1 + exp(-u d)) - 1.
    """
    out = []
    for a, b, g, u in itertools.product(*box.axes()):
        out.append(
            base.replace(
                theta2=base.theta2.with_params((a, b, g)),
                correlation=CorrelationSpec.one_param_logistic(u),
            )
        )
    return out


@lru_cache(maxsize=4096)
def local_optimum_value(scenario: Scenario, config: OptimizerConfig = SCENARIO_CONFIG) -> float:
    """Cached locally optimal criterion value of a scenario."""
    try:
        return locally_optimal(scenario, config).value
    except CertificationFailed as exc:
        log.warning("uncertified local optimum for %s: %s", scenario, exc)
        return exc.result.value


def min_efficiency(design: Design, scenarios, per_scenario_optima) -> float:
    """Smallest efficiency of ``design`` over the scenarios; non-estimable counts as 0."""
    return float(min(efficiency(design, s, v) for s, v in zip(scenarios, per_scenario_optima)))


class _Evaluator:
    """Efficiencies of one design across all scenarios.

    Prenatal-death Weibull scenarios with a constant implant count are
    evaluated in one vectorized pass; anything else goes scenario by scenario.
    """

    def __init__(self, scenarios, optima):
        self.scenarios = list(scenarios)
        self.optima = np.asarray(optima, dtype=float)
        self.fast = all(
            s.endpoint is Endpoint.PRENATAL_DEATH
            and s.theta2.kind is ModelKind.WEIBULL
            and s.implants.kind is ImplantKind.CONSTANT
            and s.correlation.kind is CorrelationKind.ONE_PARAM_LOGISTIC
            for s in self.scenarios
        )
        if self.fast:
            P = np.array([[s.theta2.a, s.theta2.b, s.theta2.gamma, s.correlation.u, s.implants.m0] for s in self.scenarios])
            self.a, self.b, self.g, self.u, self.m = (P[:, i : i + 1] for i in range(5))
            self.c = np.array([s.target for s in self.scenarios])

    def __call__(self, doses, weights) -> np.ndarray:
        if not self.fast:
            design = make_design(doses, weights)
            return np.array([efficiency(design, s, v) for s, v in zip(self.scenarios, self.optima)])
        d = np.asarray(doses, dtype=float)[None, :]
        dg = d**self.g
        dlog = np.where(d > 0, dg * np.log(np.where(d > 0, d, 1.0)), 0.0)
        surv = np.exp(-self.a - self.b * dg)
        p = 1.0 - surv
        phi = 2.0 / (1.0 + np.exp(-self.u * d)) - 1.0
        den = self.m * (1.0 + (self.m - 1.0) * phi) * p * surv
        if not den.min() > 0:
            return np.zeros(len(self.scenarios))
        F = np.stack([surv, surv * dg, surv * self.b * dlog], axis=-1) / np.sqrt(den)[..., None]
        M = np.einsum("ski,k,skj->sij", F, np.asarray(weights, dtype=float), F)
        try:
            x = np.linalg.solve(M, self.c[..., None])[..., 0]
        except np.linalg.LinAlgError:
            self.fast = False
            out = self(doses, weights)
            self.fast = True
            return out
        phi_val = np.einsum("si,si->s", self.c, x)
        return np.where(phi_val > 0, self.optima / np.where(phi_val > 0, phi_val, 1.0), 0.0)


def _grid_start(scenarios, optima, n=101):
    """Maximin design restricted to a dose grid, via a second-order cone program."""
    grid = np.linspace(0.0, 1.0, n)
    w = cp.Variable(n, nonneg=True)
    t = cp.Variable()
    cons = [cp.sum(w) == 1]
    for s, v in zip(scenarios, optima):
        blocks = s.elfving_vectors(grid)
        targets = [c / np.sqrt(v) for c in s.target_blocks]
        scale = np.linalg.norm(np.concatenate(targets))
        r = cp.Variable((len(blocks), n), nonneg=True)
        for j, (Fj, c) in enumerate(zip(blocks, targets)):
            u = cp.Variable(n)
            cons.append(Fj.T @ u == c / scale)
            # u_i^2 <= w_i r_ji as a rotated cone
            cons.append(cp.SOC(w + r[j], cp.vstack([2 * u, w - r[j]]), axis=0))
        cons.append(cp.sum(r) <= t / scale**2)
    problem = cp.Problem(cp.Minimize(t), cons)
    try:
        problem.solve(solver=cp.CLARABEL)
    except cp.error.SolverError:
        return None
    if w.value is None:
        return None
    return _cluster(grid, np.clip(w.value, 0, None), gap=2.5 / (n - 1))


def _polish(evaluate, doses, weights):
    """Maximize t subject to eff_s(doses, weights) >= t for every scenario.

    The epigraph form turns the nonsmooth worst case into a smooth
    constrained problem that SLSQP handles well.
    """
    k = len(doses)
    x0 = np.r_[doses, weights, evaluate(doses, weights).min()]
    constraints = [
        {"type": "ineq", "fun": lambda x: evaluate(x[:k], x[k : 2 * k]) - x[-1]},
        {"type": "eq", "fun": lambda x: x[k : 2 * k].sum() - 1.0},
    ]
    bounds = [(0.0, 1.0)] * (2 * k) + [(0.0, 2.0)]
    grad = np.r_[np.zeros(2 * k), -1.0]
    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = minimize(
            lambda x: -x[-1], x0, jac=lambda x: grad, method="SLSQP",
            bounds=bounds, constraints=constraints, options={"maxiter": 500, "ftol": 1e-12},
        )
    d = np.clip(res.x[:k], 0.0, 1.0)
    w = np.clip(res.x[k : 2 * k], 0.0, None)
    if not w.sum() > 0:
        return float(evaluate(doses, weights).min()), np.asarray(doses), np.asarray(weights)
    w = w / w.sum()
    d = np.where(d < 1e-5, 0.0, np.where(d > 1 - 1e-5, 1.0, d))
    value = float(evaluate(d, w).min())
    start = float(evaluate(doses, weights).min())
    if start > value:
        return start, np.asarray(doses, dtype=float), np.asarray(weights, dtype=float)
    return value, d, w


def _refine(evaluate, doses, weights):
    """Polish, merge coincident points and drop empty ones, then polish again."""
    value, d, w = _polish(evaluate, doses, weights)
    design = make_design(d, w)
    if len(design) < len(d):
        value2, d2, w2 = _polish(evaluate, design.doses, design.weights)
        if value2 >= value - 1e-12:
            return value2, d2, w2
    return value, d, w


@dataclass
class MaximinResult:
    """Best design found, its worst-case efficiency and the grid it was judged on.

    Unpacks as ``design, min_eff``.
    """

    design: Design
    min_eff: float
    scenarios: list = field(repr=False)
    efficiencies: np.ndarray = field(repr=False)
    optima: np.ndarray = field(repr=False)

    def __iter__(self):
        return iter((self.design, self.min_eff))


def maximin_design(
    box: ParamBox,
    base: Scenario,
    config: OptimizerConfig | None = None,
    scenario_config: OptimizerConfig = SCENARIO_CONFIG,
) -> MaximinResult:
    """Design maximizing the smallest efficiency over the box grid.

    ``config.support_sizes`` lists the support sizes tried (default 3, 4, 5)
    and ``config.restarts`` the number of extra random starts per size.
    """
    cfg = config or MAXIMIN_CONFIG
    scenarios = scenario_grid(box, base)
    optima = np.array([local_optimum_value(s, scenario_config) for s in scenarios])

    if len(scenarios) == 1:
        design = locally_optimal(scenarios[0], scenario_config, strict=False).design
        effs = np.array([efficiency(design, scenarios[0], optima[0])])
        return MaximinResult(design, float(effs.min()), scenarios, effs, optima)

    evaluate = _Evaluator(scenarios, optima)
    seed = _grid_start(scenarios, optima)
    rng = np.random.default_rng(cfg.seed)
    starts = []
    for k in cfg.support_sizes:
        if seed is not None:
            d0 = _fit_to_size(*seed, k)
            # points added to reach size k start with a small weight
            lookup = dict(zip(seed[0].tolist(), seed[1].tolist()))
            w0 = np.array([lookup.get(x, 0.02) for x in d0.tolist()])
            starts.append((d0, w0 / w0.sum()))
        starts.append((np.linspace(0, 1, k), np.full(k, 1.0 / k)))
        if cfg.restarts:
            for i, row in enumerate(qmc.LatinHypercube(d=k, seed=rng).random(cfg.restarts)):
                row = np.sort(row)
                if i % 2 == 0:
                    # half of the starts keep both ends of the dose range
                    row[0], row[-1] = 0.0, 1.0
                starts.append((row, np.full(k, 1.0 / k)))

    candidates = []
    for d0, w0 in starts:
        value, d, w = _refine(evaluate, d0, w0)
        candidates.append((value, make_design(d, w)))
    best = max(v for v, _ in candidates)
    # near-ties go to the smaller support
    value, design = min(
        ((v, dsg) for v, dsg in candidates if v >= best - 1e-6),
        key=lambda vd: (len(vd[1]), -vd[0]),
    )
    effs = np.array([efficiency(design, s, v) for s, v in zip(scenarios, optima)])
    return MaximinResult(design, float(effs.min()), scenarios, effs, optima)


def uniform_min_efficiency(box: ParamBox, base: Scenario, k: int = 5, scenario_config=SCENARIO_CONFIG) -> float:
    """Worst-case efficiency of the equally spaced, equally weighted k-point design."""
    scenarios = scenario_grid(box, base)
    optima = [local_optimum_value(s, scenario_config) for s in scenarios]
    return min_efficiency(uniform_design(k), scenarios, optima)
