"""Locally c-optimal designs and their equivalence-theorem certificates.

The search profiles out the weights. For a fixed support, Elfving's theorem
gives the smallest attainable criterion as

    ( min sum_i || (u_1i, ..., u_Bi) ||_2  subject to  F_j' u_j = c_j )^2

with one constraint per information block and optimal weights proportional
to the per-point norms. Only the doses are left for the derivative-free
search, which starts from the solution of the same problem on a dose grid.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import cvxpy as cp
import numpy as np
from scipy.optimize import brentq, linprog, minimize, minimize_scalar
from scipy.stats import qmc

from .design import Design, make_design
from .effective_dose import Endpoint
from .errors import CertificationFailed, DegenerateDenominator, DomainError, NotEstimable
from .information import Scenario, criterion_value, ginv_solve, info_blocks

log = logging.getLogger(__name__)

BOUNDARY_SNAP = 1e-5
TIE_RTOL = 1e-7
TWO_POINT_TRIGGER = 1e-3
PARAMS_PER_BLOCK = 3


@dataclass(frozen=True)
class OptimizerConfig:
    support_sizes: tuple = (2, 3, 4)
    restarts: int = 8
    grid_points: int = 2001
    seed: int = 0
    tol: float = 1e-10
    init_grid: int = 201
    certify_tol: float = 1e-4
    max_exchanges: int = 3

    def __post_init__(self):
        sizes = tuple(sorted({int(k) for k in self.support_sizes}))
        if not sizes or not set(sizes) <= set(range(2, 7)):
            raise DomainError(f"support sizes must be a nonempty subset of 2..6, got {self.support_sizes}")
        object.__setattr__(self, "support_sizes", sizes)
        if self.grid_points < 101:
            raise DomainError("grid_points must be at least 101")
        if self.restarts < 0:
            raise DomainError("restarts must be nonnegative")


class Certificate(NamedTuple):
    max_sensitivity: float
    argmax_dose: float

    def passes(self, tol: float = 1e-4) -> bool:
        return self.max_sensitivity <= 1.0 + tol


class LocalOptimum(NamedTuple):
    design: Design
    value: float
    certificate: Certificate


# -- profiled weights -------------------------------------------------------


def optimal_weights(blocks, targets, warm=None):
    """Best weights for a fixed support.

    ``blocks`` holds one ``(k, 3)`` array of Elfving vectors per information
    block and ``targets`` the matching pieces of c. Returns ``(value, weights)``
    with ``value = inf`` and ``weights = None`` when c cannot be reached.
    """
    k = blocks[0].shape[0]
    base, nulls = [], []
    for F, c in zip(blocks, targets):
        A = F.T
        if k == A.shape[0]:
            try:
                u = np.linalg.solve(A, c)
            except np.linalg.LinAlgError:
                return np.inf, None
            if not np.all(np.isfinite(u)):
                return np.inf, None
            base.append(u)
            nulls.append(np.zeros((k, 0)))
            continue
        U, S, Vt = np.linalg.svd(A)
        rank = int(np.sum(S > S[0] * 1e-12)) if S.size and S[0] > 0 else 0
        u = Vt[:rank].T @ ((U[:, :rank].T @ c) / S[:rank])
        if np.linalg.norm(A @ u - c) > 1e-9 * np.linalg.norm(c):
            return np.inf, None
        base.append(u)
        nulls.append(_fix_signs(Vt[rank:].T.copy()))

    if sum(N.shape[1] for N in nulls) == 0:
        r = np.sqrt(sum(u * u for u in base))
    elif len(blocks) == 1:
        r = _l1_norms(blocks[0].T, targets[0])
    else:
        r = _group_norms(base, nulls, warm)
    if r is None:
        return np.inf, None
    total = r.sum()
    if not np.isfinite(total) or total <= 0:
        return np.inf, None
    return float(total * total), r / total


def _l1_norms(A, c):
    k = A.shape[1]
    res = linprog(np.ones(2 * k), A_eq=np.hstack([A, -A]), b_eq=c, bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    return np.abs(res.x[:k] - res.x[k:])


def _newton_group(V0, A, t, eps2, steps):
    """Damped Newton on sum_i sqrt(||V0_i + A_i t||^2 + eps2); returns (t, converged)."""
    v = V0 + A @ t
    r = np.sqrt((v * v).sum(axis=1) + eps2)
    f = r.sum()
    for _ in range(steps):
        B = np.einsum("ijt,ij->it", A, v)
        g = (B / r[:, None]).sum(axis=0)
        As = A / np.sqrt(r)[:, None, None]
        Br = B / (r * np.sqrt(r))[:, None]
        H = np.einsum("ijt,ijs->ts", As, As) - Br.T @ Br
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            return t, False
        decrement = g @ step
        if not decrement > 1e-20 * f * f:
            return t, decrement >= 0
        lam = 1.0
        while lam > 1e-4:
            v_new = V0 + A @ (t - lam * step)
            r_new = np.sqrt((v_new * v_new).sum(axis=1) + eps2)
            if r_new.sum() <= f - 0.25 * lam * decrement:
                break
            lam *= 0.5
        else:
            return t, False
        t = t - lam * step
        v, r, f = v_new, r_new, r_new.sum()
    return t, False


def _group_norms(base, nulls, warm=None, stages=5, steps=10):
    """Minimize sum_i ||v_i(t)|| over null-space coordinates t.

    Newton's method on the smoothed norms sqrt(||v||^2 + eps^2), shrinking eps
    a hundredfold per stage so that each stage starts well inside its own
    basin. ``warm`` (a dict) carries the last solution between nearby calls;
    when it converges directly the stages are skipped.
    """
    k = base[0].shape[0]
    V0 = np.stack(base, axis=1)
    dims = [N.shape[1] for N in nulls]
    T = sum(dims)
    A = np.zeros((k, len(base), T))
    col = 0
    for j, N in enumerate(nulls):
        A[:, j, col : col + dims[j]] = N
        col += dims[j]
    scale = max(np.abs(V0).max(), 1e-300)
    final_eps2 = (scale * 100.0 ** (-stages)) ** 2
    t = None
    if warm is not None and warm.get("shape") == A.shape:
        t, ok = _newton_group(V0, A, warm["t"], final_eps2, steps)
        if not ok:
            t = None
    if t is None:
        t = np.zeros(T)
        for stage in range(stages):
            t, _ = _newton_group(V0, A, t, (scale * 100.0 ** (-1 - stage)) ** 2, steps)
    if warm is not None:
        warm["shape"], warm["t"] = A.shape, t
    v = V0 + A @ t
    return np.sqrt((v * v).sum(axis=1))


def _fix_signs(N):
    """Orient null-space columns so that bases of nearby supports agree."""
    for j in range(N.shape[1]):
        if N[np.argmax(np.abs(N[:, j])), j] < 0:
            N[:, j] = -N[:, j]
    return N


def profiled_value(scenario: Scenario, doses, warm=None) -> float:
    """Criterion of the best design supported on ``doses``."""
    try:
        blocks = scenario.elfving_vectors(doses)
    except DegenerateDenominator:
        return np.inf
    return optimal_weights(blocks, scenario.target_blocks, warm)[0]


def best_design_on(scenario: Scenario, doses) -> Design:
    doses = np.asarray(doses, dtype=float)
    value, w = optimal_weights(scenario.elfving_vectors(doses), scenario.target_blocks)
    if w is None:
        raise NotEstimable("the effective dose is not estimable on this support")
    return make_design(doses, w)


# -- sensitivity ------------------------------------------------------------


def _directions(design: Design, scenario: Scenario, doses):
    """Vectors y_j = G_j c_j / sqrt(Phi) for a g-inverse G minimizing max sensitivity."""
    blocks = info_blocks(design, scenario)
    targets = scenario.target_blocks
    xs = [ginv_solve(M, c) for M, c in zip(blocks, targets)]
    phi = sum(float(c @ x) for c, x in zip(targets, xs))
    if not phi > 0:
        raise NotEstimable("zero criterion: c vanishes")
    nulls = []
    for M in blocks:
        evals, evecs = np.linalg.eigh(M)
        nulls.append(evecs[:, evals <= 1e-9 * max(evals[-1], 1e-300)])
    if all(N.shape[1] == 0 for N in nulls):
        return [x / np.sqrt(phi) for x in xs]
    # singular M: every g-inverse gives the same criterion; pick the one that
    # flattens the sensitivity, as the equivalence theorem allows
    F = scenario.elfving_vectors(doses)
    ts = [cp.Variable(N.shape[1]) if N.shape[1] else None for N in nulls]
    rows = []
    for Fj, x, N, t in zip(F, xs, nulls, ts):
        expr = Fj @ x
        rows.append(expr + (Fj @ N) @ t if t is not None else cp.Constant(expr))
    tau = cp.Variable()
    stacked = cp.vstack(rows)
    problem = cp.Problem(cp.Minimize(tau), [cp.norm(stacked, 2, axis=0) <= tau])
    try:
        problem.solve(solver=cp.CLARABEL)
    except cp.error.SolverError:
        problem.status = "failed"
    out = []
    for x, N, t in zip(xs, nulls, ts):
        if t is not None and t.value is not None:
            x = x + N @ t.value
        out.append(x / np.sqrt(phi))
    return out


def sensitivity(design: Design, scenario: Scenario, doses) -> np.ndarray:
    """Equivalence-theorem sensitivity psi(d) = sum_j (f_j(d)' G_j c_j)^2 / Phi.

    A design is c-optimal iff psi <= 1 on [0, 1], with equality on its support.
    """
    doses = np.atleast_1d(np.asarray(doses, dtype=float))
    ys = _directions(design, scenario, doses)
    F = scenario.elfving_vectors(doses)
    return sum((Fj @ y) ** 2 for Fj, y in zip(F, ys))


def sensitivity_curve(design: Design, scenario: Scenario, grid_points: int = 2001):
    doses = np.linspace(0.0, 1.0, grid_points)
    return doses, sensitivity(design, scenario, doses)


def check_optimality(design: Design, scenario: Scenario, grid_points: int = 2001) -> Certificate:
    """Maximum of the sensitivity over a uniform grid plus the support points."""
    doses = np.union1d(np.linspace(0.0, 1.0, grid_points), design.doses)
    psi = sensitivity(design, scenario, doses)
    i = int(np.argmax(psi))
    return Certificate(float(psi[i]), float(doses[i]))


# -- closed form ------------------------------------------------------------


def _two_point_weight(g0: float, g_ed: float) -> float:
    return g0 / (g0 + g_ed)


def two_point_design(scenario: Scenario) -> Design:
    """Two-point design {0, ED} with weight g(0) / (g(0) + g(ED)) at ED.

    Here g(d) = sqrt((1 - p(d)) / (m(d) (1 + (m(d) - 1) phi(d)) p(d))) for the
    death curve p. This is the optimum whenever the optimal design has two
    support points one of which is dose 0.
    """
    if scenario.endpoint is not Endpoint.PRENATAL_DEATH:
        raise DomainError("the closed-form two-point design is for prenatal death")
    ed = scenario.ed
    d = np.array([0.0, ed])
    p = scenario.theta2.prob(d)
    g = np.sqrt((1.0 - p) / (scenario.variance_scale(d) * p))
    w2 = _two_point_weight(g[0], g[1])
    return make_design(d, [1.0 - w2, w2])


# -- search -----------------------------------------------------------------


def _to_z(doses):
    return np.arcsin(np.sqrt(np.clip(doses, 0.0, 1.0)))


def _from_z(z):
    return np.sin(z) ** 2


def _nelder_mead(fun, x0, xatol=1e-9, rounds=2, maxiter=None):
    x0 = np.asarray(x0, dtype=float)
    f0 = fun(x0)
    scale = f0 if np.isfinite(f0) and f0 > 0 else 1.0
    opts = {"xatol": xatol, "fatol": 1e-12, "maxiter": maxiter or 400 * x0.size, "adaptive": x0.size > 4}
    res = minimize(lambda x: fun(x) / scale, x0, method="Nelder-Mead", options=opts)
    for _ in range(rounds - 1):
        previous = res.fun
        res = minimize(lambda x: fun(x) / scale, res.x, method="Nelder-Mead", options=opts)
        if previous - res.fun <= 1e-14:
            break
    return res.x, res.fun * scale


def _refine(scenario: Scenario, doses0):
    """Nelder-Mead over the doses, with weights profiled out."""
    warm = {}
    x, value = _nelder_mead(lambda z: profiled_value(scenario, _from_z(z), warm), _to_z(np.sort(doses0)))
    doses = np.sort(_from_z(x))
    doses = np.where(doses < BOUNDARY_SNAP, 0.0, np.where(doses > 1 - BOUNDARY_SNAP, 1.0, doses))
    return profiled_value(scenario, doses), doses


def grid_support(scenario: Scenario, n: int = 201):
    """Optimal design restricted to a uniform dose grid, as (doses, weights) of clusters."""
    grid = np.linspace(0.0, 1.0, n)
    try:
        F = scenario.elfving_vectors(grid)
    except DegenerateDenominator:
        grid = grid[1:]
        F = scenario.elfving_vectors(grid)
    targets = scenario.target_blocks
    scale = np.linalg.norm(scenario.target)
    U = cp.Variable((len(F), grid.size))
    constraints = [Fj.T @ U[j] == c / scale for j, (Fj, c) in enumerate(zip(F, targets))]
    problem = cp.Problem(cp.Minimize(cp.sum(cp.norm(U, 2, axis=0))), constraints)
    try:
        problem.solve(solver=cp.CLARABEL)
    except cp.error.SolverError:
        return np.empty(0), np.empty(0)
    if U.value is None:
        return np.empty(0), np.empty(0)
    r = np.linalg.norm(U.value, axis=0)
    w = r / r.sum()
    return _cluster(grid, w, gap=2.5 / (n - 1))


def _cluster(grid, w, gap, floor=1e-4):
    idx = np.flatnonzero(w > floor * w.max())
    groups = []
    for i in idx:
        if groups and grid[i] - grid[groups[-1][-1]] <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    doses = np.array([np.average(grid[g], weights=w[g]) for g in groups])
    weights = np.array([w[g].sum() for g in groups])
    return doses, weights / weights.sum()


def _fit_to_size(doses, weights, k):
    doses, weights = list(doses), list(weights)
    while len(doses) > k:
        j = int(np.argmin(weights))
        del doses[j], weights[j]
    while len(doses) < k:
        pts = [0.0] + sorted(doses) + [1.0]
        gaps = np.diff(pts)
        j = int(np.argmax(gaps))
        doses.append(pts[j] + gaps[j] / 2)
        weights.append(0.0)
    return np.sort(doses)


def _starts(scenario: Scenario, k, seed_doses, seed_weights, restarts, rng):
    """The grid seed, then up to ``restarts`` more: two structured guesses and Latin hypercube draws."""
    starts = [_fit_to_size(seed_doses, seed_weights, k)] if len(seed_doses) else []
    extra = [np.linspace(0.0, 1.0, k)]
    ed = min(scenario.ed, 1.0)
    inner = np.linspace(0.5 * ed, min(1.5 * ed, 0.95), k - 2) if k > 2 else []
    extra.append(np.sort(np.r_[0.0, inner, 1.0][:k]))
    if restarts > len(extra):
        lhs = qmc.LatinHypercube(d=k, seed=rng).random(restarts - len(extra))
        extra.extend(np.sort(row) for row in lhs)
    starts.extend(extra[: max(restarts, 0 if starts else 1)])
    return starts


def _two_point_search(scenario: Scenario, pair0):
    """Best two-point design near ``pair0`` for a single 3-parameter block.

    Two points can only reach c when c lies in their span, so the second dose
    is solved from det[f(d1), f(d2), c] = 0 and the first is searched.
    """
    c = scenario.target

    def dets(d1, d2s):
        F = scenario.elfving_vectors(np.r_[d1, d2s])[0]
        return F[1:] @ np.cross(c, F[0])

    d2_guess = float(pair0[1])

    def partner(d1):
        lo = max(d1 + 1e-6, d2_guess - 0.2)
        hi = min(1.0, d2_guess + 0.2)
        if lo >= hi:
            return None
        xs = np.linspace(lo, hi, 81)
        try:
            vals = dets(d1, xs)
        except DegenerateDenominator:
            return None
        roots = []
        for i in np.flatnonzero(vals == 0):
            roots.append(xs[i])
        for i in np.flatnonzero(vals[:-1] * vals[1:] < 0):
            try:
                roots.append(brentq(lambda x: dets(d1, x)[0], xs[i], xs[i + 1], xtol=1e-15))
            except ValueError:
                roots.append(xs[i] - vals[i] * (xs[i + 1] - xs[i]) / (vals[i + 1] - vals[i]))
        if not roots:
            return None
        return min(roots, key=lambda x: abs(x - d2_guess))

    def value(d1):
        d2 = partner(d1)
        if d2 is None:
            return np.inf, None
        return profiled_value(scenario, [d1, d2]), d2

    best = (np.inf, None)
    v0, d2 = value(0.0)
    if d2 is not None:
        best = (v0, np.array([0.0, d2]))
    upper = min(float(pair0[0]) + 0.2, d2_guess - 1e-3)
    if upper > 0:
        res = minimize_scalar(lambda d1: value(d1)[0], bounds=(0.0, upper), method="bounded", options={"xatol": 1e-10})
        if res.fun < best[0]:
            d1 = 0.0 if res.x < BOUNDARY_SNAP else float(res.x)
            v, d2 = value(d1)
            if d2 is not None and v < best[0]:
                best = (v, np.array([d1, d2]))
    return best


def _pick(candidates):
    """Lowest criterion; near-ties go to fewer points, then the smaller support."""
    candidates = [(v, d) for v, d in candidates if np.isfinite(v)]
    if not candidates:
        raise NotEstimable("no candidate design makes the effective dose estimable")
    best = min(v for v, _ in candidates)
    close = [(v, d) for v, d in candidates if v <= best * (1 + TIE_RTOL)]
    return min(close, key=lambda vd: (len(vd[1]), tuple(vd[1])))


def _clean(scenario: Scenario, doses) -> Design:
    design = best_design_on(scenario, doses)
    # drop numerically dead points, then re-solve the weights on what is left
    keep = design.weights > 1e-7
    if not keep.all():
        try:
            design = best_design_on(scenario, design.doses[keep])
        except NotEstimable:
            pass
    return design


def _two_point_candidates(scenario: Scenario, candidates):
    """Two-point designs near the best three-point design when one of its weights vanishes."""
    pairs = []
    if candidates:
        _, doses = _pick(candidates)
        w = optimal_weights(scenario.elfving_vectors(doses), scenario.target_blocks)[1]
        if w is not None and len(doses) > 2 and w.min() < TWO_POINT_TRIGGER:
            pairs.append(np.sort(np.delete(doses, int(np.argmin(w)))))
    if (pairs or not candidates) and scenario.endpoint is Endpoint.PRENATAL_DEATH:
        pairs.append(np.array([0.0, min(scenario.ed, 1.0)]))
    out = []
    for pair in pairs:
        value, doses = _two_point_search(scenario, pair)
        if doses is not None:
            out.append((value, doses))
    return out


def _best_certified(scenario: Scenario, candidates, cfg):
    _, doses = _pick(candidates)
    design = _clean(scenario, doses)
    return design, check_optimality(design, scenario, cfg.grid_points)


def locally_optimal(scenario: Scenario, config: OptimizerConfig | None = None, strict: bool = True) -> LocalOptimum:
    """Locally c-optimal design for the scenario's effective dose.

    Returns ``(design, criterion value, certificate)``. With ``strict`` an
    uncertified result raises :class:`CertificationFailed` carrying the best
    design found.
    """
    cfg = config or OptimizerConfig()
    rng = np.random.default_rng(cfg.seed)
    single = scenario.block_count == 1
    seed_doses, seed_weights = grid_support(scenario, cfg.init_grid)

    sizes = [k for k in cfg.support_sizes if k >= PARAMS_PER_BLOCK] or [PARAMS_PER_BLOCK]
    if single:
        # a c-optimal design never needs more points than parameters
        sizes = sorted({min(k, PARAMS_PER_BLOCK) for k in sizes})

    candidates = []
    design = cert = None
    for k in sizes:
        if design is None:
            starts = _starts(scenario, k, seed_doses, seed_weights, cfg.restarts, rng)
        else:
            # grow the failed smaller design at its worst dose, plus the cheap guesses
            grown = _fit_to_size(np.r_[design.doses, cert.argmax_dose], np.r_[design.weights, 0.0], k)
            starts = [grown] + _starts(scenario, k, seed_doses, seed_weights, 2, rng)
        for start in starts:
            candidates.append(_refine(scenario, start))
        if single and k == PARAMS_PER_BLOCK and 2 in cfg.support_sizes:
            candidates.extend(_two_point_candidates(scenario, candidates))
        design, cert = _best_certified(scenario, candidates, cfg)
        # a certified design is globally optimal, so larger supports cannot help
        if cert.passes(cfg.certify_tol):
            break

    for _ in range(cfg.max_exchanges):
        if cert.passes(cfg.certify_tol) or len(design) >= 6:
            break
        log.debug("certificate %.6g at %.4g; adding a support point", cert.max_sensitivity, cert.argmax_dose)
        trial_value, trial_doses = _refine(scenario, np.r_[design.doses, cert.argmax_dose])
        if not trial_value < criterion_value(design, scenario):
            break
        design = _clean(scenario, trial_doses)
        cert = check_optimality(design, scenario, cfg.grid_points)

    result = LocalOptimum(design, criterion_value(design, scenario), cert)
    if strict and not cert.passes(cfg.certify_tol):
        raise CertificationFailed(
            f"max sensitivity {cert.max_sensitivity:.6g} at dose {cert.argmax_dose:.4g} exceeds 1 + {cfg.certify_tol:g}",
            result,
        )
    return result
