"""Approximate designs on the dose interval, rounding and rescaling."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, DoseOutOfRange, EmptyDesign, NegativeWeight

MERGE_TOL = 1e-6
WEIGHT_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class Design:
    """Finite probability measure on [0, 1]: sorted support doses and weights.

    Build instances through :func:`make_design`, which enforces the
    invariants (strictly increasing doses, positive weights summing to one).
    """

    doses: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        doses = np.array(self.doses, dtype=float)
        weights = np.array(self.weights, dtype=float)
        doses.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "doses", doses)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.doses)

    def __iter__(self):
        return iter(zip(self.doses.tolist(), self.weights.tolist()))

    def __eq__(self, other):
        if not isinstance(other, Design):
            return NotImplemented
        return np.array_equal(self.doses, other.doses) and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.doses.tobytes(), self.weights.tobytes()))

    def __repr__(self):
        d = ", ".join(f"{x:.4g}" for x in self.doses)
        w = ", ".join(f"{x:.4g}" for x in self.weights)
        return f"Design({{{d}; {w}}})"

    def allclose(self, other: "Design", dose_tol=1e-4, weight_tol=1e-4) -> bool:
        return (
            len(self) == len(other)
            and np.allclose(self.doses, other.doses, rtol=0, atol=dose_tol)
            and np.allclose(self.weights, other.weights, rtol=0, atol=weight_tol)
        )

    def to_dict(self) -> dict:
        return {"doses": self.doses.tolist(), "weights": self.weights.tolist()}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dose", "weight"])
        for d, w in self:
            writer.writerow([f"{d:.6g}", f"{w:.6g}"])
        return buf.getvalue()


def make_design(doses: Sequence[float], weights: Sequence[float]) -> Design:
    """Validate and normalize a design.

    Sorts by dose, merges points closer than ``MERGE_TOL`` (adding their
    weights), drops weights below ``WEIGHT_FLOOR`` and rescales the rest to
    sum to one.
    """
    doses = np.asarray(doses, dtype=float).ravel()
    weights = np.asarray(weights, dtype=float).ravel()
    if doses.shape != weights.shape:
        raise DomainError("doses and weights must have equal lengths")
    if doses.size == 0:
        raise EmptyDesign("a design needs at least one support point")
    if np.any(~np.isfinite(doses)) or np.any(doses < 0) or np.any(doses > 1):
        raise DoseOutOfRange(f"doses must lie in [0, 1], got {doses}")
    if np.any(~np.isfinite(weights)) or np.any(weights < 0):
        raise NegativeWeight(f"weights must be nonnegative, got {weights}")
    total = weights.sum()
    if total <= 0:
        raise EmptyDesign("all weights are zero")
    weights = weights / total

    order = np.argsort(doses, kind="stable")
    doses, weights = doses[order], weights[order]
    merged_d, merged_w = [], []
    for d, w in zip(doses, weights):
        if merged_d and d - merged_d[-1] < MERGE_TOL:
            total_w = merged_w[-1] + w
            if total_w > 0:
                merged_d[-1] = (merged_d[-1] * merged_w[-1] + d * w) / total_w
            merged_w[-1] = total_w
        else:
            merged_d.append(d)
            merged_w.append(w)
    merged_d = np.array(merged_d)
    merged_w = np.array(merged_w)
    keep = merged_w >= WEIGHT_FLOOR
    if not keep.any():
        raise EmptyDesign("no weight survives the weight floor")
    merged_w = merged_w[keep]
    return Design(merged_d[keep], merged_w / merged_w.sum())


def uniform_design(k: int) -> Design:
    """Equally weighted design on k equally spaced doses including 0 and 1."""
    if k < 2:
        raise DomainError(f"uniform design needs k >= 2, got {k}")
    return make_design(np.linspace(0.0, 1.0, k), np.full(k, 1.0 / k))


def equal_weight_design(doses: Sequence[float]) -> Design:
    doses = list(doses)
    return make_design(doses, [1.0] * len(doses))


@dataclass(frozen=True)
class ExactDesign:
    doses: tuple
    counts: tuple

    @property
    def n(self) -> int:
        return sum(self.counts)


def round_design(design: Design, n: int) -> ExactDesign:
    """Efficient rounding of ``n * weights`` to integer counts summing to ``n``.

    Starts from ceil((n - k/2) w_j) and moves one observation at a time: a
    shortfall goes to the point with the smallest n_j / w_j, an excess is
    taken from the point with the largest (n_j - 1) / w_j.
    """
    k = len(design)
    n = int(n)
    if n < k:
        raise DomainError(f"need n >= {k} observations for a {k}-point design, got {n}")
    w = design.weights
    counts = np.ceil((n - k / 2) * w).astype(int)
    # ties go to the point furthest below (or above) its quota n w_j
    while counts.sum() < n:
        ratio = counts / w
        tied = np.flatnonzero(ratio <= ratio.min() * (1 + 1e-12))
        j = int(tied[np.argmin(counts[tied] - n * w[tied])])
        counts[j] += 1
    while counts.sum() > n:
        ratio = (counts - 1) / w
        tied = np.flatnonzero(ratio >= ratio.max() * (1 - 1e-12))
        j = int(tied[np.argmax(counts[tied] - n * w[tied])])
        counts[j] -= 1
    return ExactDesign(tuple(design.doses.tolist()), tuple(int(c) for c in counts))


def rescale_design(design: Design, gamma: float, T: float = 1.0) -> Design:
    """Map each dose d to T * d^(1/gamma); weights are unchanged."""
    if gamma <= 0 or T <= 0:
        raise DomainError("gamma and T must be positive")
    doses = T * design.doses ** (1.0 / gamma)
    if T > 1:
        # the result lives on [0, T]; bypass the [0, 1] validation
        return Design(doses, design.weights.copy())
    return make_design(doses, design.weights)


def design_from_dict(data: dict) -> Design:
    return make_design(data["doses"], data["weights"])


def design_from_json(text: str) -> Design:
    return design_from_dict(json.loads(text))


def design_to_json(design: Design) -> str:
    return json.dumps(design.to_dict())


def design_from_csv(text: str) -> Design:
    """Parse ``dose,weight`` lines; a header row is optional."""
    doses, weights = [], []
    for row in csv.reader(io.StringIO(text)):
        if not row or not "".join(row).strip():
            continue
        try:
            d, w = float(row[0]), float(row[1])
        except ValueError:
            if doses:
                raise DomainError(f"malformed design row: {row}")
            continue
        doses.append(d)
        weights.append(w)
    return make_design(doses, weights)


def rounding_loss(counts: Sequence[int], weights: Sequence[float]) -> float:
    """min_j n_j / (n w_j), the efficiency bound that efficient rounding maximizes."""
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    return float(np.min(counts / (n * np.asarray(weights, dtype=float))))


__all__ = [
    "Design",
    "ExactDesign",
    "make_design",
    "uniform_design",
    "equal_weight_design",
    "round_design",
    "rescale_design",
    "design_from_dict",
    "design_from_json",
    "design_to_json",
    "design_from_csv",
    "rounding_loss",
    "MERGE_TOL",
    "WEIGHT_FLOOR",
]
