"""Shared domain types and the supremum-oracle contract.

Conventions used across the package:

* labels are 1-based integers in [1, k],
* the Rademacher complexity is the signed one,
  R_hat_n(F) = E_eps sup_{f in F} (1/n) sum_i eps_i f(x_i),
  with no absolute value; estimators expose an optional absolute-value
  convention where a module needs it,
* function classes evaluated on a fixed sample are tabulated as one row
  per function and one column per sample point.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

__all__ = [
    "EXACT_ENUMERATION_CAP",
    "CapExceeded",
    "LabeledDataset",
    "TabulatedClass",
    "RademacherEstimate",
    "SupOracle",
    "as_sign_vector",
    "validate_dataset",
    "require_valid",
]

# Hard cap for exact 2^n sign enumeration (about 10^6 vectors).
EXACT_ENUMERATION_CAP = 20


class CapExceeded(Exception):
    """A configured resource cap (enumeration size, product size, budget) was hit."""


@dataclass(frozen=True)
class LabeledDataset:
    """A sample of n feature vectors with 1-based integer labels in [1, k].

    Construction only coerces dtypes; structural problems are reported by
    ``validate_dataset`` so malformed inputs can be diagnosed rather than
    rejected at the constructor.
    """

    points: np.ndarray
    labels: np.ndarray
    k: int

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1] if self.points.ndim == 2 else 1


@dataclass(frozen=True)
class TabulatedClass:
    """A finite function class tabulated on a fixed sample.

    ``values[r, i]`` is the value of the r-th function at the i-th sample
    point; m >= 1 rows, one column per point.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError("tabulated class must be a 2-d (functions x points) array")
        if vals.shape[0] < 1 or vals.shape[1] < 1:
            raise ValueError("tabulated class needs at least one row and one column")
        object.__setattr__(self, "values", vals)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class RademacherEstimate:
    """Result record for a Rademacher complexity estimate.

    ``method`` is "exact-enumeration" (trials = 0, std_error = 0, seed None)
    or "monte-carlo".
    """

    value: float
    method: str
    trials: int
    std_error: float
    seed: int | None

    def __post_init__(self) -> None:
        if self.method not in ("exact-enumeration", "monte-carlo"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "exact-enumeration" and self.std_error != 0.0:
            raise ValueError("exact enumeration carries no sampling error")


@runtime_checkable
class SupOracle(Protocol):
    """Oracle contract: the inner supremum of the Rademacher definition.

    ``query(signs)`` returns sup_{f in F} (1/n) sum_i signs_i f(x_i) for one
    sign vector and must be deterministic (same signs, same value, bitwise).
    Implementations may additionally provide
    ``query_block(signs_block) -> np.ndarray`` mapping a (trials, n) block of
    sign vectors to per-row suprema; estimators use it when present.
    """

    n: int

    def query(self, signs: np.ndarray) -> float: ...


def as_sign_vector(signs, n: int | None = None) -> np.ndarray:
    """Validate a sign vector (values in {-1, +1}) and return it as int8."""
    arr = np.asarray(signs)
    if arr.ndim != 1:
        raise ValueError("sign vector must be 1-d")
    out = arr.astype(np.int8, copy=False)
    if not np.array_equal(out, arr):
        raise ValueError("sign vector entries must be -1 or +1")
    if not np.all(np.abs(out) == 1):
        raise ValueError("sign vector entries must be -1 or +1")
    if n is not None and out.shape[0] != n:
        raise ValueError(f"sign vector length {out.shape[0]} != expected {n}")
    return out


def validate_dataset(dataset: LabeledDataset) -> list[str]:
    """Structural diagnostics for a dataset; returns [] when well-formed.

    Never raises: violations (length mismatch, label out of range,
    non-finite coordinates) are reported as strings.
    """
    out: list[str] = []
    pts, labels = dataset.points, dataset.labels
    if pts.shape[0] < 1:
        out.append("empty dataset: n must be >= 1")
    if labels.shape[0] != pts.shape[0]:
        out.append(
            f"length mismatch: {pts.shape[0]} points vs {labels.shape[0]} labels"
        )
    if dataset.k < 1:
        out.append(f"class count k={dataset.k} must be >= 1")
    if labels.size and (labels.min(initial=1) < 1 or labels.max(initial=1) > dataset.k):
        out.append(
            f"label out of range: labels must lie in [1, {dataset.k}], "
            f"saw [{labels.min()}, {labels.max()}]"
        )
    if not np.isfinite(pts).all():
        out.append("non-finite coordinates in points")
    return out


def require_valid(dataset: LabeledDataset) -> LabeledDataset:
    """Raise ValueError listing every violation; identity on valid datasets."""
    problems = validate_dataset(dataset)
    if problems:
        raise ValueError("invalid dataset: " + "; ".join(problems))
    return dataset
