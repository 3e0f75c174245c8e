"""Margins, prediction, margin classes, and the subadditivity check.

The margin of a labeled example under a score row s is
m(s, y) = s_y - max_{y' != y} s_{y'}; an example is misclassified exactly
when its margin is <= 0.  The induced margin class M_k over per-class
function classes (F_1, ..., F_k) tabulates, for every tuple
(f_1, ..., f_k) in the Cartesian product, the margins of all examples.
``verify_lemma1`` checks, by exact enumeration, the subadditivity
R_hat_n(M_k) <= sum_j R_hat_n(F_j).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import EXACT_ENUMERATION_CAP, CapExceeded, TabulatedClass
from .rademacher import TabulatedSupOracle, exact_empirical_rademacher

__all__ = [
    "MARGIN_CLASS_CAP",
    "ScoreMatrix",
    "MarginClassSpec",
    "Prediction",
    "Lemma1Report",
    "predict",
    "margin",
    "margins",
    "partial_margin",
    "margin_distribution",
    "empirical_margin_cdf",
    "materialize_margin_class",
    "verify_lemma1",
    "random_margin_instance",
    "lemma1_sweep",
]

# Cap on the Cartesian-product size of a materialized margin class.
MARGIN_CLASS_CAP = 10**6


@dataclass(frozen=True)
class ScoreMatrix:
    """Per-example class scores: n rows (examples) by k >= 2 columns (classes)."""

    scores: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.scores, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] < 2:
            raise ValueError("scores must be an (n, k) matrix with k >= 2")
        object.__setattr__(self, "scores", arr)

    @property
    def n(self) -> int:
        return self.scores.shape[0]

    @property
    def k(self) -> int:
        return self.scores.shape[1]


@dataclass(frozen=True)
class MarginClassSpec:
    """Per-class tabulated classes (F_1, ..., F_k) sharing one sample."""

    per_class: tuple[TabulatedClass, ...]
    cap: int = MARGIN_CLASS_CAP

    def __post_init__(self) -> None:
        classes = tuple(self.per_class)
        object.__setattr__(self, "per_class", classes)
        if len(classes) < 2:
            raise ValueError("a margin class needs k >= 2 per-class classes")
        ns = {c.n for c in classes}
        if len(ns) != 1:
            raise ValueError(f"per-class classes disagree on sample size: {sorted(ns)}")

    @property
    def k(self) -> int:
        return len(self.per_class)

    @property
    def n(self) -> int:
        return self.per_class[0].n

    @property
    def product_size(self) -> int:
        return math.prod(c.m for c in self.per_class)


@dataclass(frozen=True)
class Prediction:
    label: int
    tie: bool


@dataclass(frozen=True)
class Lemma1Report:
    lhs: float
    rhs: float
    per_class: tuple[float, ...]
    passed: bool
    tolerance: float = 1e-12


def _check_row(score_row) -> np.ndarray:
    row = np.asarray(score_row, dtype=np.float64)
    if row.ndim != 1 or row.shape[0] < 2:
        raise ValueError("score row must be 1-d with k >= 2 entries")
    if not np.isfinite(row).all():
        raise ValueError("score row contains non-finite values")
    return row


def predict(score_row) -> Prediction:
    """Highest-scoring label (1-based); ties resolve to the smallest index.

    A tied maximum means no label wins by a strict inequality, so tie=True
    marks the prediction as a forced choice rather than a true winner.
    """
    row = _check_row(score_row)
    best = int(np.argmax(row))
    tie = bool((row == row[best]).sum() > 1)
    return Prediction(label=best + 1, tie=tie)


def margin(score_row, y: int) -> float:
    """s_y minus the best competing score, s_y - max_{y' != y} s_{y'}."""
    row = _check_row(score_row)
    if not 1 <= y <= row.shape[0]:
        raise ValueError(f"label {y} out of range [1, {row.shape[0]}]")
    others = np.delete(row, y - 1)
    return float(row[y - 1] - others.max())


def partial_margin(score_row, y: int, subset: Iterable[int]) -> float:
    """Margin against a restricted competitor set.

    For y in subset: s_y - max over subset \\ {y}, where the max over the
    empty set is 0 (so subset = {y} gives s_y).  For y not in subset:
    -max over subset.
    """
    row = _check_row(score_row)
    k = row.shape[0]
    sub = sorted(set(int(v) for v in subset))
    if not sub:
        raise ValueError("subset must be nonempty")
    if sub[0] < 1 or sub[-1] > k:
        raise ValueError(f"subset entries must lie in [1, {k}]")
    if not 1 <= y <= k:
        raise ValueError(f"label {y} out of range [1, {k}]")
    if y in sub:
        competitors = [row[v - 1] for v in sub if v != y]
        best = max(competitors) if competitors else 0.0
        return float(row[y - 1] - best)
    return float(-max(row[v - 1] for v in sub))


def margins(scores: ScoreMatrix, labels) -> np.ndarray:
    """Vector of margins, one per example."""
    labs = np.asarray(labels, dtype=np.int64)
    if labs.shape != (scores.n,):
        raise ValueError(f"labels length {labs.shape} != n={scores.n}")
    if labs.min() < 1 or labs.max() > scores.k:
        raise ValueError(f"labels must lie in [1, {scores.k}]")
    arr = scores.scores
    own = arr[np.arange(scores.n), labs - 1]
    masked = arr.copy()
    masked[np.arange(scores.n), labs - 1] = -np.inf
    return own - masked.max(axis=1)


def margin_distribution(scores: ScoreMatrix, labels, delta: float) -> float:
    """Fraction of examples with margin <= delta (inclusive)."""
    if not np.isfinite(delta):
        raise ValueError("delta must be finite")
    m = margins(scores, labels)
    return float(np.count_nonzero(m <= delta) / scores.n)


def empirical_margin_cdf(scores: ScoreMatrix, labels) -> Callable[[float], float]:
    """delta -> fraction of margins <= delta, precomputed and sorted."""
    m = np.sort(margins(scores, labels))
    n = m.shape[0]

    def cdf(delta: float) -> float:
        return float(np.searchsorted(m, delta, side="right") / n)

    return cdf


def materialize_margin_class(spec: MarginClassSpec, labels) -> TabulatedClass:
    """Tabulate the margin class M_k as one row per product tuple.

    Row r corresponds to the tuple with mixed-radix index r over
    (F_1, ..., F_k), the last class varying fastest; column i holds
    m(x_i, y_i) for that tuple.
    """
    labs = np.asarray(labels, dtype=np.int64)
    k, n = spec.k, spec.n
    if labs.shape != (n,):
        raise ValueError(f"labels length {labs.shape} != n={n}")
    if labs.min() < 1 or labs.max() > k:
        raise ValueError(f"labels must lie in [1, {k}]")
    total = spec.product_size
    if total > spec.cap:
        raise CapExceeded(
            f"margin-class product has {total} rows; cap is {spec.cap}"
        )
    counts = [c.m for c in spec.per_class]
    digits = np.unravel_index(np.arange(total), counts)
    # chosen[j] has shape (total, n): values of the j-th class under each tuple
    chosen = [spec.per_class[j].values[digits[j]] for j in range(k)]
    stacked = np.stack(chosen)  # (k, total, n)
    out = np.empty((total, n), dtype=np.float64)
    for i in range(n):
        y = labs[i] - 1
        col = stacked[:, :, i]
        others = np.delete(col, y, axis=0)
        out[:, i] = col[y] - others.max(axis=0)
    return TabulatedClass(out)


def verify_lemma1(spec: MarginClassSpec, labels) -> Lemma1Report:
    """Exact check of R_hat_n(M_k) <= sum_j R_hat_n(F_j) + 1e-12.

    Both sides are computed by full sign enumeration; the inequality holds
    for every sample, so a failure indicates an implementation bug.
    """
    n = spec.n
    if n > EXACT_ENUMERATION_CAP:
        raise CapExceeded(f"n={n} exceeds the exact-enumeration cap")
    mclass = materialize_margin_class(spec, labels)
    lhs = exact_empirical_rademacher(TabulatedSupOracle(mclass), n).value
    per_class = tuple(
        exact_empirical_rademacher(TabulatedSupOracle(c), n).value
        for c in spec.per_class
    )
    rhs = math.fsum(per_class)
    return Lemma1Report(lhs=lhs, rhs=rhs, per_class=per_class, passed=lhs <= rhs + 1e-12)


def random_margin_instance(
    seed: int,
    max_k: int = 3,
    max_n: int = 8,
    max_class_size: int = 4,
    values: Sequence[float] = (-1.0, 0.0, 1.0),
) -> tuple[MarginClassSpec, np.ndarray]:
    """Random small margin-class instance for sweep-style verification."""
    if max_k < 2 or max_n < 1 or max_class_size < 1:
        raise ValueError("need max_k >= 2, max_n >= 1, max_class_size >= 1")
    rng = np.random.Generator(np.random.Philox(key=seed))
    k = int(rng.integers(2, max_k + 1))
    n = int(rng.integers(1, max_n + 1))
    pool = np.asarray(list(values), dtype=np.float64)
    classes = tuple(
        TabulatedClass(pool[rng.integers(0, pool.size, size=(int(rng.integers(1, max_class_size + 1)), n))])
        for _ in range(k)
    )
    labels = rng.integers(1, k + 1, size=n)
    return MarginClassSpec(classes), labels


def lemma1_sweep(
    seeds: int,
    max_k: int = 3,
    max_n: int = 8,
    max_class_size: int = 4,
    values: Sequence[float] = (-1.0, 0.0, 1.0),
    base_seed: int = 0,
) -> dict:
    """Run verify_lemma1 on `seeds` random instances; report any failures."""
    if seeds < 1:
        raise ValueError("seeds must be >= 1")
    failures = []
    worst_slack = -math.inf
    for s in range(seeds):
        spec, labels = random_margin_instance(
            base_seed + s, max_k=max_k, max_n=max_n, max_class_size=max_class_size, values=values
        )
        rep = verify_lemma1(spec, labels)
        worst_slack = max(worst_slack, rep.lhs - rep.rhs)
        if not rep.passed:
            failures.append({"seed": base_seed + s, "lhs": rep.lhs, "rhs": rep.rhs})
    return {
        "instances": seeds,
        "failures": failures,
        "worst_slack": worst_slack,
        "pass": not failures,
    }
