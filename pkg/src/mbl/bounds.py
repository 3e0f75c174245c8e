"""Margin risk bounds and order-term comparisons.

Two bound evaluators are provided.  The grid-minimized bound ("thm1")
evaluates, for margin thresholds delta in (0, 1],

    value(delta) = P_n{m <= delta} + (4k/delta) rad + sqrt(log(log2(2/delta))/n)
                   + t/sqrt(n)

and minimizes over a threshold grid (the default grid is dyadic,
{2^-j : j = 1..ceil(log2 n)} together with 1); the bound fails with
probability at most 2 exp(-2 t^2).  The kernel-class bound ("thm2") is the
fixed-delta form P_n{m <= delta} + (2k/delta) sqrt(R^2 lam^2 / n) + t/sqrt(n)
with failure probability exp(-2 t^2).  Logarithms are natural except the
inner log2.

``table1_term`` evaluates published order terms for comparable multi-class
margin bounds with all constants and polylog factors set to 1; they are
scaling comparisons, not valid numeric bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "METHODS",
    "BoundInput",
    "BoundReport",
    "default_delta_grid",
    "theorem1_bound",
    "theorem2_bound",
    "table1_term",
    "compare_bounds",
]

# Fixed method order for comparison tables.
METHODS = ("kp", "guermeur", "zhang", "crammer_singer", "this_paper")


@dataclass(frozen=True)
class BoundInput:
    """Inputs shared by the grid-minimized bound."""

    k: int
    n: int
    confidence_t: float
    rad_value: float
    margin_cdf: Callable[[float], float]

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.confidence_t > 0:
            raise ValueError("confidence_t must be > 0")
        if self.rad_value < 0:
            raise ValueError("rad_value must be >= 0")


@dataclass(frozen=True)
class BoundReport:
    """A bound value with its additive term breakdown.

    Evaluators construct value as the exactly rounded sum of the terms, so
    the breakdown reproduces the value to within 1e-12 (clamped reports add
    an explicit "clamp" adjustment term to keep the identity).
    """

    method: str
    value: float
    delta_star: float
    terms: dict[str, float]


def default_delta_grid(n: int) -> list[float]:
    """Dyadic grid {2^-j : j = 1..ceil(log2 n)} plus 1.0, ascending."""
    if n < 1:
        raise ValueError("n must be >= 1")
    levels = math.ceil(math.log2(n)) if n > 1 else 0
    grid = [2.0 ** -j for j in range(levels, 0, -1)]
    grid.append(1.0)
    return grid


def _check_delta(delta: float) -> float:
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return float(delta)


def _thm1_terms(inp: BoundInput, delta: float) -> dict[str, float]:
    empirical = float(inp.margin_cdf(delta))
    complexity = (4.0 * inp.k / delta) * inp.rad_value
    loglog = math.sqrt(math.log(math.log2(2.0 / delta)) / inp.n)
    confidence = inp.confidence_t / math.sqrt(inp.n)
    return {
        "empirical": empirical,
        "complexity": complexity,
        "loglog": loglog,
        "confidence": confidence,
    }


def theorem1_bound(
    inp: BoundInput,
    delta_grid: Sequence[float] | None = None,
    clamp: bool = False,
) -> BoundReport:
    """Minimize the four-term margin bound over a threshold grid.

    Ties prefer the smallest delta.  With clamp=True the reported value is
    min(value, 1.0) (the bound is vacuous past 1); the term breakdown is
    always left unclamped, so clamped reports carry a fifth "clamp" term.
    """
    grid = list(delta_grid) if delta_grid is not None else default_delta_grid(inp.n)
    if not grid:
        raise ValueError("delta grid must be nonempty")
    grid = sorted(_check_delta(d) for d in grid)
    best_val = math.inf
    best_delta = grid[0]
    best_terms: dict[str, float] = {}
    for delta in grid:
        terms = _thm1_terms(inp, delta)
        val = math.fsum(terms.values())
        if val < best_val:
            best_val, best_delta, best_terms = val, delta, terms
    if clamp and best_val > 1.0:
        best_terms = dict(best_terms, clamp=1.0 - best_val)
        best_val = 1.0
    return BoundReport(method="thm1", value=best_val, delta_star=best_delta, terms=best_terms)


def theorem2_bound(
    margin_frac: float,
    radius: float,
    lambda_cap: float,
    k: int,
    n: int,
    delta: float,
    confidence_t: float,
) -> BoundReport:
    """Fixed-delta kernel-class bound (no grid minimization).

    value = margin_frac + (2k/delta) sqrt(R^2 lam^2 / n) + t/sqrt(n), as an
    exactly rounded sum of the three terms.
    """
    _check_delta(delta)
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= margin_frac <= 1.0:
        raise ValueError("margin_frac must lie in [0, 1]")
    if radius < 0 or lambda_cap < 0:
        raise ValueError("radius and lambda_cap must be >= 0")
    if not confidence_t > 0:
        raise ValueError("confidence_t must be > 0")
    complexity = (2.0 * k / delta) * math.sqrt(radius * radius * lambda_cap * lambda_cap / n)
    confidence = confidence_t / math.sqrt(n)
    value = math.fsum((margin_frac, complexity, confidence))
    return BoundReport(
        method="thm2",
        value=value,
        delta_star=float(delta),
        terms={"empirical": float(margin_frac), "complexity": complexity, "confidence": confidence},
    )


def table1_term(method: str, k: int, n: int, delta: float) -> float:
    """Order-term value for one method at (k, n, delta), unit constants.

    kp: k^2/(delta sqrt(n)); guermeur: k/(delta^2 sqrt(n));
    zhang: sqrt(k/n)/delta; crammer_singer: k^2/(delta^2 n);
    this_paper: k/(delta sqrt(n)).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_delta(delta)
    root_n = math.sqrt(n)
    if method == "kp":
        return (k * k) / (delta * root_n)
    if method == "guermeur":
        return k / (delta * delta * root_n)
    if method == "zhang":
        return math.sqrt(k / n) / delta
    if method == "crammer_singer":
        return (k * k) / (delta * delta * n)
    return k / (delta * root_n)


def compare_bounds(
    k_list: Sequence[int], n_list: Sequence[int], delta_list: Sequence[float]
) -> list[dict]:
    """Order-term table over a (k, n, delta) grid.

    One row per grid cell per method, in METHODS order, with each row's
    ratio to this_paper at the same cell.
    """
    ks, ns, ds = list(k_list), list(n_list), list(delta_list)
    if not ks or not ns or not ds:
        raise ValueError("comparison grid must be nonempty in k, n, and delta")
    rows = []
    for k in ks:
        for n in ns:
            for delta in ds:
                base = table1_term("this_paper", k, n, delta)
                for method in METHODS:
                    value = table1_term(method, k, n, delta)
                    rows.append(
                        {
                            "method": method,
                            "k": int(k),
                            "n": int(n),
                            "delta": float(delta),
                            "value": value,
                            "ratio_to_this_paper": value / base,
                        }
                    )
    return rows
