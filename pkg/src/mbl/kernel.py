"""Kernel hypothesis classes, Gram matrices, and the norm-ball sup oracle.

For the Euclidean ball {x -> w . Phi(x) : ||w|| <= lam}, the inner supremum
of the Rademacher definition has the closed form

    sup_{||w|| <= lam} (1/n) sum_i eps_i w . Phi(x_i) = (lam/n) sqrt(eps^T G eps)

(Cauchy-Schwarz with equality at the aligned w), where G is the Gram matrix.
Only the 2-norm ball gets an exact oracle; other aggregations are served
through the worst-case surrogate sqrt(R^2 lam^2 / n).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import LabeledDataset

__all__ = [
    "KernelSpec",
    "KernelClass",
    "parse_kernel_spec",
    "gram",
    "check_psd",
    "KernelSupOracle",
    "kernel_sup_oracle",
    "kernel_rad_bounds",
    "write_gram_csv",
    "read_gram_csv",
]

_PSD_TOL_FACTOR = 1e-8


@dataclass(frozen=True)
class KernelSpec:
    """Kernel kind plus parameters: linear, rbf(gamma), poly(degree, coef)."""

    kind: str
    gamma: float = 1.0
    degree: int = 2
    coef: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("linear", "rbf", "poly"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and not self.gamma > 0:
            raise ValueError("rbf kernel needs gamma > 0")
        if self.kind == "poly" and self.degree < 1:
            raise ValueError("poly kernel needs degree >= 1")

    def label(self) -> str:
        if self.kind == "linear":
            return "linear"
        if self.kind == "rbf":
            return f"rbf:gamma={self.gamma!r}"
        return f"poly:degree={self.degree},coef={self.coef!r}"


@dataclass(frozen=True)
class KernelClass:
    """Norm-ball hypothesis class: k score functions w_y . Phi(x), ||W|| <= lam."""

    kernel: KernelSpec
    lambda_cap: float
    k: int
    p: int = 2

    def __post_init__(self) -> None:
        if not self.lambda_cap > 0:
            raise ValueError("lambda_cap must be > 0")
        if self.p != 2:
            raise ValueError("exact oracles exist only for p = 2")


def parse_kernel_spec(text: str) -> KernelSpec:
    """Parse the CLI mini-grammar: linear | rbf:gamma=G | poly:degree=D,coef=C.

    Parameters are parsed with float()/int() exactly as written; poly's coef
    defaults to 1.
    """
    head, _, rest = text.strip().partition(":")
    if head == "linear":
        if rest:
            raise ValueError("linear kernel takes no parameters")
        return KernelSpec(kind="linear")
    params: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq or not key or not val:
                raise ValueError(f"malformed kernel parameter {item!r}")
            if key in params:
                raise ValueError(f"duplicate kernel parameter {key!r}")
            params[key] = val
    if head == "rbf":
        if set(params) != {"gamma"}:
            raise ValueError("rbf kernel needs exactly gamma=<float>")
        return KernelSpec(kind="rbf", gamma=float(params["gamma"]))
    if head == "poly":
        if "degree" not in params or not set(params) <= {"degree", "coef"}:
            raise ValueError("poly kernel needs degree=<int>[,coef=<float>]")
        return KernelSpec(
            kind="poly",
            degree=int(params["degree"]),
            coef=float(params.get("coef", "1")),
        )
    raise ValueError(f"unknown kernel {head!r} (expected linear, rbf, poly)")


def _points(data) -> np.ndarray:
    pts = data.points if isinstance(data, LabeledDataset) else np.asarray(data, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("points must form a nonempty (n, d) array")
    if not np.isfinite(pts).all():
        raise ValueError("points contain non-finite coordinates")
    return pts


def gram(spec: KernelSpec, data) -> np.ndarray:
    """n x n Gram matrix G_ij = K(x_i, x_j), symmetrized exactly.

    linear: x_i . x_j; rbf: exp(-gamma ||x_i - x_j||^2);
    poly: (x_i . x_j + coef)^degree.
    """
    pts = _points(data)
    if spec.kind == "rbf":
        diff = pts[:, None, :] - pts[None, :, :]
        sq = np.einsum("ijd,ijd->ij", diff, diff)
        g = np.exp(-spec.gamma * sq)
    else:
        dots = pts @ pts.T
        if spec.kind == "linear":
            g = dots
        else:
            g = (dots + spec.coef) ** spec.degree
    if not np.isfinite(g).all():
        raise ValueError("gram matrix has non-finite entries")
    # (g + g.T)/2 is exactly symmetric in IEEE arithmetic.
    return (g + g.T) / 2.0


def check_psd(g: np.ndarray, tol_factor: float = _PSD_TOL_FACTOR) -> float:
    """Validate G is PSD up to rounding; returns the smallest eigenvalue.

    Tolerance: min eigenvalue >= -tol_factor * trace(G).
    """
    g = np.asarray(g, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("gram matrix must be square")
    eigs = np.linalg.eigvalsh(g)
    lo = float(eigs[0])
    tr = float(np.trace(g))
    if lo < -tol_factor * max(tr, 0.0):
        raise ValueError(
            f"gram matrix is not PSD within tolerance: min eig {lo:.3e}, trace {tr:.3e}"
        )
    return lo


class KernelSupOracle:
    """SupOracle for the 2-norm ball: query = (lam/n) sqrt(max(eps^T G eps, 0))."""

    def __init__(self, g: np.ndarray, lambda_cap: float, validate: bool = True):
        g = np.asarray(g, dtype=np.float64)
        if lambda_cap < 0:
            raise ValueError("lambda_cap must be >= 0")
        if validate:
            check_psd(g)
        self.g = g
        self.lambda_cap = float(lambda_cap)
        self.n = g.shape[0]

    def query(self, signs) -> float:
        s = np.asarray(signs, dtype=np.float64)
        if s.shape != (self.n,):
            raise ValueError(f"sign vector length {s.shape} != n={self.n}")
        quad = float(s @ self.g @ s)
        return self.lambda_cap / self.n * math.sqrt(max(quad, 0.0))

    def query_block(self, signs_block: np.ndarray) -> np.ndarray:
        s = signs_block.astype(np.float64)
        quad = np.einsum("ti,ij,tj->t", s, self.g, s, optimize=True)
        return self.lambda_cap / self.n * np.sqrt(np.maximum(quad, 0.0))


def kernel_sup_oracle(g: np.ndarray, lambda_cap: float, signs) -> float:
    """One-shot form of KernelSupOracle.query (validates PSD each call)."""
    return KernelSupOracle(g, lambda_cap).query(signs)


def kernel_rad_bounds(
    g: np.ndarray, lambda_cap: float
) -> tuple[float, Callable[[float], float]]:
    """Complexity bounds for the norm-ball class on this sample.

    Returns (data_dependent, worst_case) where
    data_dependent = lam sqrt(trace G) / n (Jensen on the exact sup) and
    worst_case(R) = sqrt(R^2 lam^2 / n), valid whenever G_ii <= R^2 for all i;
    data_dependent <= worst_case(R) holds under that same condition.
    """
    g = np.asarray(g, dtype=np.float64)
    check_psd(g)
    n = g.shape[0]
    data_dependent = lambda_cap * math.sqrt(max(float(np.trace(g)), 0.0)) / n

    def worst_case(radius: float) -> float:
        return math.sqrt(radius * radius * lambda_cap * lambda_cap / n)

    return data_dependent, worst_case


def write_gram_csv(g: np.ndarray, path) -> None:
    """Row-major CSV, no header, 17 significant digits per entry."""
    g = np.asarray(g, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in g:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_gram_csv(path) -> np.ndarray:
    """Read a headerless numeric CSV matrix (inverse of write_gram_csv)."""
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(cell) for cell in line.split(",")])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: non-numeric cell ({exc})") from None
            if len(rows) > 1 and len(rows[-1]) != len(rows[0]):
                raise ValueError(f"line {lineno}: ragged row")
    if not rows:
        raise ValueError("empty matrix file")
    return np.asarray(rows, dtype=np.float64)
