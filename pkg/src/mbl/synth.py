"""Synthetic data generators, a small one-vs-all ridge scorer, and CSV IO.

Two generators: ``uniform_interval`` draws scalar points uniformly on
[1, k+1] with labels either all equal to k+1 (the single-class law the
lower-bound experiment needs, the default) or uniform over [1, k];
``gaussian_blobs`` places k fixed centers (spacing 2 on a line for d=1, on
a radius-2 circle in the first two coordinates otherwise) and adds
spread-scaled Gaussian noise.  Generation is a pure function of (spec,
seed) via a counter-based generator.

The ridge scorer exists so the bound evaluators have realistic score
matrices and norm caps to work with; it is one-vs-all kernel ridge
regression with +1/-1 targets, returning in-sample scores and the fitted
per-class coefficient norms.

CSV formats (UTF-8, comma-separated, LF endings, floats with 17
significant digits so doubles round-trip exactly):

    dataset  header ``x_id,f1,...,fd,y``
    scores   header ``x_id,score_1,...,score_k``
    labels   header ``x_id,y``
    class    no header; one function per row, one column per sample point

Malformed files are reported with 1-based line numbers.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset, TabulatedClass
from .kernel import KernelSpec, gram
from .margin import ScoreMatrix

__all__ = [
    "GeneratorSpec",
    "generate",
    "train_ova_ridge",
    "write_dataset_csv",
    "read_dataset_csv",
    "write_scores_csv",
    "read_scores_csv",
    "write_labels_csv",
    "read_labels_csv",
    "read_tabulated_csv",
]

_KINDS = ("uniform_interval", "gaussian_blobs")
_LABEL_MODES = ("single", "uniform")


@dataclass(frozen=True)
class GeneratorSpec:
    """Distribution parameters for `generate`.

    ``labels_mode`` applies to uniform_interval only: "single" concentrates
    every label on class k+1 (so the dataset has k+1 classes), "uniform"
    draws labels uniformly from [1, k].  Blob labels are always uniform.
    """

    kind: str
    k: int
    n: int
    seed: int
    d: int = 1
    spread: float = 1.0
    labels_mode: str = "single"

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.kind == "uniform_interval" and self.d != 1:
            raise ValueError("uniform_interval points are scalar; d must be 1")
        if not self.spread >= 0.0:
            raise ValueError("spread must be >= 0")
        if self.labels_mode not in _LABEL_MODES:
            raise ValueError(f"labels_mode must be one of {_LABEL_MODES}")


def _blob_centers(k: int, d: int) -> np.ndarray:
    centers = np.zeros((k, d))
    if d == 1:
        centers[:, 0] = 2.0 * np.arange(k)
    else:
        angles = 2.0 * np.pi * np.arange(k) / k
        centers[:, 0] = 2.0 * np.cos(angles)
        centers[:, 1] = 2.0 * np.sin(angles)
    return centers


def generate(spec: GeneratorSpec) -> LabeledDataset:
    """Draw a dataset; a pure function of the spec (including its seed)."""
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    if spec.kind == "uniform_interval":
        points = 1.0 + spec.k * rng.random(spec.n)
        if spec.labels_mode == "single":
            labels = np.full(spec.n, spec.k + 1, dtype=np.int64)
            return LabeledDataset(points[:, None], labels, spec.k + 1)
        labels = rng.integers(1, spec.k + 1, size=spec.n)
        return LabeledDataset(points[:, None], labels, spec.k)
    labels = rng.integers(1, spec.k + 1, size=spec.n)
    noise = rng.standard_normal((spec.n, spec.d))
    points = _blob_centers(spec.k, spec.d)[labels - 1] + spec.spread * noise
    return LabeledDataset(points, labels, spec.k)


def train_ova_ridge(
    dataset: LabeledDataset, kernel: KernelSpec, reg: float
) -> tuple[ScoreMatrix, np.ndarray]:
    """One-vs-all kernel ridge fit; returns in-sample scores and norms.

    Class y is fit against targets +1 (label y) / -1 (rest) by solving
    (G + reg I) alpha = targets; scores are G alpha and the returned norms
    are the per-class coefficient norms sqrt(alpha' G alpha), suitable as a
    norm cap covering the fitted scorer.
    """
    if reg <= 0.0:
        raise ValueError("reg must be > 0")
    if dataset.n < dataset.k:
        raise ValueError(f"need n >= k, got n={dataset.n} < k={dataset.k}")
    g = gram(kernel, dataset.points)
    targets = np.where(
        dataset.labels[:, None] == np.arange(1, dataset.k + 1)[None, :], 1.0, -1.0
    )
    system = g + reg * np.eye(dataset.n)
    try:
        alphas = np.linalg.solve(system, targets)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"ridge system is singular (reg too small): {exc}") from exc
    if not np.all(np.isfinite(alphas)):
        raise ValueError("ridge system is numerically singular (reg too small)")
    scores = g @ alphas
    norms = np.sqrt(np.maximum(np.einsum("ny,nm,my->y", alphas, g, alphas), 0.0))
    return ScoreMatrix(scores), norms


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _open_write(path):
    return open(path, "w", encoding="utf-8", newline="")


def _writer(handle):
    return csv.writer(handle, lineterminator="\n")


def _rows_of(path) -> list[tuple[int, list[str]]]:
    """All CSV rows with their 1-based line numbers, blank lines skipped."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return [(i, row) for i, row in enumerate(csv.reader(handle), start=1) if row]


def _parse_float(cell: str, line: int, column: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ValueError(f"line {line}: non-numeric value {cell!r} in column {column}") from None


def _parse_int(cell: str, line: int, column: str) -> int:
    try:
        return int(cell)
    except ValueError:
        raise ValueError(f"line {line}: non-integer value {cell!r} in column {column}") from None


def _check_header(got: list[str], want: list[str], path) -> None:
    if got != want:
        raise ValueError(f"{path}: line 1: expected header {','.join(want)}, got {','.join(got)}")


def write_dataset_csv(dataset: LabeledDataset, path) -> None:
    with _open_write(path) as handle:
        out = _writer(handle)
        out.writerow(["x_id"] + [f"f{i}" for i in range(1, dataset.d + 1)] + ["y"])
        for i in range(dataset.n):
            row = [str(i + 1)]
            row += [_fmt(v) for v in dataset.points[i]]
            row.append(str(int(dataset.labels[i])))
            out.writerow(row)


def read_dataset_csv(path) -> LabeledDataset:
    rows = _rows_of(path)
    if not rows:
        raise ValueError(f"{path}: empty file")
    _, header = rows[0]
    if len(header) < 3 or header[0] != "x_id" or header[-1] != "y":
        raise ValueError(
            f"{path}: line 1: expected header x_id,f1,...,fd,y (missing x_id or label column y)"
        )
    d = len(header) - 2
    _check_header(header, ["x_id"] + [f"f{i}" for i in range(1, d + 1)] + ["y"], path)
    if len(rows) == 1:
        raise ValueError(f"{path}: no data rows")
    points = np.empty((len(rows) - 1, d))
    labels = np.empty(len(rows) - 1, dtype=np.int64)
    for r, (line, row) in enumerate(rows[1:]):
        if len(row) != d + 2:
            raise ValueError(f"{path}: line {line}: expected {d + 2} fields, got {len(row)}")
        _parse_int(row[0], line, "x_id")
        for c in range(d):
            points[r, c] = _parse_float(row[1 + c], line, f"f{c + 1}")
        labels[r] = _parse_int(row[-1], line, "y")
        if labels[r] < 1:
            raise ValueError(f"{path}: line {line}: label must be >= 1, got {labels[r]}")
    if not np.all(np.isfinite(points)):
        raise ValueError(f"{path}: non-finite feature values")
    return LabeledDataset(points, labels, int(labels.max()))


def write_scores_csv(scores: ScoreMatrix, path) -> None:
    with _open_write(path) as handle:
        out = _writer(handle)
        out.writerow(["x_id"] + [f"score_{y}" for y in range(1, scores.k + 1)])
        for i in range(scores.n):
            out.writerow([str(i + 1)] + [_fmt(v) for v in scores.scores[i]])


def read_scores_csv(path) -> ScoreMatrix:
    rows = _rows_of(path)
    if not rows:
        raise ValueError(f"{path}: empty file")
    _, header = rows[0]
    if len(header) < 3 or header[0] != "x_id":
        raise ValueError(f"{path}: line 1: expected header x_id,score_1,...,score_k")
    k = len(header) - 1
    _check_header(header, ["x_id"] + [f"score_{y}" for y in range(1, k + 1)], path)
    if len(rows) == 1:
        raise ValueError(f"{path}: no data rows")
    values = np.empty((len(rows) - 1, k))
    for r, (line, row) in enumerate(rows[1:]):
        if len(row) != k + 1:
            raise ValueError(f"{path}: line {line}: expected {k + 1} fields, got {len(row)}")
        _parse_int(row[0], line, "x_id")
        for c in range(k):
            values[r, c] = _parse_float(row[1 + c], line, f"score_{c + 1}")
    return ScoreMatrix(values)


def write_labels_csv(labels, path) -> None:
    arr = np.asarray(labels, dtype=np.int64)
    with _open_write(path) as handle:
        out = _writer(handle)
        out.writerow(["x_id", "y"])
        for i, y in enumerate(arr):
            out.writerow([str(i + 1), str(int(y))])


def read_labels_csv(path) -> np.ndarray:
    rows = _rows_of(path)
    if not rows:
        raise ValueError(f"{path}: empty file")
    _, header = rows[0]
    _check_header(header, ["x_id", "y"], path)
    if len(rows) == 1:
        raise ValueError(f"{path}: no data rows")
    labels = np.empty(len(rows) - 1, dtype=np.int64)
    for r, (line, row) in enumerate(rows[1:]):
        if len(row) != 2:
            raise ValueError(f"{path}: line {line}: expected 2 fields, got {len(row)}")
        _parse_int(row[0], line, "x_id")
        labels[r] = _parse_int(row[1], line, "y")
    return labels


def read_tabulated_csv(path) -> TabulatedClass:
    """Headerless matrix: one function per row, one sample point per column."""
    rows = _rows_of(path)
    if not rows:
        raise ValueError(f"{path}: empty file")
    width = len(rows[0][1])
    values = np.empty((len(rows), width))
    for r, (line, row) in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{path}: line {line}: expected {width} fields, got {len(row)}")
        for c in range(width):
            values[r, c] = _parse_float(row[c], line, f"column {c + 1}")
    return TabulatedClass(values)
