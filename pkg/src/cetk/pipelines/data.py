"""Datasets and per-class summary statistics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import EmptyDataset, MissingLabel, NonNumericFeature


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray          # (N, d) float
    labels: np.ndarray            # (N,) int index into ``classes``
    attributes: tuple[str, ...]
    classes: tuple[str, ...]

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features must be (N, d) with one label per row")
        if self.features.shape[1] != len(self.attributes):
            raise ValueError("attribute names do not match the feature width")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= len(self.classes)):
            raise ValueError("labels must index into classes")
        self.features.setflags(write=False)
        self.labels.setflags(write=False)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def records(self) -> list[tuple[np.ndarray, int]]:
        return list(zip(self.features, self.labels.tolist()))


def ingest_csv(path: str | Path, label: str, *, drop: Sequence[str] = ()) -> Dataset:
    """Read a headed CSV; every column except ``label`` (and ``drop``) is a feature.

    Class names are sorted so the class order does not depend on row order.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyDataset(f"{path}: file is empty") from None
        if label not in header:
            raise MissingLabel(f"{path}: no column named {label!r} in header {header}")
        label_col = header.index(label)
        keep = [i for i, h in enumerate(header) if i != label_col and h not in drop]
        rows, raw_labels = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise NonNumericFeature(f"{path}:{line_no}: expected {len(header)} fields, got {len(row)}")
            values = []
            for i in keep:
                try:
                    values.append(float(row[i]))
                except ValueError:
                    raise NonNumericFeature(
                        f"{path}:{line_no}: column {header[i]!r} has non-numeric value {row[i]!r}"
                    ) from None
                if not math.isfinite(values[-1]):
                    raise NonNumericFeature(f"{path}:{line_no}: column {header[i]!r} is not finite")
            rows.append(values)
            raw_labels.append(row[label_col].strip())
    if not rows:
        raise EmptyDataset(f"{path}: no data rows")
    classes = tuple(sorted(set(raw_labels)))
    index = {c: i for i, c in enumerate(classes)}
    return Dataset(
        features=np.array(rows, dtype=float),
        labels=np.array([index[c] for c in raw_labels], dtype=int),
        attributes=tuple(header[i] for i in keep),
        classes=classes,
    )


def write_csv(d: Dataset, path: str | Path, label: str = "label") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([*d.attributes, label])
        for row, y in zip(d.features, d.labels):
            w.writerow([*(repr(float(v)) for v in row), d.classes[y]])


def synthetic_gaussians(n: int = 200, seed: int = 0, *, dims: int = 2, separation: float = 4.0,
                        classes: Sequence[str] = ("A", "B")) -> Dataset:
    """Isotropic unit-variance Gaussian blobs, means ``separation`` apart per axis."""
    rng = np.random.default_rng(seed)
    k = len(classes)
    labels = np.arange(n) % k
    rng.shuffle(labels)
    centers = np.arange(k)[:, None] * separation * np.ones((1, dims))
    features = centers[labels] + rng.standard_normal((n, dims))
    return Dataset(features, labels, tuple(f"f{i + 1}" for i in range(dims)), tuple(classes))


@dataclass(frozen=True)
class ClassStats:
    """Per (class, attribute) sample statistics over a training subset.

    ``m2`` is the sum of squared deviations, kept so that appending one value
    updates the statistics exactly.  ``degenerate`` marks cells with fewer
    than two samples or zero spread.
    """

    count: np.ndarray        # (K,)
    mean: np.ndarray         # (K, d)
    std: np.ndarray          # (K, d), ddof=1; nan when count < 2
    m2: np.ndarray           # (K, d)
    degenerate: np.ndarray   # (K, d) bool
    classes: tuple[str, ...]

    @property
    def undersized(self) -> np.ndarray:
        return self.count < 2


def class_stats(d: Dataset, subset: Sequence[int] | np.ndarray | None = None) -> ClassStats:
    idx = np.arange(len(d)) if subset is None else np.asarray(subset, dtype=int)
    x = d.features[idx]
    y = d.labels[idx]
    k, dims = len(d.classes), x.shape[1]
    count = np.zeros(k, dtype=int)
    mean = np.zeros((k, dims))
    m2 = np.zeros((k, dims))
    std = np.full((k, dims), np.nan)
    for c in range(k):
        rows = x[y == c]
        count[c] = len(rows)
        if len(rows):
            mean[c] = rows.mean(axis=0)
            m2[c] = ((rows - mean[c]) ** 2).sum(axis=0)
        if len(rows) >= 2:
            std[c] = np.sqrt(m2[c] / (len(rows) - 1))
    degenerate = (count[:, None] < 2) | ~(std > 0)
    return ClassStats(count, mean, std, m2, degenerate, d.classes)
