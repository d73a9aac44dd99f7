"""Entropy-change pattern classifier.

Each (sample, attribute) pair yields a CBBA over the class frame: appending
the sample value to a class's training values shifts that class's mean by
``Δμ`` and standard deviation by ``Δδ``, and the class receives the mass
``exp(-|Δδ|) · exp(i|Δμ|)`` before the masses are normalized to sum to one.

Scoring a sample against class ``k`` uses the hypothesis CBBA in which only
class ``k`` receives the sample; every other class is unchanged and so gets
``exp(0) = 1``.  The training stage keeps, per (class, attribute), the member
whose hypothesis-CBBA entropy is closest in total to its classmates'; a test
sample goes to the class whose kept entropies it matches best.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Callable, Sequence

import numpy as np

from ..cbba import CBBA, default_tolerance
from ..entropies import measure
from ..errors import DegenerateStats, TotalConflict
from ..frame import Frame
from ..transforms import combine
from .data import ClassStats, Dataset, class_stats

AGGREGATIONS = ("sum", "combine")


@lru_cache(maxsize=64)
def class_frame(classes: tuple[str, ...]) -> Frame:
    return Frame(classes)


def appended_shift(stats: ClassStats, cls: int, attr: int, value: float) -> tuple[float, float]:
    """(Δμ, Δδ) when ``value`` joins class ``cls`` on attribute ``attr``."""
    n = int(stats.count[cls])
    if n < 2:
        raise DegenerateStats(f"class {stats.classes[cls]!r} has {n} training samples; need 2")
    mean = stats.mean[cls, attr]
    new_mean = mean + (value - mean) / (n + 1)
    new_m2 = stats.m2[cls, attr] + (value - mean) * (value - new_mean)
    new_std = math.sqrt(new_m2 / n)
    return float(new_mean - mean), float(new_std - stats.std[cls, attr])


def _normalized(frame: Frame, raw: list[complex]) -> CBBA:
    total = sum(raw, 0j)
    tol = default_tolerance()
    if abs(total) < 1e-12:
        raise DegenerateStats("class masses cancel out; cannot normalize")
    masses = [z / total for z in raw]
    if max(abs(z) for z in masses) > 1 + tol:
        raise DegenerateStats("normalized class mass exceeds modulus 1")
    return CBBA(frame, {1 << i: z for i, z in enumerate(masses)})


def cbba_from_sample(x: Sequence[float], stats: ClassStats, attr: int,
                     hypothesis: int | None = None) -> CBBA:
    """CBBA over the classes for one attribute of sample ``x``.

    With ``hypothesis=None`` the sample is appended to every class in turn;
    with ``hypothesis=k`` only class ``k`` receives it.
    """
    frame = class_frame(stats.classes)
    value = float(x[attr])
    raw = []
    for cls in range(len(stats.classes)):
        if hypothesis is None or cls == hypothesis:
            d_mean, d_std = appended_shift(stats, cls, attr, value)
            raw.append(cmath.rect(math.exp(-abs(d_std)), abs(d_mean)))
        else:
            raw.append(1 + 0j)
    return _normalized(frame, raw)


@dataclass(frozen=True)
class OptimalMass:
    cls: int
    attr: int
    member: int          # dataset row of the winning training sample
    cbba: CBBA
    entropy: float
    score: float         # summed |ΔE| against the other members


def _select(energies: np.ndarray) -> tuple[int, np.ndarray]:
    scores = np.abs(energies[:, None] - energies[None, :]).sum(axis=1)
    return int(np.argmin(scores)), scores


def select_optimal_mass(d: Dataset, cls: int, attr: int, entropy: str = "fcb",
                        subset: Sequence[int] | None = None,
                        stats: ClassStats | None = None) -> OptimalMass:
    """Pick the class member whose entropy differs least, in total, from the rest.

    Ties go to the lowest dataset row.  Members whose CBBA cannot be
    normalized are skipped.
    """
    idx = np.arange(len(d)) if subset is None else np.sort(np.asarray(subset, dtype=int))
    stats = stats or class_stats(d, idx)
    if stats.count[cls] < 2:
        raise DegenerateStats(f"class {d.classes[cls]!r} needs at least 2 training members")
    fn = measure(entropy)
    members, cbbas, energies = [], [], []
    for row in idx[d.labels[idx] == cls]:
        try:
            c = cbba_from_sample(d.features[row], stats, attr, hypothesis=cls)
        except DegenerateStats:
            continue
        members.append(int(row))
        cbbas.append(c)
        energies.append(float(fn(c)))
    if not members:
        raise DegenerateStats(f"no usable member of class {d.classes[cls]!r} on attribute {attr}")
    best, scores = _select(np.array(energies))
    return OptimalMass(cls, attr, members[best], cbbas[best], energies[best], float(scores[best]))


@dataclass(frozen=True)
class FittedClassifier:
    stats: ClassStats
    entropy: str
    aggregation: str
    optimal: dict[tuple[int, int], OptimalMass]
    attributes: tuple[int, ...]   # attributes with an optimal mass for every class

    @property
    def n_classes(self) -> int:
        return len(self.stats.classes)


def fit(d: Dataset, subset: Sequence[int] | None = None, entropy: str = "fcb",
        aggregation: str = "sum") -> FittedClassifier:
    if aggregation not in AGGREGATIONS:
        raise ValueError(f"aggregation must be one of {AGGREGATIONS}")
    idx = np.arange(len(d)) if subset is None else np.sort(np.asarray(subset, dtype=int))
    stats = class_stats(d, idx)
    for cls, n in enumerate(stats.count):
        if n < 2:
            raise DegenerateStats(f"class {d.classes[cls]!r} has {n} training samples; need 2")
    optimal: dict[tuple[int, int], OptimalMass] = {}
    usable = []
    for attr in range(len(d.attributes)):
        try:
            picks = {cls: select_optimal_mass(d, cls, attr, entropy, idx, stats)
                     for cls in range(len(d.classes))}
        except DegenerateStats:
            continue
        usable.append(attr)
        optimal.update({(cls, attr): om for cls, om in picks.items()})
    return FittedClassifier(stats, entropy, aggregation, optimal, tuple(usable))


def _fold(cbbas: list[CBBA]) -> CBBA:
    return reduce(lambda a, b: combine(a, b)[0], cbbas)


def class_distances(x: Sequence[float], model: FittedClassifier) -> np.ndarray:
    """Aggregated entropy difference between ``x`` and each class; inf when unusable."""
    fn = measure(model.entropy)
    k = model.n_classes
    per_attr: list[list[CBBA]] = []
    attrs = []
    for attr in model.attributes:
        try:
            per_attr.append([cbba_from_sample(x, model.stats, attr, hypothesis=c) for c in range(k)])
        except DegenerateStats:
            # dropped for every class so the comparison stays like-for-like
            continue
        attrs.append(attr)
    if not attrs:
        return np.full(k, np.inf)
    dist = np.zeros(k)
    if model.aggregation == "sum":
        for attr, row in zip(attrs, per_attr):
            for c in range(k):
                dist[c] += abs(model.optimal[c, attr].entropy - float(fn(row[c])))
        return dist
    for c in range(k):
        try:
            ref = _fold([model.optimal[c, a].cbba for a in attrs])
            obs = _fold([row[c] for row in per_attr])
        except TotalConflict:
            dist[c] = np.inf
            continue
        dist[c] = abs(float(fn(ref)) - float(fn(obs)))
    return dist


def classify(x: Sequence[float], model: FittedClassifier) -> int:
    """Class with the smallest entropy difference; ties go to the lowest class index, -1 if none usable."""
    dist = class_distances(x, model)
    if not np.isfinite(dist).any():
        return -1
    return int(np.argmin(dist))


def predict(model: FittedClassifier, features: np.ndarray) -> np.ndarray:
    return np.array([classify(x, model) for x in features], dtype=int)


@dataclass(frozen=True)
class SweepRow:
    ratio: float
    method: str
    accuracy: float | None
    n_train: int
    n_test: int


def split_indices(n: int, seed: int, test_fraction: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Fixed (test, pool) split; training sets are prefixes of ``pool``."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie in (0, 1)")
    perm = np.random.default_rng(seed).permutation(n)
    n_test = max(1, int(round(test_fraction * n)))
    return perm[:n_test], perm[n_test:]


def train_subset(pool: np.ndarray, ratio: float) -> np.ndarray:
    return pool[: max(1, int(round(ratio * len(pool))))]


def accuracy_sweep(d: Dataset, ratios: Sequence[float], methods: Sequence[str], seed: int = 0,
                   test_fraction: float = 0.5, aggregation: str = "sum",
                   progress: Callable[[float], None] | None = None) -> list[SweepRow]:
    """Accuracy per (training ratio, entropy method) on one fixed test set.

    A ratio whose training prefix leaves some class with fewer than two
    members is recorded with ``accuracy=None``.
    """
    for r in ratios:
        if not 0 < r < 1:
            raise ValueError(f"ratio {r} outside (0, 1)")
    for m in methods:
        measure(m)
    test, pool = split_indices(len(d), seed, test_fraction)
    truth = d.labels[test]
    rows = []
    for ratio in ratios:
        train = train_subset(pool, ratio)
        for method in methods:
            try:
                model = fit(d, train, method, aggregation)
            except DegenerateStats:
                rows.append(SweepRow(float(ratio), method, None, len(train), len(test)))
                continue
            pred = predict(model, d.features[test])
            rows.append(SweepRow(float(ratio), method, float(np.mean(pred == truth)), len(train), len(test)))
        if progress:
            progress(ratio)
    return rows
