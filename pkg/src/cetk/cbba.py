"""Complex basic belief assignments and their pointwise quantities."""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Union

import numpy as np

from .errors import DegenerateMass, FrameMismatch, InvalidCBBA, InvalidDocument, ZeroPhaseUndefined
from .frame import FocalSet, Frame, popcount

DEFAULT_TOLERANCE = 1e-9

Key = Union[int, FocalSet, Iterable[str], str]


def default_tolerance() -> float:
    """Sum-to-one tolerance; ``CET_TOLERANCE`` in the environment overrides it."""
    raw = os.environ.get("CET_TOLERANCE")
    if raw:
        try:
            value = float(raw)
        except ValueError:
            raise InvalidDocument(f"CET_TOLERANCE={raw!r} is not a number") from None
        if not value > 0:
            raise InvalidDocument("CET_TOLERANCE must be positive")
        return value
    return DEFAULT_TOLERANCE


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    violation: str | None = None
    residual: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


class CBBA:
    """Complex mass function over a frame.

    Masses live in a read-only mapping from subset bitmask to ``complex``;
    zero masses are not stored.  ``check`` selects what the constructor
    enforces: ``"full"`` (empty set, sum and magnitude bound), ``"sum"``
    (empty set and sum only, the default, since these are what every
    transform conserves) or ``"none"`` for diagnostic loading.
    """

    __slots__ = ("_frame", "_masses")

    def __init__(self, frame: Frame, masses: Mapping[Key, complex] | Iterable[tuple[Key, complex]],
                 *, check: str = "sum", tol: float | None = None):
        self._frame = frame
        items = masses.items() if isinstance(masses, Mapping) else masses
        store: dict[int, complex] = {}
        for key, value in items:
            bits = _to_mask(frame, key)
            z = complex(value)
            if z != 0:
                store[bits] = store.get(bits, 0j) + z
        self._masses = MappingProxyType(dict(sorted(store.items())))
        if check != "none":
            report = validate(self, tol)
            if not report.ok and (check == "full" or report.violation != "MagnitudeViolation"):
                raise InvalidCBBA(
                    f"{report.violation}: residual {report.residual:.3g}", report
                )

    @classmethod
    def from_sets(cls, frame: Frame, pairs: Iterable[tuple[Iterable[str] | str, complex]], **kw) -> "CBBA":
        return cls(frame, [(frame.mask(labels), z) for labels, z in pairs], **kw)

    @property
    def frame(self) -> Frame:
        return self._frame

    @property
    def masses(self) -> Mapping[int, complex]:
        return self._masses

    def __getitem__(self, key: Key) -> complex:
        return self._masses.get(_to_mask(self._frame, key), 0j)

    def __iter__(self) -> Iterator[int]:
        return iter(self._masses)

    def __len__(self) -> int:
        return len(self._masses)

    def items(self):
        return self._masses.items()

    def focal_sets(self) -> list[FocalSet]:
        return [FocalSet(b, self._frame) for b in self._masses]

    def total(self) -> complex:
        return complex(math.fsum(z.real for z in self._masses.values()),
                       math.fsum(z.imag for z in self._masses.values()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CBBA):
            return NotImplemented
        return self._frame == other._frame and dict(self._masses) == dict(other._masses)

    def __hash__(self):
        return hash((self._frame, tuple(self._masses.items())))

    def __repr__(self) -> str:
        body = ", ".join(
            "{" + ",".join(self._frame.labels_of(b)) + f"}}: {z:.4g}" for b, z in self._masses.items()
        )
        return f"CBBA({body})"


def _to_mask(frame: Frame, key: Key) -> int:
    if isinstance(key, FocalSet):
        if key.frame != frame:
            raise FrameMismatch("focal set belongs to a different frame")
        return key.bits
    if isinstance(key, (int, np.integer)):
        bits = int(key)
        if bits < 0 or bits & ~frame.full:
            raise InvalidDocument(f"mask {bits:#x} outside the frame")
        return bits
    return frame.mask(key)


def validate(c: CBBA, tol: float | None = None) -> ValidityReport:
    """Check the CBBA invariants in order: empty set, sum to one, magnitude bound."""
    tol = default_tolerance() if tol is None else tol
    empty = abs(c.masses.get(0, 0j))
    if empty > 0:
        return ValidityReport(False, "EmptySetMass", empty)
    residual = abs(c.total() - 1)
    if residual > tol:
        return ValidityReport(False, "SumViolation", residual)
    worst = max((abs(z) for z in c.masses.values()), default=0.0)
    if worst > 1 + tol:
        return ValidityReport(False, "MagnitudeViolation", worst - 1)
    return ValidityReport(True)


def magnitude(z: complex) -> float:
    return abs(z)


def phase(z: complex) -> float:
    """Argument of ``z`` in (-pi, pi], evaluated case by case on the signs of re/im."""
    u, v = z.real, z.imag
    if u > 0:
        return math.atan(v / u)
    if u == 0:
        if v > 0:
            return math.pi / 2
        if v < 0:
            return -math.pi / 2
        raise ZeroPhaseUndefined("the phase of 0 is undefined")
    if v >= 0:
        return math.atan(v / u) + math.pi
    return math.atan(v / u) - math.pi


def from_euler(m: float, theta: float) -> complex:
    return cmath.rect(m, theta)


def commitments(c: CBBA) -> dict[int, float]:
    """Normalized moduli of every focal mass."""
    mods = {b: abs(z) for b, z in c.items()}
    total = math.fsum(mods.values())
    if total == 0:
        raise DegenerateMass("all masses are zero")
    return {b: m / total for b, m in mods.items()}


def commitment(c: CBBA, a: Key) -> float:
    bits = _to_mask(c.frame, a)
    return commitments(c).get(bits, 0.0)


def interference(c: CBBA, b: Key) -> float:
    """Cross term of the squared modulus of the masses inside ``b``."""
    bits = _to_mask(c.frame, b)
    inside = [z for x, z in c.items() if x & ~bits == 0]
    s = sum(inside, 0j)
    return abs(s) ** 2 - math.fsum(abs(z) ** 2 for z in inside)


def is_bayesian(c: CBBA) -> bool:
    return all(popcount(b) == 1 for b in c.masses)


def is_real(c: CBBA, tol: float | None = None) -> bool:
    tol = default_tolerance() if tol is None else tol
    return all(abs(z.imag) <= tol for z in c.masses.values())


PROFILES = ("real-bayesian", "real-general", "complex-general")


def random_cbba(frame: Frame, seed: int | np.random.Generator | None = None,
                profile: str = "complex-general", max_focal: int | None = None) -> CBBA:
    """Draw a valid CBBA.

    ``real-bayesian`` puts Dirichlet mass on singletons.  The general profiles
    choose between 1 and ``max_focal`` distinct focal sets (all of them by
    default) with Dirichlet real parts; ``complex-general`` adds imaginary
    parts that sum to zero and keep every modulus at most one.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if profile == "real-bayesian":
        weights = rng.dirichlet(np.ones(frame.n))
        return CBBA(frame, {1 << i: float(w) for i, w in enumerate(weights)}, check="full")

    n_sets = frame.full
    cap = n_sets if max_focal is None else min(max_focal, n_sets)
    k = int(rng.integers(1, cap + 1))
    chosen = rng.choice(np.arange(1, n_sets + 1), size=k, replace=False)
    re = rng.dirichlet(np.ones(k))
    im = np.zeros(k)
    if profile == "complex-general" and k > 1:
        raw = rng.uniform(-1.0, 1.0, size=k)
        raw -= raw.mean()
        room = np.sqrt(np.clip(1.0 - re ** 2, 0.0, None))
        with np.errstate(divide="ignore"):
            limits = np.where(np.abs(raw) > 0, room / np.abs(raw), np.inf)
        scale = min(1.0, float(limits.min())) * float(rng.uniform(0.0, 1.0))
        im = raw * scale
        # restore an exact zero sum after scaling
        im[-1] = -math.fsum(im[:-1])
        if abs(complex(re[-1], im[-1])) > 1:
            im[:] = 0.0
    return CBBA(frame, {int(b): complex(r, i) for b, r, i in zip(chosen, re, im)}, check="full")
