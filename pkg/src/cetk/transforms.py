"""CBBA-to-CBBA and CBBA-to-distribution transformations."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .cbba import CBBA
from .errors import DegenerateMass, FrameMismatch, InvalidSpeed, NonProductFocal, TotalConflict
from .frame import Frame, popcount, product_frame, rectangle, split_rectangle, submasks

CONFLICT_EPS = 1e-12


@dataclass(frozen=True)
class FCBBA:
    """Fractal-redistributed masses; keys are subset bitmasks."""

    frame: Frame
    masses: Mapping[int, complex]

    def __getitem__(self, key) -> complex:
        bits = key if isinstance(key, int) else self.frame.mask(key)
        return self.masses.get(bits, 0j)

    def total(self) -> complex:
        return sum(self.masses.values(), 0j)


def cpbt(c: CBBA) -> dict[str, complex]:
    """Complex pignistic transform: each mass shared equally by its elements."""
    frame = c.frame
    out = [0j] * frame.n
    for bits, z in c.items():
        share = z / popcount(bits)
        for i in range(frame.n):
            if bits >> i & 1:
                out[i] += share
    return dict(zip(frame.labels, out))


def cpbt_iterate(c: CBBA, p: float, steps: int) -> list[CBBA]:
    """Time-stepped pignistic redistribution; element ``t`` is the state after ``t`` steps.

    Each step, every multi-element focal set ``A`` passes ``M(A)/p`` to each of
    its singletons and keeps ``(1 - |A|/p) M(A)``.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    widest = max((popcount(b) for b in c.masses), default=1)
    if widest > 1 and p <= widest:
        raise InvalidSpeed(f"allocation speed p={p} must exceed the largest focal size {widest}")
    states = [c]
    current = dict(c.masses)
    for _ in range(steps):
        nxt: dict[int, complex] = {}
        for bits, z in current.items():
            size = popcount(bits)
            if size == 1:
                nxt[bits] = nxt.get(bits, 0j) + z
                continue
            nxt[bits] = nxt.get(bits, 0j) + z * (1 - size / p)
            share = z / p
            for i in range(c.frame.n):
                if bits >> i & 1:
                    nxt[1 << i] = nxt.get(1 << i, 0j) + share
        current = nxt
        states.append(CBBA(c.frame, current))
    return states


def fcbba(c: CBBA) -> FCBBA:
    """Fractal redistribution: every focal mass is spread evenly over its nonempty subsets.

    On product frames the spread follows the product structure: a product set
    ``B × C`` is shared by the ``(2^|B|-1)(2^|C|-1)`` product subsets it contains.
    """
    if c.frame.factors is not None:
        return _product_fcbba(c)
    out: dict[int, complex] = {}
    for bits, z in c.items():
        share = z / ((1 << popcount(bits)) - 1)
        for sub in submasks(bits):
            out[sub] = out.get(sub, 0j) + share
    return FCBBA(c.frame, MappingProxyType(dict(sorted(out.items()))))


def _product_fcbba(c: CBBA) -> FCBBA:
    frame = c.frame
    out: dict[int, complex] = {}
    for bits, z in c.items():
        parts = split_rectangle(frame, bits)
        if parts is None:
            raise NonProductFocal(
                f"focal set {frame.labels_of(bits)} is not a product of factor subsets"
            )
        rows, cols = parts
        share = z / (((1 << popcount(rows)) - 1) * ((1 << popcount(cols)) - 1))
        for r in submasks(rows):
            for q in submasks(cols):
                key = rectangle(frame, r, q)
                out[key] = out.get(key, 0j) + share
    return FCBBA(frame, MappingProxyType(dict(sorted(out.items()))))


def exp_negation(c: CBBA, include_empty: bool = True) -> CBBA:
    """Exponential negation.

    ``B`` runs over every subset other than the full frame, zero-mass ones
    included; ``include_empty=False`` also drops ``B = ∅``.
    """
    frame = c.frame
    full = frame.full
    subsets = np.arange(0, full + 1)
    b_sets = subsets[subsets != full]
    if not include_empty:
        b_sets = b_sets[b_sets != 0]
    mass_b = np.array([c.masses.get(int(b), 0j) for b in b_sets], dtype=complex)
    b_comp = full & ~b_sets
    numer = {}
    for a in range(1, full + 1):
        overlap = _popcount_vec(a & b_comp)
        numer[a] = np.exp(-mass_b * overlap).sum()
    denom = sum(numer.values())
    if len(b_sets) == 0:
        # one-element frame without the empty set: nothing to negate, all mass stays on Θ
        return CBBA(frame, {full: 1})
    if abs(denom) < CONFLICT_EPS:
        raise DegenerateMass("negation weights cancel out; cannot normalize")
    return CBBA(frame, {a: v / denom for a, v in numer.items()})


def _popcount_vec(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.int64)
    count = np.zeros_like(x)
    while np.any(x):
        count += x & 1
        x = x >> 1
    return count


def combine(a: CBBA, b: CBBA) -> tuple[CBBA, complex]:
    """Complex conjunctive combination normalized by ``1 - K``."""
    if a.frame != b.frame:
        raise FrameMismatch("cannot combine CBBAs on different frames")
    joint: dict[int, complex] = {}
    conflict = 0j
    for x, zx in a.items():
        for y, zy in b.items():
            meet = x & y
            if meet:
                joint[meet] = joint.get(meet, 0j) + zx * zy
            else:
                conflict += zx * zy
    if abs(1 - conflict) < CONFLICT_EPS:
        raise TotalConflict(f"conflict coefficient K={conflict:.6g} leaves nothing to normalize")
    # Σ joint equals 1 - K for exact inputs; dividing by the computed sum keeps the
    # result normalized when K is close to 1 and rounding in the inputs would be amplified
    norm = sum(joint.values(), 0j)
    if norm == 0:
        raise TotalConflict(f"conflict coefficient K={conflict:.6g} leaves nothing to normalize")
    return CBBA(a.frame, {k: v / norm for k, v in joint.items()}), conflict


def joint(cx: CBBA, cy: CBBA) -> CBBA:
    """Product CBBA on ``Γ × Υ``: mass of ``B × C`` is ``M(B)·M(C)``."""
    frame = product_frame(cx.frame, cy.frame)
    masses = {rectangle(frame, bx, by): zx * zy for bx, zx in cx.items() for by, zy in cy.items()}
    return CBBA(frame, masses)


def joint_fcbba(cx: CBBA, cy: CBBA) -> FCBBA:
    return fcbba(joint(cx, cy))


@dataclass(frozen=True)
class FusionState:
    """Left-fold accumulator for sequential combination."""

    current: CBBA
    history: tuple[tuple[int, str, complex], ...] = field(default=())

    def fold(self, other: CBBA, source: str) -> "FusionState":
        fused, conflict = combine(self.current, other)
        step = len(self.history) + 1
        return FusionState(fused, self.history + ((step, source, conflict),))


def negate_iter(c: CBBA, times: int, include_empty: bool = True) -> list[CBBA]:
    out = [c]
    for _ in range(times):
        out.append(exp_negation(out[-1], include_empty))
    return out

