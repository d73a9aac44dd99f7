"""Frames of discernment and focal-set algebra over bitmasks.

A subset of an ``n``-element frame is an ``int`` whose bit ``i`` marks the
``i``-th label.  :class:`FocalSet` pairs a mask with its frame for the public
API; hot loops elsewhere in the package work on raw masks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import EmptyFocal, FrameMismatch, FrameTooLarge, InvalidDocument, InvalidFrame

MAX_FRAME = 24
MAX_ENUMERABLE = 16


@dataclass(frozen=True)
class Frame:
    """An ordered set of mutually exclusive hypotheses.

    ``factors`` is set only for frames built by :func:`product_frame`; it
    records the two component frames so that fractal redistribution can
    follow the product structure.
    """

    labels: tuple[str, ...]
    factors: tuple["Frame", "Frame"] | None = field(default=None, compare=True)

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise InvalidFrame("a frame needs at least one element")
        if any(not x for x in labels):
            raise InvalidFrame("frame labels must be non-empty strings")
        if len(set(labels)) != len(labels):
            raise InvalidFrame(f"duplicate labels in frame {labels!r}")
        if len(labels) > MAX_FRAME:
            raise FrameTooLarge(f"frame has {len(labels)} elements, limit is {MAX_FRAME}")
        if self.factors is not None:
            a, b = self.factors
            if a.n * b.n != len(labels):
                raise InvalidFrame("factor sizes do not multiply to the frame size")

    @classmethod
    def of_size(cls, n: int, prefix: str = "e") -> "Frame":
        return cls(tuple(f"{prefix}{i + 1}" for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def __len__(self) -> int:
        return self.n

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidDocument(f"unknown label {label!r} for frame {list(self.labels)}") from None

    def mask(self, labels: Iterable[str] | str) -> int:
        if isinstance(labels, str):
            labels = (labels,)
        bits = 0
        for lab in labels:
            bits |= 1 << self.index(lab)
        return bits

    def focal(self, labels: Iterable[str] | str) -> "FocalSet":
        return FocalSet(self.mask(labels), self)

    def labels_of(self, bits: int) -> list[str]:
        return [lab for i, lab in enumerate(self.labels) if bits >> i & 1]

    def singletons(self) -> list[int]:
        return [1 << i for i in range(self.n)]

    def subsets(self) -> range:
        """All nonempty subsets in ascending mask order."""
        if self.n > MAX_ENUMERABLE:
            raise FrameTooLarge(
                f"enumerating 2^{self.n} subsets exceeds the limit of n={MAX_ENUMERABLE}"
            )
        return range(1, self.full + 1)


@dataclass(frozen=True)
class FocalSet:
    bits: int
    frame: Frame

    def __post_init__(self):
        if self.bits < 0 or self.bits & ~self.frame.full:
            raise InvalidFrame(f"mask {self.bits:#x} references positions outside the frame")

    def __len__(self) -> int:
        return cardinality(self)

    @property
    def labels(self) -> list[str]:
        return self.frame.labels_of(self.bits)

    def __repr__(self) -> str:
        return "{" + ",".join(self.labels) + "}"


def popcount(bits: int) -> int:
    return bin(bits).count("1")


def cardinality(s: FocalSet | int) -> int:
    return popcount(s.bits if isinstance(s, FocalSet) else s)


def submasks(bits: int) -> Iterator[int]:
    """Nonempty submasks of ``bits``, descending."""
    sub = bits
    while sub:
        yield sub
        sub = (sub - 1) & bits


def strict_supersets(s: FocalSet, frame: Frame | None = None) -> list[FocalSet]:
    frame = frame or s.frame
    if s.frame != frame:
        raise FrameMismatch("focal set belongs to a different frame")
    if s.bits == 0:
        raise EmptyFocal("strict supersets are only defined for nonempty sets")
    free = frame.full & ~s.bits
    # supersets are s | t for every nonempty t ⊆ free; ascending in t gives ascending masks
    extra = sorted(submasks(free))
    return [FocalSet(s.bits | t, frame) for t in extra]


def intersect(a: FocalSet, b: FocalSet) -> FocalSet:
    if a.frame != b.frame:
        raise FrameMismatch("cannot intersect focal sets from different frames")
    return FocalSet(a.bits & b.bits, a.frame)


def complement(s: FocalSet, frame: Frame | None = None) -> FocalSet:
    frame = frame or s.frame
    if s.frame != frame:
        raise FrameMismatch("focal set belongs to a different frame")
    return FocalSet(frame.full & ~s.bits, frame)


def product_frame(x: Frame, y: Frame) -> Frame:
    """Cartesian product frame with pair labels in row-major order."""
    size = x.n * y.n
    if size > MAX_FRAME:
        raise FrameTooLarge(f"product frame would have {size} elements, limit is {MAX_FRAME}")
    labels = tuple(f"({a},{b})" for a in x.labels for b in y.labels)
    return Frame(labels, factors=(x, y))


def rectangle(frame: Frame, rows: int, cols: int) -> int:
    """Mask of the product set ``rows × cols`` on a product frame."""
    x, y = frame.factors
    bits = 0
    for i in range(x.n):
        if rows >> i & 1:
            for j in range(y.n):
                if cols >> j & 1:
                    bits |= 1 << (i * y.n + j)
    return bits


def split_rectangle(frame: Frame, bits: int) -> tuple[int, int] | None:
    """Inverse of :func:`rectangle`; ``None`` when ``bits`` is not a product set."""
    x, y = frame.factors
    rows = cols = 0
    for pos in range(frame.n):
        if bits >> pos & 1:
            i, j = divmod(pos, y.n)
            rows |= 1 << i
            cols |= 1 << j
    if rectangle(frame, rows, cols) != bits:
        return None
    return rows, cols

