"""Belief entropies for real and complex mass functions.

All values are in bits.  ``0 log 0`` is taken as 0 throughout.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .cbba import CBBA, commitments, default_tolerance, is_real
from .errors import DegenerateMass, InvalidDistribution, InvalidFrame, UnknownModel
from .frame import Frame, popcount
from .transforms import cpbt, fcbba

NEGLIGIBLE = 1e-15
LN2 = math.log(2)


class EntropyValue(float):
    """A float tagged with the name of the measure that produced it."""

    method: str

    def __new__(cls, value: float, method: str):
        obj = super().__new__(cls, value)
        obj.method = method
        return obj

    def __repr__(self) -> str:
        return f"EntropyValue({float(self)!r}, {self.method!r})"


def _plogp_sum(weights: Iterable[float]) -> float:
    # adding 0.0 turns the -0.0 of an empty or certain distribution into 0.0
    return -math.fsum(w * math.log2(w) for w in weights if w > 0) + 0.0


def shannon(p: Iterable[float] | Mapping) -> EntropyValue:
    values = list(p.values()) if isinstance(p, Mapping) else [float(x) for x in p]
    tol = default_tolerance()
    if any(x < 0 for x in values):
        raise InvalidDistribution("probabilities must be non-negative")
    if abs(math.fsum(values) - 1) > tol:
        raise InvalidDistribution(f"probabilities sum to {math.fsum(values)!r}, not 1")
    return EntropyValue(_plogp_sum(values), "shannon")


def _real_masses(m: CBBA) -> dict[int, float]:
    tol = default_tolerance()
    if not is_real(m, tol) or any(z.real < -tol for z in m.masses.values()):
        raise InvalidDistribution("expected a real, non-negative mass function")
    if abs(math.fsum(z.real for z in m.masses.values()) - 1) > tol:
        raise InvalidDistribution("real masses do not sum to 1")
    return {b: max(z.real, 0.0) for b, z in m.items()}


def weighted_hartley(m: CBBA) -> EntropyValue:
    masses = _real_masses(m)
    return EntropyValue(math.fsum(v * math.log2(popcount(b)) for b, v in masses.items()),
                        "weighted-hartley")


def pal(m: CBBA) -> EntropyValue:
    masses = _real_masses(m)
    return EntropyValue(-math.fsum(v * math.log2(v / popcount(b)) for b, v in masses.items() if v > 0),
                        "pal")


def deng(m: CBBA) -> EntropyValue:
    masses = _real_masses(m)
    return EntropyValue(
        -math.fsum(v * math.log2(v / ((1 << popcount(b)) - 1)) for b, v in masses.items() if v > 0),
        "deng",
    )


def zhou(m: CBBA) -> EntropyValue:
    masses = _real_masses(m)
    n = m.frame.n
    terms = []
    for b, v in masses.items():
        if v > 0:
            k = popcount(b)
            terms.append(v * (math.log2(v / ((1 << k) - 1)) + (k - 1) / n / LN2))
    total = -math.fsum(terms)
    return EntropyValue(total, "zhou")


def _cui_exponent(bits: int, focal: Iterable[int], n: int) -> float:
    return math.fsum(popcount(bits & other) for other in focal if other != bits) / ((1 << n) - 1)


def cui(m: CBBA) -> EntropyValue:
    masses = _real_masses(m)
    focal = [b for b, v in masses.items() if v > 0]
    n = m.frame.n
    terms = []
    for b in focal:
        v = masses[b]
        terms.append(v * (math.log2(v / ((1 << popcount(b)) - 1)) + _cui_exponent(b, focal, n) / LN2))
    return EntropyValue(-math.fsum(terms), "cui")


def fb(m: CBBA) -> EntropyValue:
    """Entropy of the real fractal redistribution, computed set by set."""
    masses = _real_masses(m)
    frame = m.frame
    fractal = []
    for a in frame.subsets():
        value = 0.0
        for b, v in masses.items():
            if b & a == a:
                value += v / ((1 << popcount(b)) - 1)
        fractal.append(value)
    return EntropyValue(_plogp_sum(fractal), "fb")


# h-functions for the commitment-based generalization; each one reproduces the
# corresponding real-valued entropy when the CBBA is a BBA.
def _h_unit(bits: int, frame: Frame, focal: list[int]) -> float:
    return 1.0


def _h_cardinality(bits: int, frame: Frame, focal: list[int]) -> float:
    return float(popcount(bits))


def _h_deng(bits: int, frame: Frame, focal: list[int]) -> float:
    return float((1 << popcount(bits)) - 1)


def _h_zhou(bits: int, frame: Frame, focal: list[int]) -> float:
    k = popcount(bits)
    return ((1 << k) - 1) * math.exp(-(k - 1) / frame.n)


def _h_cui(bits: int, frame: Frame, focal: list[int]) -> float:
    return ((1 << popcount(bits)) - 1) * math.exp(-_cui_exponent(bits, focal, frame.n))


H_MODELS: dict[str, Callable[[int, Frame, list[int]], float]] = {
    "unit": _h_unit,
    "cardinality": _h_cardinality,
    "deng-denominator": _h_deng,
    "zhou-factor": _h_zhou,
    "cui-factor": _h_cui,
}


def generalized(c: CBBA, model: str) -> EntropyValue:
    try:
        h = H_MODELS[model]
    except KeyError:
        raise UnknownModel(f"unknown h-function {model!r}; expected one of {sorted(H_MODELS)}") from None
    com = commitments(c)
    focal = list(com)
    terms = [w * math.log2(w / h(b, c.frame, focal)) for b, w in com.items() if w > 0]
    return EntropyValue(-math.fsum(terms), f"generalized:{model}")


def complex_deng(c: CBBA) -> EntropyValue:
    """Modulus of the complex-log Deng sum, converted from nats to bits."""
    total = 0j
    for b, z in c.items():
        m = abs(z)
        if m == 0:
            continue
        total += m * cmath.log(z / ((1 << popcount(b)) - 1))
    return EntropyValue(abs(-total) / LN2, "complex-deng")


@dataclass(frozen=True)
class ComFDistribution:
    frame: Frame
    weights: Mapping[int, float]

    def __getitem__(self, key) -> float:
        bits = key if isinstance(key, int) else self.frame.mask(key)
        return self.weights.get(bits, 0.0)


def com_f(c: CBBA) -> ComFDistribution:
    """Normalized moduli of the fractal redistribution."""
    mf = fcbba(c)
    mods = {b: abs(z) for b, z in mf.masses.items()}
    mods = {b: v for b, v in mods.items() if v >= NEGLIGIBLE}
    total = math.fsum(mods.values())
    if total == 0:
        raise DegenerateMass("every fractal mass has zero modulus")
    return ComFDistribution(c.frame, {b: v / total for b, v in mods.items()})


def fcb(c: CBBA) -> EntropyValue:
    return EntropyValue(_plogp_sum(com_f(c).weights.values()), "fcb")


def fcb_max(n: int) -> EntropyValue:
    if n < 1:
        raise InvalidFrame("frame size must be at least 1")
    return EntropyValue(math.log2((1 << n) - 1), "fcb-max")


def fcb_discord(c: CBBA) -> EntropyValue:
    mods = [abs(z) for z in cpbt(c).values()]
    total = math.fsum(mods)
    if total == 0:
        raise DegenerateMass("pignistic transform has zero modulus everywhere")
    return EntropyValue(_plogp_sum(v / total for v in mods), "fcb-discord")


def fcb_nonspecificity(c: CBBA) -> EntropyValue:
    return EntropyValue(fcb(c) - fcb_discord(c), "fcb-nonspecificity")


@dataclass(frozen=True)
class FCBDecomposition:
    total: float
    discord: float
    nonspecificity: float


def fcb_decompose(c: CBBA) -> FCBDecomposition:
    total = fcb(c)
    discord = fcb_discord(c)
    return FCBDecomposition(float(total), float(discord), float(total) - float(discord))


# Measures selectable by name from the CLI and the pipelines.
METHODS: dict[str, Callable[[CBBA], float]] = {
    "fcb": fcb,
    "fcb-discord": fcb_discord,
    "fcb-nonspecificity": fcb_nonspecificity,
    "complex-deng": complex_deng,
    "fb": fb,
    "deng": deng,
    "pal": pal,
    "zhou": zhou,
    "cui": cui,
    "weighted-hartley": weighted_hartley,
    "shannon": lambda c: EntropyValue(shannon(_real_masses(c).values()), "shannon"),
}
for _model in H_MODELS:
    METHODS[f"generalized:{_model}"] = (lambda model: lambda c: generalized(c, model))(_model)


def measure(name: str) -> Callable[[CBBA], float]:
    try:
        return METHODS[name]
    except KeyError:
        raise UnknownModel(f"unknown entropy method {name!r}; expected one of {sorted(METHODS)}") from None
