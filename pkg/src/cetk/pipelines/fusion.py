"""Threshold-driven sequential fusion.

Evidence is folded left to right with the complex combination rule.  After
each fold the singleton with the largest modulus is the candidate target; it
is accepted once its modulus reaches ``sigma`` while the fused CBBA's fcb
entropy is at most ``epsilon``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Any, Sequence

from ..cbba import CBBA
from ..entropies import fcb
from ..errors import TotalConflict
from ..transforms import FusionState

UNDETERMINED = "undetermined"
POTENTIAL = "potential"
ACCEPTED = "accepted"
CONFLICT = "conflict"


@dataclass(frozen=True)
class FusionConfig:
    sigma: float = 0.5
    epsilon: float = 2.0

    def __post_init__(self):
        # sigma above 1 is allowed: acceptance becomes unreachable, which is
        # a useful way to get the full trace
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class TraceStep:
    step: int                      # number of folds so far; step t has seen t + 1 sources
    sources: tuple[str, ...]
    moduli: dict[str, float]       # per-singleton |M|
    target: str | None
    entropy: float | None
    verdict: str
    conflict: complex | None = None


@dataclass(frozen=True)
class DecisionTrace:
    steps: tuple[TraceStep, ...]
    outcome: str                   # accepted, exhausted or conflict
    config: FusionConfig
    fused: CBBA | None = None

    @property
    def accepted_step(self) -> TraceStep | None:
        return next((s for s in self.steps if s.verdict == ACCEPTED), None)

    @property
    def target(self) -> str | None:
        s = self.accepted_step
        return s.target if s else None

    def to_doc(self) -> dict[str, Any]:
        steps = []
        for s in self.steps:
            row = asdict(s)
            row["sources"] = list(s.sources)
            row["conflict"] = None if s.conflict is None else {"re": s.conflict.real, "im": s.conflict.imag}
            steps.append(row)
        return {
            "config": asdict(self.config),
            "outcome": self.outcome,
            "target": self.target,
            "steps": steps,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2)


def _verdict(max_modulus: float, entropy: float, cfg: FusionConfig) -> str:
    if max_modulus < cfg.sigma:
        return UNDETERMINED
    if entropy > cfg.epsilon:
        return POTENTIAL
    return ACCEPTED


def _inspect(c: CBBA) -> tuple[dict[str, float], str | None]:
    frame = c.frame
    moduli = {label: abs(c.masses.get(1 << i, 0j)) for i, label in enumerate(frame.labels)}
    best = max(moduli.values())
    # first label wins ties so the trace is deterministic
    target = next(label for label, v in moduli.items() if v == best)
    return moduli, target


def fuse_until_decision(evidence: Sequence[CBBA], cfg: FusionConfig = FusionConfig(),
                        names: Sequence[str] | None = None) -> DecisionTrace:
    if len(evidence) < 2:
        raise ValueError("fusion needs at least two evidence sources")
    names = list(names) if names is not None else [f"M{i + 1}" for i in range(len(evidence))]
    if len(names) != len(evidence):
        raise ValueError("one name per evidence source")
    state = FusionState(evidence[0])
    steps: list[TraceStep] = []
    for t, (source, name) in enumerate(zip(evidence[1:], names[1:]), start=1):
        try:
            state = state.fold(source, name)
        except TotalConflict:
            steps.append(TraceStep(t, tuple(names[: t + 1]), {}, None, None, CONFLICT))
            return DecisionTrace(tuple(steps), CONFLICT, cfg, None)
        fused = state.current
        moduli, target = _inspect(fused)
        entropy = float(fcb(fused))
        verdict = _verdict(max(moduli.values()), entropy, cfg)
        steps.append(TraceStep(t, tuple(names[: t + 1]), moduli, target, entropy, verdict,
                               state.history[-1][2]))
        if verdict == ACCEPTED:
            return DecisionTrace(tuple(steps), ACCEPTED, cfg, fused)
    return DecisionTrace(tuple(steps), "exhausted", cfg, state.current)
