"""Search-path archive types shared by the engine and the baselines."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .biobj import ObjectivePair
from .problems import Array


class PhaseTag(Enum):
    START = "START"
    MO_DESCENT = "MO_DESCENT"
    LOCAL_SEARCH_F1 = "LOCAL_SEARCH_F1"
    SLIDE_F2 = "SLIDE_F2"
    NELDER_MEAD = "NELDER_MEAD"


class StopReason(Enum):
    # multi-objective engine
    F2_OPT_REACHED = "F2_OPT_REACHED"
    MAX_ITER = "MAX_ITER"
    BOX_STUCK = "BOX_STUCK"
    # Nelder-Mead baseline
    SIMPLEX_DIAMETER = "SIMPLEX_DIAMETER"
    F_SPREAD = "F_SPREAD"
    MAX_EVALS = "MAX_EVALS"


@dataclass
class TraceEntry:
    point: Array
    objectives: ObjectivePair
    phase: PhaseTag
    iteration: int
    grad1_norm: float = float("nan")


@dataclass
class SearchTrace:
    entries: list[TraceEntry] = field(default_factory=list)
    terminated_reason: StopReason = StopReason.MAX_ITER

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def points(self) -> Array:
        return np.array([e.point for e in self.entries])


def best_of_trace(trace: SearchTrace) -> tuple[Array, float]:
    """Entry with minimal f1 value; the earliest one wins ties."""
    if not trace.entries:
        raise ValueError("trace is empty")
    best = trace.entries[0]
    for e in trace.entries[1:]:
        if e.objectives.f1_value < best.objectives.f1_value:
            best = e
    return best.point.copy(), best.objectives.f1_value
