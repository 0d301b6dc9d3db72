"""ASHA early stopping in its pruning form.

At geometric rung milestones each reporting trial is ranked against every
objective previously recorded at that milestone; trials outside the top
1/eta fraction are stopped. Ties continue, and a trial that reaches its
final checkpoint always finishes naturally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple


class Decision(Enum):
    CONTINUE = "continue"
    STOP = "stop"


class SchedulerError(ValueError):
    pass


class DuplicateReportError(SchedulerError):
    """The same trial reported twice at one milestone."""


@dataclass(frozen=True)
class AshaConfig:
    grace_period: int = 1
    eta: int = 4
    max_t: int = 1

    def __post_init__(self):
        if self.grace_period < 1 or self.max_t < 1:
            raise SchedulerError("grace_period and max_t must be positive")
        if self.eta < 2:
            raise SchedulerError("eta must be >= 2")
        if self.grace_period > self.max_t:
            raise SchedulerError("grace_period must not exceed max_t")


def milestones(cfg: AshaConfig) -> List[int]:
    """Rungs grace * eta^k up to and including max_t."""
    out = []
    m = cfg.grace_period
    while m <= cfg.max_t:
        out.append(m)
        m *= cfg.eta
    return out


class RungLedger:
    """Per-milestone record of (objective, trial_id) pairs."""

    def __init__(self) -> None:
        self._rungs: Dict[int, List[Tuple[float, object]]] = {}

    def recorded(self, milestone: int) -> List[Tuple[float, object]]:
        return list(self._rungs.get(milestone, []))

    def record(self, milestone: int, trial_id, objective: float) -> None:
        rung = self._rungs.setdefault(milestone, [])
        if any(tid == trial_id for _, tid in rung):
            raise DuplicateReportError(
                f"trial {trial_id!r} already reported at milestone {milestone}"
            )
        rung.append((objective, trial_id))


def on_report(
    ledger: RungLedger,
    cfg: AshaConfig,
    trial_id,
    step: int,
    objective: float,
) -> Decision:
    """Record a checkpoint report and decide whether the trial continues."""
    if step <= 0:
        raise SchedulerError(f"step must be positive, got {step}")
    if not math.isfinite(objective):
        raise SchedulerError(f"objective must be finite, got {objective}")
    if step not in milestones(cfg):
        return Decision.CONTINUE
    ledger.record(step, trial_id, objective)
    if step >= cfg.max_t:
        return Decision.CONTINUE  # final rung: the trial finishes naturally
    rung = ledger.recorded(step)
    n = len(rung)
    # rank 1 = best; strictly-greater objectives outrank, so ties continue
    rank = 1 + sum(1 for obj, _ in rung if obj > objective)
    keep = math.ceil(n / cfg.eta)
    return Decision.CONTINUE if rank <= keep else Decision.STOP
