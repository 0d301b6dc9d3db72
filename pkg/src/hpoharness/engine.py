"""Orchestration of grid-search baselines and budgeted HPO runs.

Time is a simulated clock fed by the evaluator's per-checkpoint cost, so
runs are deterministic and desk-scale. The grid baseline's serial runtime
defines 1 GST (grid-search time), the currency every HPO budget is
expressed in. HPO runs admit trials onto worker slots until the deadline,
prune through an optional ASHA scheduler, and report the globally best
checkpoint of the best trial.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Protocol, Sequence, Tuple

import numpy as np

from . import surrogate as surrogate_mod
from .sampler import Observation, TpeParams, random_sample, tpe_suggest
from .scheduler import AshaConfig, Decision, RungLedger, on_report
from .space import SearchSpace, TrialConfig

ALGORITHMS = ("RS", "ASHA", "BO+ASHA")
DEFAULT_TRAINING_SEED = 42


class EngineError(RuntimeError):
    pass


class EmptyRunError(EngineError):
    """No trial produced a single report."""


class BaselineIncompleteError(EngineError):
    """A grid config failed to evaluate; no partial baseline is kept."""


@dataclass(frozen=True)
class Report:
    step: int
    val_metric: float
    val_loss: float
    cost_seconds: float


@dataclass(frozen=True)
class Checkpoint:
    step: int
    val_metric: float
    val_loss: float


@dataclass
class TrialRecord:
    trial_id: int
    config: TrialConfig
    reports: List[Checkpoint] = field(default_factory=list)
    test_metric_at_best: Optional[float] = None
    status: str = "running"  # running | completed | pruned | truncated | failed
    cost: float = 0.0
    start_time: float = 0.0

    @property
    def best_checkpoint(self) -> Optional[Checkpoint]:
        if not self.reports:
            return None
        return min(self.reports, key=lambda c: (-c.val_metric, c.val_loss, c.step))

    def append(self, report: Report) -> None:
        if self.reports and report.step <= self.reports[-1].step:
            raise EngineError(
                f"trial {self.trial_id}: non-increasing step {report.step}"
            )
        self.reports.append(Checkpoint(report.step, report.val_metric, report.val_loss))
        self.cost += report.cost_seconds

    def as_dict(self):
        return {
            "trial_id": self.trial_id,
            "config": {k: self.config[k] for k in sorted(self.config)},
            "reports": [
                {"step": c.step, "val_metric": c.val_metric, "val_loss": c.val_loss}
                for c in self.reports
            ],
            "best_checkpoint": (
                None
                if self.best_checkpoint is None
                else {
                    "step": self.best_checkpoint.step,
                    "val_metric": self.best_checkpoint.val_metric,
                    "val_loss": self.best_checkpoint.val_loss,
                }
            ),
            "test_metric_at_best": self.test_metric_at_best,
            "status": self.status,
            "cost": self.cost,
            "start_time": self.start_time,
        }


@dataclass(frozen=True)
class BudgetSpec:
    gst_multiplier: float
    gst_seconds: float

    def __post_init__(self):
        if self.gst_multiplier <= 0 or self.gst_seconds <= 0:
            raise EngineError("budget multiplier and GST seconds must be positive")

    @property
    def deadline(self) -> float:
        return self.gst_multiplier * self.gst_seconds


@dataclass(frozen=True)
class RunScoresSummary:
    val_metric: float
    val_loss: float
    test_metric: float


@dataclass
class GridBaseline:
    trials: List[TrialRecord]
    best_trial_id: int
    runtime_seconds: float
    scores: RunScoresSummary


@dataclass
class HpoRunResult:
    algorithm: str
    trials: List[TrialRecord]
    best_trial_id: int
    best_step: int
    scores: RunScoresSummary
    trials_completed: int
    budget_used: float
    deadline: float


class TrialSession(Protocol):
    def next_report(self) -> Optional[Report]: ...
    def stop(self) -> None: ...
    def finalize(self) -> Optional[float]:
        """Test metric at the session's best retained checkpoint."""


class EvaluatorHandle(Protocol):
    total_steps: int
    checkpoints_per_epoch: int

    def open_trial(
        self, trial_id: int, config: TrialConfig, training_seed: int
    ) -> TrialSession: ...

    def close(self) -> None: ...


def checkpoint_plan(epochs: int, task_size: str) -> List[int]:
    """Evenly spaced checkpoint steps: 10/epoch for large tasks, 5 for small."""
    if epochs < 1:
        raise EngineError("epochs must be >= 1")
    if task_size not in ("small", "large"):
        raise EngineError(f"task_size must be 'small' or 'large', got {task_size!r}")
    per_epoch = 10 if task_size == "large" else 5
    return list(range(1, epochs * per_epoch + 1))


class SurrogateSession:
    def __init__(self, spec, config, total_steps):
        self._spec = spec
        self._config = config
        self._total = total_steps
        self._step = 0
        self._stopped = False

    def next_report(self) -> Optional[Report]:
        if self._stopped or self._step >= self._total:
            return None
        self._step += 1
        val, loss, cost = surrogate_mod.evaluate(self._spec, self._config, self._step)
        return Report(self._step, val, loss, cost)

    def stop(self) -> None:
        self._stopped = True

    def finalize(self) -> Optional[float]:
        if self._step == 0:
            return None
        best_step = max(
            range(1, self._step + 1),
            key=lambda s: surrogate_mod.evaluate(self._spec, self._config, s)[0],
        )
        return surrogate_mod.test_at(self._spec, self._config, best_step)


class SurrogateEvaluator:
    """EvaluatorHandle over a closed-form surrogate task."""

    def __init__(self, spec: "surrogate_mod.SurrogateSpec"):
        self.spec = spec
        self.total_steps = spec.total_steps
        self.checkpoints_per_epoch = spec.checkpoints_per_epoch

    def open_trial(self, trial_id, config, training_seed) -> SurrogateSession:
        return SurrogateSession(self.spec, config, self.total_steps)

    def close(self) -> None:
        pass


def select_best(trials: Sequence[TrialRecord]) -> Tuple[int, Checkpoint]:
    """Globally best (trial, checkpoint) across all reports.

    Ties break by lower validation loss, then earlier checkpoint, then
    lower trial id.
    """
    best = None
    for t in trials:
        for c in t.reports:
            key = (-c.val_metric, c.val_loss, c.step, t.trial_id)
            if best is None or key < best[0]:
                best = (key, t.trial_id, c)
    if best is None:
        raise EmptyRunError("no reports in any trial")
    return best[1], best[2]


def _run_full_trial(task: EvaluatorHandle, trial_id: int, config: TrialConfig,
                    training_seed: int, start_time: float) -> TrialRecord:
    session = task.open_trial(trial_id, config, training_seed)
    rec = TrialRecord(trial_id=trial_id, config=dict(config), start_time=start_time)
    while True:
        rep = session.next_report()
        if rep is None:
            break
        rec.append(rep)
    rec.test_metric_at_best = session.finalize()
    rec.status = "completed"
    return rec


def run_grid_search(
    task: EvaluatorHandle,
    grid,
    training_seed: int = DEFAULT_TRAINING_SEED,
) -> GridBaseline:
    """Run every grid config to completion; the serial runtime defines 1 GST."""
    trials: List[TrialRecord] = []
    elapsed = 0.0
    for trial_id, config in enumerate(grid.configs()):
        try:
            rec = _run_full_trial(task, trial_id, config, training_seed, elapsed)
        except Exception as exc:
            raise BaselineIncompleteError(
                f"grid config {config} failed: {exc}"
            ) from exc
        if not rec.reports:
            raise BaselineIncompleteError(f"grid config {config} produced no reports")
        elapsed += rec.cost
        trials.append(rec)
    best_id, best_ckpt = select_best(trials)
    best = next(t for t in trials if t.trial_id == best_id)
    return GridBaseline(
        trials=trials,
        best_trial_id=best_id,
        runtime_seconds=elapsed,
        scores=RunScoresSummary(
            val_metric=best_ckpt.val_metric,
            val_loss=best_ckpt.val_loss,
            test_metric=best.test_metric_at_best,
        ),
    )


class _Sampler:
    def __init__(self, algorithm: str, space: SearchSpace, rep_seed: int,
                 tpe_params: Optional[TpeParams]):
        self.algorithm = algorithm
        self.space = space
        self.tpe_params = tpe_params or TpeParams()
        self._seed = rep_seed
        self.history: List[Observation] = []

    def propose(self, trial_index: int) -> TrialConfig:
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=self._seed, spawn_key=(trial_index,))
        )
        if self.algorithm == "BO+ASHA":
            return tpe_suggest(self.history, self.space, self.tpe_params, rng)
        return random_sample(self.space, rng)

    def observe(self, rec: TrialRecord) -> None:
        if not rec.reports:
            return
        if rec.status == "pruned":
            # pruned trials enter the history with their last reported objective
            status, objective = "pruned", rec.reports[-1].val_metric
        else:
            status, objective = "completed", rec.best_checkpoint.val_metric
        self.history.append(
            Observation(config=dict(rec.config), objective=objective, status=status)
        )


def run_hpo(
    algorithm: str,
    space: SearchSpace,
    budget: BudgetSpec,
    task: EvaluatorHandle,
    rep_seed: int,
    asha: Optional[AshaConfig] = None,
    tpe_params: Optional[TpeParams] = None,
    slots: int = 1,
    training_seed: int = DEFAULT_TRAINING_SEED,
    max_trials: Optional[int] = None,
) -> HpoRunResult:
    """One HPO run under the given budget.

    Trials start on free worker slots while simulated time is below the
    deadline; a trial still running at the deadline is truncated at its
    next checkpoint boundary.
    """
    if algorithm not in ALGORITHMS:
        raise EngineError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    if slots < 1:
        raise EngineError("slots must be >= 1")
    uses_asha = algorithm in ("ASHA", "BO+ASHA")
    if uses_asha and asha is None:
        asha = AshaConfig(grace_period=1, eta=4, max_t=task.total_steps)

    deadline = budget.deadline
    sampler = _Sampler(algorithm, space, rep_seed, tpe_params)
    ledger = RungLedger()
    trials: List[TrialRecord] = []
    sessions: Dict[int, TrialSession] = {}
    events: List[Tuple[float, int, int]] = []  # (completion time, trial_id, slot)
    seq = 0

    def admit(slot: int, now: float) -> None:
        nonlocal seq
        if now >= deadline:
            return
        if max_trials is not None and len(trials) >= max_trials:
            return
        config = sampler.propose(len(trials))
        if not space.contains(config):  # pragma: no cover - samplers respect domains
            raise EngineError(f"sampler proposed config outside space: {config}")
        trial_id = len(trials)
        rec = TrialRecord(trial_id=trial_id, config=dict(config), start_time=now)
        trials.append(rec)
        session = task.open_trial(trial_id, config, training_seed)
        sessions[trial_id] = session
        rep = session.next_report()
        if rep is None:
            rec.status = "failed"
            del sessions[trial_id]
            admit(slot, now)
            return
        seq += 1
        heapq.heappush(events, (now + rep.cost_seconds, seq, trial_id, slot, rep))

    def finish(rec: TrialRecord, status: str, now: float, slot: int) -> None:
        session = sessions.pop(rec.trial_id)
        if status == "pruned":
            session.stop()
        rec.status = status
        rec.test_metric_at_best = session.finalize()
        sampler.observe(rec)
        admit(slot, now)

    for slot in range(slots):
        admit(slot, 0.0)

    while events:
        now, _, trial_id, slot, rep = heapq.heappop(events)
        rec = trials[trial_id]
        rec.append(rep)
        if now >= deadline:
            # a trial whose final checkpoint lands exactly on the deadline
            # finished all its work within budget
            status = "completed" if sessions[trial_id].next_report() is None else "truncated"
            finish(rec, status, now, slot)
            continue
        if uses_asha:
            decision = on_report(ledger, asha, trial_id, rep.step, rep.val_metric)
            if decision is Decision.STOP:
                finish(rec, "pruned", now, slot)
                continue
        nxt = sessions[trial_id].next_report()
        if nxt is None:
            finish(rec, "completed", now, slot)
        else:
            seq += 1
            heapq.heappush(events, (now + nxt.cost_seconds, seq, trial_id, slot, nxt))

    reported = [t for t in trials if t.reports]
    if not reported:
        raise EmptyRunError("budget expired before any trial reported")
    best_id, best_ckpt = select_best(reported)
    best = next(t for t in reported if t.trial_id == best_id)
    return HpoRunResult(
        algorithm=algorithm,
        trials=trials,
        best_trial_id=best_id,
        best_step=best_ckpt.step,
        scores=RunScoresSummary(
            val_metric=best_ckpt.val_metric,
            val_loss=best_ckpt.val_loss,
            test_metric=best.test_metric_at_best,
        ),
        trials_completed=sum(1 for t in trials if t.status == "completed"),
        budget_used=max((t.start_time + t.cost for t in trials), default=0.0),
        deadline=deadline,
    )
