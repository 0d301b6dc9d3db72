"""Classification of HPO runs and rounds against the grid baseline.

Metric comparisons use a tolerance matching the one-decimal reporting
granularity of the scores; the validation-loss comparison in the weak
overfit rule is strict. A run overfits when it beats the baseline on
validation but loses on test; it overfits weakly when it sits on that
boundary (tied on one side) while showing a strictly smaller validation
loss.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence

DEFAULT_EPS = 0.05


class Verdict(Enum):
    OVERFIT = "Overfit"
    WEAK_OVERFIT = "WeakOverfit"
    UNDERPERFORM = "Underperform"
    SUCCESS_CANDIDATE = "SuccessCandidate"


class RoundVerdictKind(Enum):
    OVERFIT_ROUND = "OverfitRound"
    SUCCESS_ROUND = "SuccessRound"
    UNDERPERFORM_ROUND = "UnderperformRound"


@dataclass(frozen=True)
class RunScores:
    val_metric: float
    val_loss: float
    test_metric: float

    def __post_init__(self):
        for v in (self.val_metric, self.val_loss, self.test_metric):
            if not math.isfinite(v):
                raise ValueError(f"run scores must be finite, got {self}")


@dataclass(frozen=True)
class RoundVerdict:
    kind: RoundVerdictKind
    rep_verdicts: tuple
    avg_scores: RunScores


def _above(a: float, b: float, eps: float) -> bool:
    return a > b + eps


def _below(a: float, b: float, eps: float) -> bool:
    return a < b - eps


def _approx(a: float, b: float, eps: float) -> bool:
    return abs(a - b) <= eps


def classify_run(hpo: RunScores, grid: RunScores, eps: float = DEFAULT_EPS) -> Verdict:
    if eps < 0:
        raise ValueError("eps must be >= 0")
    val_up = _above(hpo.val_metric, grid.val_metric, eps)
    val_eq = _approx(hpo.val_metric, grid.val_metric, eps)
    test_down = _below(hpo.test_metric, grid.test_metric, eps)
    test_eq = _approx(hpo.test_metric, grid.test_metric, eps)

    if val_up and test_down:
        return Verdict.OVERFIT
    # Boundary cases: tied on one side of the comparison, worse-or-tied on
    # the other; a strictly smaller validation loss tips them into overfit.
    if (
        (val_up or val_eq)
        and (test_down or test_eq)
        and not (val_eq and test_eq)
        and hpo.val_loss < grid.val_loss
    ):
        return Verdict.WEAK_OVERFIT
    if _below(hpo.val_metric, grid.val_metric, eps):
        return Verdict.UNDERPERFORM
    return Verdict.SUCCESS_CANDIDATE


def average_scores(reps: Sequence[RunScores]) -> RunScores:
    n = len(reps)
    return RunScores(
        val_metric=sum(r.val_metric for r in reps) / n,
        val_loss=sum(r.val_loss for r in reps) / n,
        test_metric=sum(r.test_metric for r in reps) / n,
    )


def classify_round(
    reps: Sequence[RunScores], grid: RunScores, eps: float = DEFAULT_EPS
) -> RoundVerdict:
    """Aggregate repetition verdicts into the round-level decision.

    Any overfitting repetition (or average-level overfit) makes the round
    an overfit round. A round succeeds when the averaged scores beat the
    baseline on test and do not trail it on validation.
    """
    if not reps:
        raise ValueError("classify_round needs at least one repetition")
    rep_verdicts = tuple(classify_run(r, grid, eps) for r in reps)
    avg = average_scores(reps)

    any_overfit = any(
        v in (Verdict.OVERFIT, Verdict.WEAK_OVERFIT) for v in rep_verdicts
    )
    avg_overfit = _above(avg.val_metric, grid.val_metric, eps) and _below(
        avg.test_metric, grid.test_metric, eps
    )
    if any_overfit or avg_overfit:
        kind = RoundVerdictKind.OVERFIT_ROUND
    elif not _below(avg.val_metric, grid.val_metric, eps) and _above(
        avg.test_metric, grid.test_metric, eps
    ):
        kind = RoundVerdictKind.SUCCESS_ROUND
    else:
        kind = RoundVerdictKind.UNDERPERFORM_ROUND
    return RoundVerdict(kind=kind, rep_verdicts=rep_verdicts, avg_scores=avg)
