"""Automated troubleshooting of an HPO setup against its grid baseline.

Each round repeats an HPO run a few times, classifies the round against
the grid scores, and either stops with a terminal verdict or changes one
knob: an underperforming round gets more time budget, an overfitting
round gets a smaller search space. The smaller space comes from a
declared reduction ladder or, in mining mode, from the selected
configurations themselves: a hyperparameter whose chosen values lean
hard to one side of its recommended grid value, by a material margin,
gets pinned back to that value.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .engine import (
    BudgetSpec,
    EvaluatorHandle,
    GridBaseline,
    HpoRunResult,
    run_grid_search,
    run_hpo,
)
from .sampler import TpeParams
from .scheduler import AshaConfig
from .space import (
    Categorical,
    Fixed,
    GridSpec,
    LogUniform,
    Scalar,
    SearchSpace,
    TrialConfig,
    Uniform,
    reduce_space,
)
from .verdict import (
    DEFAULT_EPS,
    RoundVerdict,
    RoundVerdictKind,
    RunScores,
    classify_round,
)

DEFAULT_REP_SEEDS = (1, 2, 3)
DEFAULT_BUDGET_LADDER = (1.0, 4.0)

#: minimum fraction of observations deviating to the same side
DIRECTION_THRESHOLD = 0.9
#: minimum median |deviation| as a fraction of the domain width
MAGNITUDE_FRACTION = 0.25
#: relative slack when testing whether a domain is already the grid hull
HULL_REL_TOL = 0.01


class ProcedureError(RuntimeError):
    pass


class Action(Enum):
    INCREASE_BUDGET = "IncreaseBudget"
    REDUCE_SPACE = "ReduceSpace"
    SUCCEED = "Succeed"
    DECLARE_OVERFITS_TASK = "DeclareOverfitsTask"
    DECLARE_TBD = "DeclareTBD"


TERMINAL_ACTIONS = (Action.SUCCEED, Action.DECLARE_OVERFITS_TASK, Action.DECLARE_TBD)


@dataclass
class ProcedureState:
    """Position in the budget ladder and the space ladder."""

    budget_index: int = 0
    space_index: int = 0
    n_budgets: int = len(DEFAULT_BUDGET_LADDER)
    n_spaces: int = 1

    @property
    def can_increase_budget(self) -> bool:
        return self.budget_index + 1 < self.n_budgets

    @property
    def can_reduce_space(self) -> bool:
        return self.space_index + 1 < self.n_spaces


def next_action(kind: RoundVerdictKind, state: ProcedureState) -> Action:
    """One transition of the troubleshooting state machine."""
    if kind is RoundVerdictKind.SUCCESS_ROUND:
        return Action.SUCCEED
    if kind is RoundVerdictKind.OVERFIT_ROUND:
        return Action.REDUCE_SPACE if state.can_reduce_space else Action.DECLARE_OVERFITS_TASK
    if kind is RoundVerdictKind.UNDERPERFORM_ROUND:
        return Action.INCREASE_BUDGET if state.can_increase_budget else Action.DECLARE_TBD
    raise ProcedureError(f"unknown round verdict {kind!r}")  # pragma: no cover


@dataclass(frozen=True)
class FixProposal:
    name: str
    value: Scalar
    direction: str  # "below" | "above"
    fraction: float
    median_deviation: float


@dataclass
class MiningReport:
    proposals: List[FixProposal]
    excluded: Dict[str, str]

    def fixes(self) -> Dict[str, Scalar]:
        return {p.name: p.value for p in self.proposals}


def _is_grid_hull(dom, grid_values: Sequence[Scalar]) -> bool:
    """Domain endpoints within relative tolerance of the grid value hull."""
    if not isinstance(dom, (Uniform, LogUniform)):
        return False
    lo, hi = min(grid_values), max(grid_values)
    if lo == hi:
        return False

    def close(a, b):
        return abs(a - b) <= HULL_REL_TOL * max(abs(a), abs(b))

    return close(dom.lo, lo) and close(dom.hi, hi)


def mine_fix_candidates(
    observations: Sequence[TrialConfig],
    space: SearchSpace,
    theta: float = DIRECTION_THRESHOLD,
    delta: float = MAGNITUDE_FRACTION,
) -> MiningReport:
    """Propose hyperparameters to pin back to their grid value.

    A numeric hyperparameter qualifies when at least ``theta`` of the
    observed values fall strictly on one side of its grid value and the
    median absolute deviation is at least ``delta`` of the domain width.
    Values equal to the grid value count against the direction. Entries
    are excluded, with a recorded reason, when no reduction is possible
    or when the directional signal is vacuous:

    - domains that already equal the hull of their grid values cannot
      meaningfully shrink further;
    - a grid value sitting on a domain boundary makes every sample fall
      to one side, so direction carries no information;
    - categorical domains have no ordering, hence no direction.
    """
    if not observations:
        raise ProcedureError("mining needs at least one observation")
    if space.grid_values is None:
        raise ProcedureError(f"space {space.label!r} carries no grid values to mine against")

    proposals: List[FixProposal] = []
    excluded: Dict[str, str] = {}
    for name in space.non_fixed_names():
        dom = space.entries[name]
        grid_vals = space.grid_values.get(name)
        if grid_vals and _is_grid_hull(dom, grid_vals):
            excluded[name] = "domain already equals the grid value hull"
            continue
        if not grid_vals or len(grid_vals) != 1:
            excluded[name] = "multiple recommended grid values; no single value to pin"
            continue
        if isinstance(dom, Categorical):
            excluded[name] = "categorical domain has no deviation direction"
            continue
        target = float(grid_vals[0])
        width = dom.hi - dom.lo
        if abs(target - dom.lo) <= 1e-12 * max(1.0, abs(dom.hi)) or abs(
            target - dom.hi
        ) <= 1e-12 * max(1.0, abs(dom.hi)):
            excluded[name] = "grid value lies on the domain boundary; direction is vacuous"
            continue

        values = [float(o[name]) for o in observations]
        below = sum(1 for v in values if v < target)
        above = sum(1 for v in values if v > target)
        n = len(values)
        direction, count = ("below", below) if below >= above else ("above", above)
        fraction = count / n
        median_dev = statistics.median(abs(v - target) for v in values)
        if fraction >= theta and median_dev >= delta * width:
            proposals.append(
                FixProposal(
                    name=name,
                    value=grid_vals[0],
                    direction=direction,
                    fraction=fraction,
                    median_deviation=median_dev,
                )
            )
        else:
            excluded[name] = (
                f"signal too weak (fraction {fraction:.2f}, "
                f"median deviation {median_dev:.4g} vs floor {delta * width:.4g})"
            )
    return MiningReport(proposals=proposals, excluded=excluded)


@dataclass
class RoundOutcome:
    index: int
    space_label: str
    budget_multiplier: float
    runs: List[HpoRunResult]
    verdict: RoundVerdict
    action: Action
    fixes_applied: Optional[Dict[str, Scalar]] = None


@dataclass
class ProcedureResult:
    baseline: GridBaseline
    rounds: List[RoundOutcome]
    terminal: Action
    final_space_label: str
    final_budget_multiplier: float

    @property
    def actions(self) -> List[Action]:
        return [r.action for r in self.rounds]


def _run_scores(run: HpoRunResult) -> RunScores:
    s = run.scores
    if s.test_metric is None:
        raise ProcedureError("run finished without a test score")
    return RunScores(val_metric=s.val_metric, val_loss=s.val_loss, test_metric=s.test_metric)


def run_procedure(
    task: EvaluatorHandle,
    grid: GridSpec,
    algorithm: str,
    spaces: Sequence[SearchSpace],
    budget_ladder: Sequence[float] = DEFAULT_BUDGET_LADDER,
    rep_seeds: Sequence[int] = DEFAULT_REP_SEEDS,
    mine: bool = False,
    eps: float = DEFAULT_EPS,
    asha: Optional[AshaConfig] = None,
    tpe_params: Optional[TpeParams] = None,
    slots: int = 1,
    baseline: Optional[GridBaseline] = None,
    max_rounds: int = 16,
) -> ProcedureResult:
    """Drive the troubleshooting loop to a terminal verdict.

    With ``mine=False`` the given ``spaces`` form the declared reduction
    ladder. With ``mine=True`` only ``spaces[0]`` is used as the start and
    each reduction pins the hyperparameters proposed by
    :func:`mine_fix_candidates` over the round's selected configurations.
    """
    if not spaces:
        raise ProcedureError("need at least one search space")
    if not budget_ladder or list(budget_ladder) != sorted(budget_ladder):
        raise ProcedureError("budget ladder must be a non-empty increasing sequence")
    if not rep_seeds:
        raise ProcedureError("need at least one repetition seed")

    if baseline is None:
        baseline = run_grid_search(task, grid)
    grid_scores = RunScores(
        val_metric=baseline.scores.val_metric,
        val_loss=baseline.scores.val_loss,
        test_metric=baseline.scores.test_metric,
    )

    state = ProcedureState(
        n_budgets=len(budget_ladder),
        n_spaces=1 if mine else len(spaces),
    )
    current_space = spaces[0]
    rounds: List[RoundOutcome] = []

    for round_index in range(max_rounds):
        budget = BudgetSpec(
            gst_multiplier=budget_ladder[state.budget_index],
            gst_seconds=baseline.runtime_seconds,
        )
        runs = [
            run_hpo(
                algorithm,
                current_space,
                budget,
                task,
                rep_seed=seed,
                asha=asha,
                tpe_params=tpe_params,
                slots=slots,
            )
            for seed in rep_seeds
        ]
        verdict = classify_round([_run_scores(r) for r in runs], grid_scores, eps)

        fixes: Optional[Dict[str, Scalar]] = None
        if mine and verdict.kind is RoundVerdictKind.OVERFIT_ROUND:
            best_configs = [
                next(t.config for t in r.trials if t.trial_id == r.best_trial_id)
                for r in runs
            ]
            report = mine_fix_candidates(best_configs, current_space)
            fixes = report.fixes()
            # mining decides reducibility round by round
            state.n_spaces = state.space_index + (2 if fixes else 1)

        action = next_action(verdict.kind, state)
        rounds.append(
            RoundOutcome(
                index=round_index,
                space_label=current_space.label,
                budget_multiplier=budget.gst_multiplier,
                runs=runs,
                verdict=verdict,
                action=action,
                fixes_applied=fixes if action is Action.REDUCE_SPACE else None,
            )
        )
        if action in TERMINAL_ACTIONS:
            return ProcedureResult(
                baseline=baseline,
                rounds=rounds,
                terminal=action,
                final_space_label=current_space.label,
                final_budget_multiplier=budget.gst_multiplier,
            )
        if action is Action.INCREASE_BUDGET:
            state.budget_index += 1
        elif action is Action.REDUCE_SPACE:
            if mine:
                current_space = reduce_space(current_space, fixes)
                state.space_index += 1
            else:
                state.space_index += 1
                current_space = spaces[state.space_index]
    raise ProcedureError(f"no terminal verdict after {max_rounds} rounds")


def replay_actions(
    round_verdicts: Sequence[RoundVerdictKind],
    n_spaces: int,
    n_budgets: int = len(DEFAULT_BUDGET_LADDER),
) -> List[Action]:
    """Actions the state machine takes for a given sequence of round verdicts.

    Used to check recorded traces: the returned list has one action per
    verdict, and only the last one may be terminal.
    """
    state = ProcedureState(n_budgets=n_budgets, n_spaces=n_spaces)
    actions: List[Action] = []
    for i, kind in enumerate(round_verdicts):
        action = next_action(kind, state)
        actions.append(action)
        if action in TERMINAL_ACTIONS:
            if i != len(round_verdicts) - 1:
                raise ProcedureError(
                    f"terminal action {action.value} before the last recorded round"
                )
            break
        if action is Action.INCREASE_BUDGET:
            state.budget_index += 1
        else:
            state.space_index += 1
    if not actions or actions[-1] not in TERMINAL_ACTIONS:
        raise ProcedureError("verdict sequence ended without a terminal action")
    return actions
