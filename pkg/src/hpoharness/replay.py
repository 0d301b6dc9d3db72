"""Replay of recorded decision-level scores through the verdict logic.

Fixture files hold published (validation, test) scores per repetition
and round, the shading each cell received in the source tables, the
round-level action annotations, and the terminal outcome. Replaying
re-derives every cell verdict and the full action sequence and reports
any divergence, without running the engine.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import yaml

from .procedure import Action, replay_actions
from .verdict import RoundVerdictKind, RunScores, Verdict, classify_round, classify_run

#: shading groups used by the source tables
SHADING_TO_VERDICTS = {
    "dark": (Verdict.OVERFIT,),
    "medium": (Verdict.WEAK_OVERFIT,),
    "none": (Verdict.UNDERPERFORM, Verdict.SUCCESS_CANDIDATE),
}


@dataclass
class Mismatch:
    where: str
    expected: str
    got: str

    def __str__(self) -> str:
        return f"{self.where}: expected {self.expected}, got {self.got}"


@dataclass
class ReplayResult:
    cells_checked: int = 0
    rounds_checked: int = 0
    mismatches: List[Mismatch] = field(default_factory=list)
    actions: Dict[str, List[Action]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def merge(self, other: "ReplayResult") -> None:
        self.cells_checked += other.cells_checked
        self.rounds_checked += other.rounds_checked
        self.mismatches.extend(other.mismatches)
        self.actions.update(other.actions)


def load_fixture(path) -> dict:
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict) or "tasks" not in doc:
        raise ValueError(f"fixture {path} is not a procedure score fixture")
    return doc


def _rep_loss(rep: dict, fixture: dict) -> float:
    if "loss" in rep:
        return float(rep["loss"])
    if rep.get("shading", "none") in ("dark", "medium"):
        return float(fixture["shaded_loss"])
    return float(fixture["unshaded_loss"])


def _grid_scores(entry: dict, fixture: dict) -> RunScores:
    grid = entry["grid"]
    return RunScores(
        val_metric=float(grid["val"]),
        val_loss=float(grid.get("loss", fixture["grid_loss_default"])),
        test_metric=float(grid["test"]),
    )


def replay_fixture(doc: dict) -> ReplayResult:
    """Re-derive all cell verdicts and action sequences in one fixture."""
    eps = float(doc.get("eps", 0.05))
    result = ReplayResult()
    for task_entry in doc["tasks"]:
        task = task_entry["task"]
        grid = _grid_scores(task_entry, doc)
        for alg_entry in task_entry["algorithms"]:
            alg = alg_entry["algorithm"]
            key = f"{doc['model']}/{task}/{alg}"
            published_kinds: List[RoundVerdictKind] = []
            for rnd in alg_entry["rounds"]:
                where = f"{key}/round{rnd['index']}"
                reps = [
                    RunScores(
                        val_metric=float(r["val"]),
                        val_loss=_rep_loss(r, doc),
                        test_metric=float(r["test"]),
                    )
                    for r in rnd["reps"]
                ]
                round_verdict = classify_round(reps, grid, eps)
                for i, (scores, rep) in enumerate(zip(reps, rnd["reps"]), start=1):
                    got = classify_run(scores, grid, eps)
                    expected = rep["expected"]
                    result.cells_checked += 1
                    if got.value != expected:
                        result.mismatches.append(
                            Mismatch(f"{where}/rep{i}", expected, got.value)
                        )
                expected_round = rnd.get("computed_verdict", rnd["published_verdict"])
                result.rounds_checked += 1
                if round_verdict.kind.value != expected_round:
                    result.mismatches.append(
                        Mismatch(where, expected_round, round_verdict.kind.value)
                    )
                published_kinds.append(RoundVerdictKind(rnd["published_verdict"]))

            actions = replay_actions(
                published_kinds,
                n_spaces=int(doc.get("n_spaces", 3)),
                n_budgets=int(doc.get("n_budgets", 2)),
            )
            result.actions[key] = actions
            recorded = [Action(rnd["action"]) for rnd in alg_entry["rounds"]]
            if actions != recorded:
                result.mismatches.append(
                    Mismatch(
                        f"{key}/actions",
                        "[" + ", ".join(a.value for a in recorded) + "]",
                        "[" + ", ".join(a.value for a in actions) + "]",
                    )
                )
            terminal = alg_entry.get("terminal")
            if terminal is not None and actions[-1].value != terminal:
                result.mismatches.append(
                    Mismatch(f"{key}/terminal", terminal, actions[-1].value)
                )
    return result


def replay_walkthrough(doc: dict) -> List[Verdict]:
    """Verdict per round for a single-run walkthrough fixture."""
    eps = float(doc.get("eps", 0.05))
    grid = RunScores(
        val_metric=float(doc["grid"]["val"]),
        val_loss=float(doc["grid"]["loss"]),
        test_metric=float(doc["grid"]["test"]),
    )
    out = []
    for rnd in doc["rounds"]:
        scores = RunScores(
            val_metric=float(rnd["val"]),
            val_loss=float(rnd.get("loss", doc["run_loss_default"])),
            test_metric=float(rnd["test"]),
        )
        out.append(classify_run(scores, grid, eps))
    return out


def load_walkthrough(path) -> dict:
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict) or "rounds" not in doc or "grid" not in doc:
        raise ValueError(f"fixture {path} is not a walkthrough fixture")
    return doc
