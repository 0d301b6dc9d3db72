"""Plain-text rendering of stored results.

Tables mirror the layout of the source result tables: one row per
repetition, an average row, and the grid baseline row. Output is a pure
function of the store contents, so re-rendering the same store is
byte-identical.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence

from .store import ResultStore


def _fmt(x: Optional[float], width: int = 8, decimals: int = 1) -> str:
    if x is None:
        return "-".rjust(width)
    return f"{x:.{decimals}f}".rjust(width)


def _row(label: str, val, loss, test, label_width: int) -> str:
    return (
        label.ljust(label_width)
        + _fmt(val)
        + _fmt(loss, decimals=4)
        + _fmt(test)
    )


def render_runs(
    run_records: Sequence[dict],
    grid_record: Optional[dict] = None,
    title: str = "",
) -> str:
    """One table: per-rep rows, average row, grid baseline row."""
    label_width = 8
    lines = []
    if title:
        lines.append(title)
    lines.append("".ljust(label_width) + "val".rjust(8) + "loss".rjust(8) + "test".rjust(8))
    vals, losses, tests = [], [], []
    for i, rec in enumerate(run_records, start=1):
        s = rec["scores"]
        vals.append(s["val_metric"])
        losses.append(s["val_loss"])
        tests.append(s["test_metric"])
        lines.append(_row(f"rep{i}", s["val_metric"], s["val_loss"], s["test_metric"], label_width))
    if vals:
        n = len(vals)
        tests_known = [t for t in tests if t is not None]
        avg_test = sum(tests_known) / len(tests_known) if tests_known else None
        lines.append(_row("Avg", sum(vals) / n, sum(losses) / n, avg_test, label_width))
    if grid_record is not None:
        s = grid_record["scores"]
        lines.append(_row("grid", s["val_metric"], s["val_loss"], s["test_metric"], label_width))
    return "\n".join(lines) + "\n"


def render_store(store: ResultStore) -> str:
    """Render every round (or flat run set) recorded in a store."""
    runs = {r["record_id"]: r for r in store.records("run_summary")}
    grid_record = next(
        (r for r in runs.values() if r["algorithm"] == "grid"), None
    )
    rounds = store.records("round")
    blocks: List[str] = []
    if rounds:
        consumed = set()
        for rnd in rounds:
            members = [runs[i] for i in rnd.get("run_record_ids", []) if i in runs]
            consumed.update(r["record_id"] for r in members)
            title = (
                f"round {rnd['round_index']}"
                f"  [{rnd['space_label']}, {rnd['budget_multiplier']:g}GST]"
                f"  verdict={rnd['verdict']}  action={rnd['action']}"
            )
            blocks.append(render_runs(members, grid_record, title=title))
        for term in store.records("procedure_terminal"):
            blocks.append(
                f"terminal: {term['terminal']} w/ "
                f"{term['final_budget_multiplier']:g}GST, {term['final_space_label']}\n"
            )
    else:
        hpo_runs = [r for r in runs.values() if r["algorithm"] != "grid"]
        if hpo_runs:
            alg = hpo_runs[0]["algorithm"]
            blocks.append(render_runs(hpo_runs, grid_record, title=alg))
        elif grid_record is not None:
            blocks.append(render_runs([], grid_record, title="grid baseline"))
    return "\n".join(blocks)
