"""Command-line entry points.

Subcommands: grid (baseline), hpo (one algorithm at one budget/space),
troubleshoot (full procedure), replay (recorded scores through the
verdict logic, no engine), report (render a result store), and
surrogate-gen (materialize a surrogate preset spec).

Exit codes: 0 success, 1 usage or configuration error, 2 runtime
failure, 3 replay mismatch.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import yaml

from . import surrogate as surrogate_mod
from .config import ConfigError, ExperimentConfig, load_config
from .engine import (
    BudgetSpec,
    EngineError,
    GridBaseline,
    HpoRunResult,
    SurrogateEvaluator,
    run_grid_search,
    run_hpo,
)
from .procedure import ProcedureError, run_procedure
from .protocol import SubprocessEvaluator
from .replay import (
    load_fixture,
    load_walkthrough,
    replay_fixture,
    replay_walkthrough,
)
from .report import render_store
from .sampler import TpeParams
from .scheduler import AshaConfig
from .store import ResultStore, StoreError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_REPLAY_MISMATCH = 3

FIXTURE_DIR = Path(__file__).parent / "fixtures"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hpoharness")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="experiment config YAML")
        p.add_argument("--out", help="result store path (JSONL)")
        p.add_argument("--seed", type=int, help="override the repetition seed list with one seed")
        p.add_argument("--slots", type=int, help="worker slot count")

    p_grid = sub.add_parser("grid", help="run the grid-search baseline")
    common(p_grid)

    p_hpo = sub.add_parser("hpo", help="run one HPO algorithm at one budget and space")
    common(p_hpo)
    p_hpo.add_argument("--algo", help="algorithm name (default: first configured)")
    p_hpo.add_argument("--budget-multiplier", type=float, default=1.0)
    p_hpo.add_argument("--space", help="search-space label (default: first of the ladder)")

    p_ts = sub.add_parser("troubleshoot", help="drive the troubleshooting procedure")
    common(p_ts)
    p_ts.add_argument("--algo", help="algorithm name (default: first configured)")

    p_replay = sub.add_parser("replay", help="replay recorded scores through the verdict logic")
    p_replay.add_argument(
        "fixtures", nargs="*", help="fixture files (default: bundled score fixtures)"
    )

    p_report = sub.add_parser("report", help="render a result store as text tables")
    p_report.add_argument("--out", required=True, help="result store path (JSONL)")

    p_gen = sub.add_parser("surrogate-gen", help="write a surrogate preset spec")
    p_gen.add_argument("preset", choices=surrogate_mod.PRESET_NAMES)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="output YAML path")
    return parser


def _build_task(cfg: ExperimentConfig):
    task = cfg["task"]
    if task["kind"] == "surrogate":
        if task.get("spec"):
            spec = surrogate_mod.SurrogateSpec.from_dict(task["spec"])
        else:
            spec = surrogate_mod.preset(task["preset"], seed=task.get("seed", 0))
        return SurrogateEvaluator(spec)
    return SubprocessEvaluator(
        command=task["command"],
        epochs=task["epochs"],
        checkpoints_per_epoch=task["checkpoints_per_epoch"],
    )


def _store_for(cfg: ExperimentConfig, args) -> ResultStore:
    path = args.out or f"{cfg.experiment_id}.jsonl"
    return ResultStore(path, cfg.experiment_id)


def _seeds(cfg: ExperimentConfig, args) -> List[int]:
    if getattr(args, "seed", None) is not None:
        return [args.seed]
    return list(cfg["seeds"])


def _slots(cfg: ExperimentConfig, args) -> int:
    return args.slots if getattr(args, "slots", None) is not None else cfg["slots"]


def _persist_trials(store: ResultStore, trials) -> List[int]:
    return [
        store.persist("trial", t.as_dict(), timestamp=t.start_time) for t in trials
    ]


def _persist_baseline(store: ResultStore, baseline: GridBaseline) -> int:
    ids = _persist_trials(store, baseline.trials)
    return store.persist(
        "run_summary",
        {
            "algorithm": "grid",
            "trial_record_ids": ids,
            "best_trial_id": baseline.best_trial_id,
            "scores": {
                "val_metric": baseline.scores.val_metric,
                "val_loss": baseline.scores.val_loss,
                "test_metric": baseline.scores.test_metric,
            },
        },
        timestamp=baseline.runtime_seconds,
    )


def _persist_hpo_run(
    store: ResultStore, run: HpoRunResult, rep_seed: int,
    budget_multiplier: float, space_label: str,
) -> int:
    ids = _persist_trials(store, run.trials)
    return store.persist(
        "run_summary",
        {
            "algorithm": run.algorithm,
            "trial_record_ids": ids,
            "best_trial_id": run.best_trial_id,
            "scores": {
                "val_metric": run.scores.val_metric,
                "val_loss": run.scores.val_loss,
                "test_metric": run.scores.test_metric,
            },
            "rep_seed": rep_seed,
            "budget_multiplier": budget_multiplier,
            "space_label": space_label,
            "deadline": run.deadline,
            "budget_used": run.budget_used,
            "trials_completed": run.trials_completed,
        },
        timestamp=run.budget_used,
    )


def _cmd_grid(args) -> int:
    cfg = load_config(args.config)
    task = _build_task(cfg)
    try:
        baseline = run_grid_search(task, cfg.grid_spec())
        store = _store_for(cfg, args)
        _persist_baseline(store, baseline)
    finally:
        task.close()
    s = baseline.scores
    print(
        f"grid baseline: val={s.val_metric:.1f} loss={s.val_loss:.4f} "
        f"test={s.test_metric:.1f} 1GST={baseline.runtime_seconds:.1f}s"
    )
    return EXIT_OK


def _cmd_hpo(args) -> int:
    cfg = load_config(args.config)
    algo = args.algo or cfg["algorithms"][0]
    if algo not in cfg["algorithms"]:
        raise ConfigError(f"algorithm {algo!r} not in configured set {cfg['algorithms']}")
    space = (
        cfg.space_by_label(args.space) if args.space else cfg.space_ladder()[0]
    )
    task = _build_task(cfg)
    store = _store_for(cfg, args)
    try:
        baseline = run_grid_search(task, cfg.grid_spec())
        _persist_baseline(store, baseline)
        budget = BudgetSpec(
            gst_multiplier=args.budget_multiplier,
            gst_seconds=baseline.runtime_seconds,
        )
        sched = cfg["scheduler"]
        samp = cfg["sampler"]
        for seed in _seeds(cfg, args):
            run = run_hpo(
                algo,
                space,
                budget,
                task,
                rep_seed=seed,
                asha=AshaConfig(
                    grace_period=sched["grace_period"],
                    eta=sched["eta"],
                    max_t=task.total_steps,
                ),
                tpe_params=TpeParams(**samp),
                slots=_slots(cfg, args),
            )
            _persist_hpo_run(store, run, seed, args.budget_multiplier, space.label)
            s = run.scores
            print(
                f"{algo} seed={seed}: val={s.val_metric:.1f} loss={s.val_loss:.4f} "
                f"test={s.test_metric:.1f} trials={len(run.trials)}"
            )
    finally:
        task.close()
    return EXIT_OK


def _cmd_troubleshoot(args) -> int:
    cfg = load_config(args.config)
    algo = args.algo or cfg["algorithms"][0]
    if algo not in cfg["algorithms"]:
        raise ConfigError(f"algorithm {algo!r} not in configured set {cfg['algorithms']}")
    task = _build_task(cfg)
    store = _store_for(cfg, args)
    sched = cfg["scheduler"]
    samp = cfg["sampler"]
    try:
        result = run_procedure(
            task,
            cfg.grid_spec(),
            algo,
            spaces=cfg.space_ladder(),
            budget_ladder=cfg["budget_ladder"],
            rep_seeds=_seeds(cfg, args),
            mine=cfg["space_mode"] == "mining",
            eps=cfg["tolerances"]["eps"],
            asha=AshaConfig(
                grace_period=sched["grace_period"],
                eta=sched["eta"],
                max_t=task.total_steps,
            ),
            tpe_params=TpeParams(**samp),
            slots=_slots(cfg, args),
        )
        grid_id = _persist_baseline(store, result.baseline)
        round_ids = []
        for outcome in result.rounds:
            run_ids = [
                _persist_hpo_run(
                    store, run, seed, outcome.budget_multiplier, outcome.space_label
                )
                for run, seed in zip(outcome.runs, _seeds(cfg, args))
            ]
            round_ids.append(
                store.persist(
                    "round",
                    {
                        "round_index": outcome.index,
                        "space_label": outcome.space_label,
                        "budget_multiplier": outcome.budget_multiplier,
                        "verdict": outcome.verdict.kind.value,
                        "rep_verdicts": [v.value for v in outcome.verdict.rep_verdicts],
                        "action": outcome.action.value,
                        "run_record_ids": run_ids,
                        "fixes_applied": outcome.fixes_applied,
                    },
                    timestamp=max(r.budget_used for r in outcome.runs),
                )
            )
        store.persist(
            "procedure_terminal",
            {
                "terminal": result.terminal.value,
                "final_space_label": result.final_space_label,
                "final_budget_multiplier": result.final_budget_multiplier,
                "round_record_ids": round_ids,
            },
            timestamp=max(
                (r.budget_used for o in result.rounds for r in o.runs), default=0.0
            ),
        )
    finally:
        task.close()
    trace = " -> ".join(a.value for a in result.actions)
    print(f"{algo}: {trace}")
    print(
        f"terminal: {result.terminal.value} w/ "
        f"{result.final_budget_multiplier:g}GST, {result.final_space_label}"
    )
    return EXIT_OK


def bundled_fixture_paths() -> List[Path]:
    return sorted(FIXTURE_DIR.glob("procedure_*.yaml"))


def _cmd_replay(args) -> int:
    paths = [Path(p) for p in args.fixtures] or bundled_fixture_paths()
    if not paths:
        print("error: no replay fixtures found", file=sys.stderr)
        return EXIT_USAGE
    total_cells = 0
    total_rounds = 0
    for path in paths:
        try:
            doc = load_fixture(path)
        except ValueError:
            verdicts = replay_walkthrough(load_walkthrough(path))
            print(f"{path.name}: {[v.value for v in verdicts]}")
            continue
        result = replay_fixture(doc)
        total_cells += result.cells_checked
        total_rounds += result.rounds_checked
        if not result.ok:
            print(f"replay mismatch in {path.name}: {result.mismatches[0]}", file=sys.stderr)
            return EXIT_REPLAY_MISMATCH
        for key, actions in sorted(result.actions.items()):
            print(f"{key}: {' -> '.join(a.value for a in actions)}")
    print(f"replay ok: {total_cells} cells, {total_rounds} rounds")
    return EXIT_OK


def _cmd_report(args) -> int:
    store = ResultStore(args.out, experiment_id="report")
    sys.stdout.write(render_store(store))
    return EXIT_OK


def _cmd_surrogate_gen(args) -> int:
    spec = surrogate_mod.preset(args.preset, seed=args.seed)
    with open(args.out, "w") as fh:
        yaml.safe_dump(spec.as_dict(), fh, sort_keys=True)
    print(f"wrote {args.preset} spec to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "grid": _cmd_grid,
    "hpo": _cmd_hpo,
    "troubleshoot": _cmd_troubleshoot,
    "replay": _cmd_replay,
    "report": _cmd_report,
    "surrogate-gen": _cmd_surrogate_gen,
}


def command_set():
    return set(_COMMANDS)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EngineError, ProcedureError, StoreError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
