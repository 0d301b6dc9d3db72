"""Append-only experiment result log.

One JSON record per line. Record kinds: trial, run_summary, round,
procedure_terminal. Every record carries the schema version, the
experiment id, a monotone record id, and a timestamp (simulated-clock
seconds, so reruns of a deterministic experiment produce identical
bytes). A run_summary must reference only trial record ids already in
the store.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, Iterator, List, Optional

import jsonschema

SCHEMA_VERSION = 1

_COMMON_REQUIRED = ["kind", "schema_version", "experiment_id", "record_id", "timestamp"]

_REPORT_SCHEMA = {
    "type": "object",
    "required": ["step", "val_metric", "val_loss"],
    "properties": {
        "step": {"type": "integer", "minimum": 1},
        "val_metric": {"type": "number"},
        "val_loss": {"type": "number"},
    },
}

RECORD_SCHEMAS: Dict[str, dict] = {
    "trial": {
        "type": "object",
        "required": _COMMON_REQUIRED + ["trial_id", "config", "reports", "status"],
        "properties": {
            "trial_id": {"type": "integer", "minimum": 0},
            "config": {"type": "object"},
            "reports": {"type": "array", "items": _REPORT_SCHEMA},
            "best_checkpoint": {"type": ["object", "null"]},
            "test_metric_at_best": {"type": ["number", "null"]},
            "status": {
                "enum": ["running", "completed", "pruned", "truncated", "failed"]
            },
            "cost": {"type": "number", "minimum": 0},
            "start_time": {"type": "number", "minimum": 0},
        },
    },
    "run_summary": {
        "type": "object",
        "required": _COMMON_REQUIRED
        + ["algorithm", "trial_record_ids", "best_trial_id", "scores"],
        "properties": {
            "algorithm": {"type": "string"},
            "trial_record_ids": {"type": "array", "items": {"type": "integer"}},
            "best_trial_id": {"type": "integer"},
            "scores": {
                "type": "object",
                "required": ["val_metric", "val_loss", "test_metric"],
            },
            "budget_multiplier": {"type": "number"},
            "space_label": {"type": "string"},
            "rep_seed": {"type": "integer"},
            "deadline": {"type": "number"},
            "budget_used": {"type": "number"},
            "trials_completed": {"type": "integer"},
        },
    },
    "round": {
        "type": "object",
        "required": _COMMON_REQUIRED
        + ["round_index", "space_label", "budget_multiplier", "verdict", "action"],
        "properties": {
            "round_index": {"type": "integer", "minimum": 0},
            "space_label": {"type": "string"},
            "budget_multiplier": {"type": "number"},
            "verdict": {"type": "string"},
            "rep_verdicts": {"type": "array", "items": {"type": "string"}},
            "action": {"type": "string"},
            "run_record_ids": {"type": "array", "items": {"type": "integer"}},
            "fixes_applied": {"type": ["object", "null"]},
        },
    },
    "procedure_terminal": {
        "type": "object",
        "required": _COMMON_REQUIRED
        + ["terminal", "final_space_label", "final_budget_multiplier"],
        "properties": {
            "terminal": {"type": "string"},
            "final_space_label": {"type": "string"},
            "final_budget_multiplier": {"type": "number"},
            "round_record_ids": {"type": "array", "items": {"type": "integer"}},
        },
    },
}


class StoreError(RuntimeError):
    pass


class SchemaViolationError(StoreError):
    pass


class ReferentialIntegrityError(StoreError):
    pass


def validate_record(record: dict) -> None:
    kind = record.get("kind")
    if kind not in RECORD_SCHEMAS:
        raise SchemaViolationError(f"unknown record kind {kind!r}")
    try:
        jsonschema.validate(record, RECORD_SCHEMAS[kind])
    except jsonschema.ValidationError as exc:
        raise SchemaViolationError(f"{kind} record invalid: {exc.message}") from exc
    if kind == "trial":
        steps = [r["step"] for r in record["reports"]]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise SchemaViolationError(
                f"trial record {record['record_id']}: non-increasing step sequence {steps}"
            )


class ResultStore:
    """Single-writer append-only JSONL store for one experiment."""

    def __init__(self, path, experiment_id: str):
        self.path = Path(path)
        self.experiment_id = experiment_id
        self._next_id = 0
        self._ids_by_kind: Dict[str, set] = {k: set() for k in RECORD_SCHEMAS}
        if self.path.exists():
            for rec in self._iter_file():
                self._ids_by_kind[rec["kind"]].add(rec["record_id"])
                self._next_id = max(self._next_id, rec["record_id"] + 1)
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)

    def _iter_file(self) -> Iterator[dict]:
        with self.path.open() as fh:
            for line in fh:
                if line.strip():
                    yield json.loads(line)

    def persist(self, kind: str, payload: dict, timestamp: float = 0.0) -> int:
        record = dict(payload)
        record["kind"] = kind
        record["schema_version"] = SCHEMA_VERSION
        record["experiment_id"] = self.experiment_id
        record["record_id"] = self._next_id
        record["timestamp"] = timestamp
        validate_record(record)
        if kind == "run_summary":
            missing = [
                i for i in record["trial_record_ids"]
                if i not in self._ids_by_kind["trial"]
            ]
            if missing:
                raise ReferentialIntegrityError(
                    f"run_summary references absent trial record ids {missing}"
                )
        if kind == "procedure_terminal":
            missing = [
                i for i in record.get("round_record_ids", [])
                if i not in self._ids_by_kind["round"]
            ]
            if missing:
                raise ReferentialIntegrityError(
                    f"procedure_terminal references absent round record ids {missing}"
                )
        with self.path.open("a") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
        self._ids_by_kind[kind].add(record["record_id"])
        self._next_id += 1
        return record["record_id"]

    def records(self, kind: Optional[str] = None) -> List[dict]:
        out = []
        if not self.path.exists():
            return out
        for rec in self._iter_file():
            if kind is None or rec["kind"] == kind:
                out.append(rec)
        return out
