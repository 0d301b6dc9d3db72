"""Closed-form objective and the stdin/stdout serving loop.

Messages are one JSON object per line. Inbound: start_trial, stop.
Outbound: hello, report (one per planned checkpoint), final, error.
Everything is deterministic given (config, step, training_seed).
"""
from __future__ import annotations

import hashlib
import json
import math
import select
import sys
from dataclasses import dataclass
from typing import Optional, Tuple


def _unit_hash(*parts) -> float:
    """Deterministic value in [0, 1) from the given parts."""
    key = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(key.encode()).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


@dataclass
class ToyObjective:
    """A smooth, saturating learning curve with a config-dependent ceiling.

    The ceiling is a deterministic hash of (config, training_seed), so
    distinct configs behave like distinct models while identical
    start_trial messages reproduce identical report streams.
    """

    base: float = 70.0
    spread: float = 20.0
    rate: float = 0.15
    cost_seconds: float = 1.0

    def ceiling(self, config: dict, training_seed: int) -> float:
        items = sorted((k, repr(v)) for k, v in config.items())
        return self.base + self.spread * _unit_hash("ceil", training_seed, items)

    def evaluate(self, config: dict, step: int, training_seed: int) -> Tuple[float, float]:
        top = self.ceiling(config, training_seed)
        val = top * (1.0 - 0.6 * math.exp(-self.rate * step))
        return val, (100.0 - val) / 25.0

    def test_at(self, config: dict, step: int, training_seed: int) -> float:
        val, _ = self.evaluate(config, step, training_seed)
        items = sorted((k, repr(v)) for k, v in config.items())
        return val - 2.0 * _unit_hash("test", training_seed, items)


def _emit(out, msg: dict) -> None:
    out.write(json.dumps(msg, sort_keys=True) + "\n")
    out.flush()


def _pending_stop(inp, trial_id: int) -> bool:
    """Non-blocking check for a stop message addressed to this trial."""
    try:
        fd_ok = hasattr(inp, "fileno") and inp.fileno() >= 0
    except (OSError, ValueError):
        fd_ok = False
    if not fd_ok:
        return False
    while select.select([inp], [], [], 0)[0]:
        line = inp.readline()
        if line == "":
            return False
        try:
            msg = json.loads(line)
        except json.JSONDecodeError:
            continue
        if msg.get("type") == "stop" and msg.get("trial_id") == trial_id:
            return True
    return False


def _run_trial(msg: dict, objective: ToyObjective, inp, out) -> None:
    trial_id = msg["trial_id"]
    config = msg["config"]
    seed = msg["training_seed"]
    total = msg["epochs"] * msg["checkpoints_per_epoch"]
    best_step, best_val = 0, -math.inf
    for step in range(1, total + 1):
        val, loss = objective.evaluate(config, step, seed)
        if val > best_val:
            best_step, best_val = step, val
        _emit(out, {
            "type": "report",
            "trial_id": trial_id,
            "step": step,
            "val_metric": val,
            "val_loss": loss,
            "cost_seconds": objective.cost_seconds,
        })
        if step < total and _pending_stop(inp, trial_id):
            break
    _emit(out, {
        "type": "final",
        "trial_id": trial_id,
        "best_step": best_step,
        "test_metric_at_best": objective.test_at(config, best_step, seed),
    })


_START_FIELDS = ("trial_id", "config", "epochs", "checkpoints_per_epoch", "training_seed")


def serve(inp=None, out=None, objective: Optional[ToyObjective] = None) -> int:
    inp = inp if inp is not None else sys.stdin
    out = out if out is not None else sys.stdout
    objective = objective or ToyObjective()
    _emit(out, {"type": "hello", "task": "toy", "mode": "max"})
    for line in iter(inp.readline, ""):
        if not line.strip():
            continue
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            _emit(out, {"type": "error", "message": f"not valid JSON: {exc.msg}"})
            continue
        mtype = msg.get("type")
        if mtype == "start_trial":
            missing = [f for f in _START_FIELDS if f not in msg]
            if missing:
                _emit(out, {"type": "error", "message": f"start_trial missing {missing}"})
                continue
            _run_trial(msg, objective, inp, out)
        elif mtype == "stop":
            # stop for a trial that already finished: nothing to do
            continue
        else:
            _emit(out, {"type": "error", "message": f"unexpected message type {mtype!r}"})
    return 0
