"""Line-delimited wire protocol between the engine and an external evaluator.

Each message is one JSON object per line with a mandatory "type" field.
Transport is the evaluator subprocess's standard streams, so any training
loop that can read stdin and print lines can plug in. Unknown fields are
ignored; missing required fields are protocol errors naming the field.
"""
from __future__ import annotations

import io
import json
import os
import select
import subprocess
from collections import deque
from typing import Callable, Dict, List, Optional

from .engine import Report, TrialRecord
from .scheduler import Decision

DEFAULT_REPORT_TIMEOUT = 600.0

_REAL = (int, float)

# required fields and a loose type check per message type
MESSAGE_SCHEMAS: Dict[str, Dict[str, type]] = {
    "hello": {"task": str, "mode": str},
    "start_trial": {
        "trial_id": _REAL,
        "config": dict,
        "epochs": _REAL,
        "checkpoints_per_epoch": _REAL,
        "training_seed": _REAL,
    },
    "report": {
        "trial_id": _REAL,
        "step": _REAL,
        "val_metric": _REAL,
        "val_loss": _REAL,
        "cost_seconds": _REAL,
    },
    "stop": {"trial_id": _REAL},
    "final": {"trial_id": _REAL, "best_step": _REAL, "test_metric_at_best": _REAL},
    "error": {"message": str},
}


class ProtocolError(RuntimeError):
    def __init__(self, message: str, line_no: Optional[int] = None):
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)
        self.line_no = line_no


class EvaluatorFailure(RuntimeError):
    """The evaluator exited or timed out before delivering a final message."""


def validate_message(msg: dict, line_no: Optional[int] = None) -> dict:
    if not isinstance(msg, dict):
        raise ProtocolError(f"message must be a map, got {type(msg).__name__}", line_no)
    mtype = msg.get("type")
    if mtype is None:
        raise ProtocolError("missing mandatory field 'type'", line_no)
    schema = MESSAGE_SCHEMAS.get(mtype)
    if schema is None:
        raise ProtocolError(f"unknown message type {mtype!r}", line_no)
    for fld, expected in schema.items():
        if fld not in msg:
            raise ProtocolError(f"{mtype} message missing field {fld!r}", line_no)
        if not isinstance(msg[fld], expected) or isinstance(msg[fld], bool):
            raise ProtocolError(
                f"{mtype} field {fld!r} has invalid value {msg[fld]!r}", line_no
            )
    if mtype == "start_trial":
        for k, v in msg["config"].items():
            if not isinstance(v, (int, float, str)) or isinstance(v, bool):
                raise ProtocolError(
                    f"start_trial config value for {k!r} must be scalar", line_no
                )
    return msg


def parse_line(line: str, line_no: Optional[int] = None) -> dict:
    line = line.strip()
    if not line:
        raise ProtocolError("empty line", line_no)
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON ({exc.msg})", line_no) from exc
    return validate_message(msg, line_no)


def serialize(msg: dict) -> str:
    validate_message(msg)
    return json.dumps(msg, sort_keys=True, separators=(",", ":"))


class LineChannel:
    """Bidirectional newline-delimited channel over a pair of streams.

    When the reader exposes a file descriptor the channel does its own
    line buffering over raw reads, so a timeout wait cannot miss lines an
    intermediate buffered reader already slurped in. The channel must then
    be the stream's only reader.
    """

    def __init__(self, reader, writer):
        self._reader = reader
        self._writer = writer
        self._line_no = 0
        self._buf = b""
        self._pending: deque = deque()
        try:
            self._fd: Optional[int] = reader.fileno()
        except (AttributeError, OSError, ValueError):
            self._fd = None

    def send(self, msg: dict) -> None:
        data = serialize(msg) + "\n"
        if isinstance(self._writer, io.TextIOBase):
            self._writer.write(data)
        else:
            self._writer.write(data.encode())
        self._writer.flush()

    def _parse(self, line: str) -> dict:
        self._line_no += 1
        return parse_line(line, self._line_no)

    def receive(self, timeout: Optional[float] = None) -> Optional[dict]:
        """Next message, or None on end of stream."""
        if self._pending:
            return self._parse(self._pending.popleft())
        if self._fd is None:
            line = self._reader.readline()
            if line == "":
                return None
            return self._parse(line)
        while True:
            if timeout is not None:
                ready, _, _ = select.select([self._fd], [], [], timeout)
                if not ready:
                    raise EvaluatorFailure(f"no message within {timeout} s")
            chunk = os.read(self._fd, 65536)
            if chunk == b"":
                return None  # EOF; a trailing partial line is dropped
            self._buf += chunk
            if b"\n" in self._buf:
                *lines, self._buf = self._buf.split(b"\n")
                self._pending.extend(l.decode() for l in lines)
                return self._parse(self._pending.popleft())


def drive_trial(
    channel: LineChannel,
    start: dict,
    pruner_callback: Optional[Callable[[int, int, float], Decision]] = None,
    report_timeout: float = DEFAULT_REPORT_TIMEOUT,
) -> TrialRecord:
    """Run one trial over the channel and collect its record.

    Forwards the start_trial message, appends every report, and consults
    the pruner after each one; on a stop decision, sends stop and waits
    for the evaluator's final message.
    """
    validate_message(start)
    if start["type"] != "start_trial":
        raise ProtocolError("drive_trial needs a start_trial message")
    trial_id = start["trial_id"]
    channel.send(start)
    rec = TrialRecord(trial_id=trial_id, config=dict(start["config"]))
    stopping = False
    while True:
        try:
            msg = channel.receive(timeout=report_timeout)
        except EvaluatorFailure:
            rec.status = "failed"
            return rec
        if msg is None:
            rec.status = "pruned" if stopping and rec.reports else "failed"
            return rec
        if msg["type"] == "report":
            rec.append(
                Report(
                    step=int(msg["step"]),
                    val_metric=float(msg["val_metric"]),
                    val_loss=float(msg["val_loss"]),
                    cost_seconds=float(msg["cost_seconds"]),
                )
            )
            if not stopping and pruner_callback is not None:
                decision = pruner_callback(trial_id, int(msg["step"]), float(msg["val_metric"]))
                if decision is Decision.STOP:
                    channel.send({"type": "stop", "trial_id": trial_id})
                    stopping = True
        elif msg["type"] == "final":
            rec.test_metric_at_best = float(msg["test_metric_at_best"])
            rec.status = "pruned" if stopping else "completed"
            return rec
        elif msg["type"] == "error":
            rec.status = "failed"
            return rec
        else:
            raise ProtocolError(f"unexpected {msg['type']} message during trial")


class SubprocessSession:
    """Engine-facing trial session speaking the protocol to a child process."""

    def __init__(self, channel: LineChannel, start: dict, timeout: float):
        self._channel = channel
        self._trial_id = start["trial_id"]
        self._timeout = timeout
        self._final: Optional[dict] = None
        self._stopped = False
        channel.send(start)

    def next_report(self) -> Optional[Report]:
        if self._final is not None or self._stopped:
            return None
        while True:
            msg = self._channel.receive(timeout=self._timeout)
            if msg is None:
                raise EvaluatorFailure("evaluator stream closed mid-trial")
            if msg["type"] == "report":
                return Report(
                    step=int(msg["step"]),
                    val_metric=float(msg["val_metric"]),
                    val_loss=float(msg["val_loss"]),
                    cost_seconds=float(msg["cost_seconds"]),
                )
            if msg["type"] == "final":
                self._final = msg
                return None
            if msg["type"] == "error":
                raise EvaluatorFailure(msg["message"])

    def stop(self) -> None:
        if self._final is not None or self._stopped:
            return
        self._channel.send({"type": "stop", "trial_id": self._trial_id})
        self._stopped = True

    def finalize(self) -> Optional[float]:
        while self._final is None:
            msg = self._channel.receive(timeout=self._timeout)
            if msg is None:
                return None
            if msg["type"] == "final":
                self._final = msg
            elif msg["type"] not in ("report",):
                return None
        return float(self._final["test_metric_at_best"])


class SubprocessEvaluator:
    """EvaluatorHandle running an external evaluator command per the protocol."""

    def __init__(
        self,
        command: List[str],
        epochs: int,
        checkpoints_per_epoch: int,
        report_timeout: float = DEFAULT_REPORT_TIMEOUT,
    ):
        self.command = list(command)
        self.epochs = epochs
        self.checkpoints_per_epoch = checkpoints_per_epoch
        self.total_steps = epochs * checkpoints_per_epoch
        self._timeout = report_timeout
        # unbuffered binary pipes: LineChannel does its own line buffering
        self._proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            bufsize=0,
        )
        self.channel = LineChannel(self._proc.stdout, self._proc.stdin)
        hello = self.channel.receive(timeout=report_timeout)
        if hello is None or hello["type"] != "hello":
            raise ProtocolError("evaluator did not open with a hello message")
        if hello["mode"] != "max":
            raise ProtocolError(f"unsupported metric orientation {hello['mode']!r}")
        self.task_name = hello["task"]

    def open_trial(self, trial_id, config, training_seed) -> SubprocessSession:
        start = {
            "type": "start_trial",
            "trial_id": int(trial_id),
            "config": dict(config),
            "epochs": self.epochs,
            "checkpoints_per_epoch": self.checkpoints_per_epoch,
            "training_seed": int(training_seed),
        }
        return SubprocessSession(self.channel, start, self._timeout)

    def close(self) -> None:
        if self._proc.poll() is None:
            self._proc.stdin.close()
            try:
                self._proc.wait(timeout=10)
            except subprocess.TimeoutExpired:  # pragma: no cover
                self._proc.kill()
