import io
import json
import os
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hpoharness.protocol import (
    EvaluatorFailure,
    LineChannel,
    MESSAGE_SCHEMAS,
    ProtocolError,
    SubprocessEvaluator,
    drive_trial,
    parse_line,
    serialize,
    validate_message,
)
from hpoharness.scheduler import Decision

FIXTURE = Path(__file__).parent.parent / "src" / "hpoharness" / "fixtures" / "protocol_conformance.jsonl"

finite = st.floats(allow_nan=False, allow_infinity=False, width=32)

message_strategy = st.one_of(
    st.fixed_dictionaries({"type": st.just("hello"), "task": st.text(min_size=1), "mode": st.text(min_size=1)}),
    st.fixed_dictionaries({
        "type": st.just("start_trial"),
        "trial_id": st.integers(min_value=0, max_value=10**6),
        "config": st.dictionaries(
            st.text(min_size=1, max_size=8),
            st.one_of(st.integers(-100, 100), finite, st.text(max_size=8)),
            max_size=4,
        ),
        "epochs": st.integers(1, 100),
        "checkpoints_per_epoch": st.integers(1, 20),
        "training_seed": st.integers(0, 10**6),
    }),
    st.fixed_dictionaries({
        "type": st.just("report"),
        "trial_id": st.integers(0, 100),
        "step": st.integers(1, 1000),
        "val_metric": finite,
        "val_loss": finite,
        "cost_seconds": finite,
    }),
    st.fixed_dictionaries({"type": st.just("stop"), "trial_id": st.integers(0, 100)}),
    st.fixed_dictionaries({
        "type": st.just("final"),
        "trial_id": st.integers(0, 100),
        "best_step": st.integers(0, 1000),
        "test_metric_at_best": finite,
    }),
    st.fixed_dictionaries({"type": st.just("error"), "message": st.text()}),
)


class TestValidation:
    @settings(max_examples=200, deadline=None)
    @given(message_strategy)
    def test_serialize_parse_round_trip(self, msg):
        assert parse_line(serialize(msg)) == msg

    def test_every_schema_field_is_required(self):
        samples = {
            "hello": {"type": "hello", "task": "t", "mode": "max"},
            "start_trial": {"type": "start_trial", "trial_id": 0, "config": {},
                            "epochs": 1, "checkpoints_per_epoch": 1, "training_seed": 0},
            "report": {"type": "report", "trial_id": 0, "step": 1,
                       "val_metric": 1.0, "val_loss": 1.0, "cost_seconds": 1.0},
            "stop": {"type": "stop", "trial_id": 0},
            "final": {"type": "final", "trial_id": 0, "best_step": 1,
                      "test_metric_at_best": 1.0},
            "error": {"type": "error", "message": "m"},
        }
        for mtype, fields in MESSAGE_SCHEMAS.items():
            for fld in fields:
                broken = dict(samples[mtype])
                del broken[fld]
                with pytest.raises(ProtocolError, match=fld):
                    validate_message(broken)

    def test_unknown_extra_fields_are_ignored(self):
        msg = {"type": "stop", "trial_id": 0, "debug": "yes"}
        assert validate_message(msg) == msg

    def test_bool_is_not_numeric(self):
        with pytest.raises(ProtocolError):
            validate_message({"type": "stop", "trial_id": True})

    def test_config_values_must_be_scalar(self):
        msg = {"type": "start_trial", "trial_id": 0, "config": {"x": [1, 2]},
               "epochs": 1, "checkpoints_per_epoch": 1, "training_seed": 0}
        with pytest.raises(ProtocolError, match="scalar"):
            validate_message(msg)

    def test_line_numbers_reported(self):
        with pytest.raises(ProtocolError, match="line 7"):
            parse_line("not json", line_no=7)

    def test_conformance_fixture(self):
        cases = [json.loads(l) for l in FIXTURE.read_text().splitlines() if l.strip()]
        assert len(cases) >= 15
        for case in cases:
            if case["valid"]:
                parse_line(case["line"])
            else:
                with pytest.raises(ProtocolError):
                    parse_line(case["line"])


class _ScriptedChannel(LineChannel):
    """Channel whose inbound side is a scripted list of messages."""

    def __init__(self, inbound):
        self.sent = []
        self._inbound = list(inbound)
        self._line_no = 0

    def send(self, msg):
        self.sent.append(msg)

    def receive(self, timeout=None):
        if not self._inbound:
            return None
        nxt = self._inbound.pop(0)
        if nxt == "timeout":
            raise EvaluatorFailure("no message within 0 s")
        return nxt


def start_msg(trial_id=0):
    return {"type": "start_trial", "trial_id": trial_id, "config": {"lr": 1e-4},
            "epochs": 1, "checkpoints_per_epoch": 3, "training_seed": 42}


def report(step, val, trial_id=0):
    return {"type": "report", "trial_id": trial_id, "step": step,
            "val_metric": val, "val_loss": (100 - val) / 25, "cost_seconds": 1.0}


class TestDriveTrial:
    def test_complete_trial(self):
        channel = _ScriptedChannel([
            report(1, 50.0), report(2, 60.0), report(3, 70.0),
            {"type": "final", "trial_id": 0, "best_step": 3, "test_metric_at_best": 69.0},
        ])
        rec = drive_trial(channel, start_msg())
        assert rec.status == "completed"
        assert len(rec.reports) == 3
        assert rec.test_metric_at_best == pytest.approx(69.0)
        assert channel.sent[0]["type"] == "start_trial"

    def test_pruned_trial_sends_stop(self):
        stops_after_first = lambda tid, step, val: (
            Decision.STOP if step >= 1 else Decision.CONTINUE
        )
        channel = _ScriptedChannel([
            report(1, 50.0), report(2, 60.0),
            {"type": "final", "trial_id": 0, "best_step": 2, "test_metric_at_best": 59.0},
        ])
        rec = drive_trial(channel, start_msg(), pruner_callback=stops_after_first)
        assert rec.status == "pruned"
        assert {"type": "stop", "trial_id": 0} in channel.sent

    def test_eof_mid_trial_is_failure(self):
        rec = drive_trial(_ScriptedChannel([report(1, 50.0)]), start_msg())
        assert rec.status == "failed"

    def test_timeout_is_failure(self):
        rec = drive_trial(_ScriptedChannel([report(1, 50.0), "timeout"]), start_msg())
        assert rec.status == "failed"

    def test_error_message_is_failure(self):
        channel = _ScriptedChannel([{"type": "error", "message": "exploded"}])
        assert drive_trial(channel, start_msg()).status == "failed"

    def test_requires_start_trial_message(self):
        with pytest.raises(ProtocolError):
            drive_trial(_ScriptedChannel([]), {"type": "stop", "trial_id": 0})


class TestLineChannel:
    def test_text_stream_fallback(self):
        reader = io.StringIO(serialize({"type": "stop", "trial_id": 1}) + "\n")
        writer = io.StringIO()
        channel = LineChannel(reader, writer)
        assert channel.receive() == {"type": "stop", "trial_id": 1}
        assert channel.receive() is None
        channel.send({"type": "stop", "trial_id": 2})
        assert json.loads(writer.getvalue()) == {"type": "stop", "trial_id": 2}

    def test_fd_stream_with_burst_of_lines(self):
        # multiple lines arriving in one chunk must all be delivered even
        # though the descriptor goes quiet afterwards
        r_fd, w_fd = os.pipe()
        reader = os.fdopen(r_fd, "rb", buffering=0)
        burst = b"".join(
            (serialize({"type": "stop", "trial_id": i}) + "\n").encode() for i in range(3)
        )
        os.write(w_fd, burst)
        channel = LineChannel(reader, io.StringIO())
        for i in range(3):
            assert channel.receive(timeout=1.0) == {"type": "stop", "trial_id": i}
        os.close(w_fd)
        assert channel.receive(timeout=1.0) is None
        reader.close()

    def test_timeout_raises(self):
        r_fd, w_fd = os.pipe()
        reader = os.fdopen(r_fd, "rb", buffering=0)
        channel = LineChannel(reader, io.StringIO())
        with pytest.raises(EvaluatorFailure):
            channel.receive(timeout=0.05)
        os.close(w_fd)
        reader.close()


class TestSubprocessEvaluator:
    def test_handshake_and_sequential_trials(self):
        task = SubprocessEvaluator(
            ["python3", "-m", "pyeval"], epochs=1, checkpoints_per_epoch=4,
            report_timeout=30,
        )
        try:
            assert task.task_name == "toy"
            sess = task.open_trial(0, {"lr": 1e-4}, 42)
            steps = []
            while True:
                rep = sess.next_report()
                if rep is None:
                    break
                steps.append(rep.step)
            assert steps == [1, 2, 3, 4]
            assert sess.finalize() is not None
            # a second trial over the same channel
            sess2 = task.open_trial(1, {"lr": 2e-4}, 42)
            assert sess2.next_report().step == 1
            sess2.stop()
            assert sess2.finalize() is not None
        finally:
            task.close()

    def test_rejects_evaluator_without_hello(self):
        with pytest.raises(ProtocolError):
            SubprocessEvaluator(
                ["python3", "-c", "print('{\"type\":\"stop\",\"trial_id\":0}')"],
                epochs=1, checkpoints_per_epoch=1, report_timeout=10,
            )
