import io
import json

import pytest

from pyeval.evaluator import ToyObjective, serve


def run_serve(*messages):
    inp = io.StringIO("".join(json.dumps(m) + "\n" if isinstance(m, dict) else m
                              for m in messages))
    out = io.StringIO()
    code = serve(inp, out)
    return code, [json.loads(line) for line in out.getvalue().splitlines()]


def start_msg(trial_id=0, config=None, epochs=2, checkpoints_per_epoch=3, seed=42):
    return {
        "type": "start_trial",
        "trial_id": trial_id,
        "config": config or {"lr": 1e-4},
        "epochs": epochs,
        "checkpoints_per_epoch": checkpoints_per_epoch,
        "training_seed": seed,
    }


class TestToyObjective:
    def test_ceiling_is_deterministic_and_bounded(self):
        obj = ToyObjective()
        a = obj.ceiling({"lr": 1e-4}, 42)
        assert a == obj.ceiling({"lr": 1e-4}, 42)
        assert obj.base <= a < obj.base + obj.spread

    def test_ceiling_depends_on_config_and_seed(self):
        obj = ToyObjective()
        base = obj.ceiling({"lr": 1e-4}, 42)
        assert obj.ceiling({"lr": 2e-4}, 42) != base
        assert obj.ceiling({"lr": 1e-4}, 43) != base

    def test_curve_saturates_toward_ceiling(self):
        obj = ToyObjective()
        config = {"lr": 1e-4}
        vals = [obj.evaluate(config, s, 42)[0] for s in (1, 5, 100)]
        assert vals == sorted(vals)
        assert vals[-1] == pytest.approx(obj.ceiling(config, 42), abs=1e-3)

    def test_loss_mirrors_metric(self):
        val, loss = ToyObjective().evaluate({"lr": 1e-4}, 3, 42)
        assert loss == pytest.approx((100.0 - val) / 25.0)

    def test_held_out_metric_is_below_validation(self):
        obj = ToyObjective()
        val, _ = obj.evaluate({"lr": 1e-4}, 5, 42)
        test = obj.test_at({"lr": 1e-4}, 5, 42)
        assert val - 2.0 <= test <= val


class TestServe:
    def test_hello_comes_first(self):
        code, msgs = run_serve()
        assert code == 0
        assert msgs[0] == {"type": "hello", "task": "toy", "mode": "max"}

    def test_full_trial_stream(self):
        code, msgs = run_serve(start_msg())
        assert code == 0
        reports = [m for m in msgs if m["type"] == "report"]
        assert [r["step"] for r in reports] == [1, 2, 3, 4, 5, 6]
        assert all(r["trial_id"] == 0 for r in reports)
        assert all(r["cost_seconds"] == 1.0 for r in reports)
        final = msgs[-1]
        assert final["type"] == "final"
        # the curve increases monotonically, so the last step is the best
        assert final["best_step"] == 6
        best = max(reports, key=lambda r: r["val_metric"])
        assert best["step"] == final["best_step"]

    def test_identical_requests_reproduce_identical_streams(self):
        _, first = run_serve(start_msg())
        _, second = run_serve(start_msg())
        assert first == second

    def test_sequential_trials(self):
        _, msgs = run_serve(start_msg(trial_id=0), start_msg(trial_id=1, seed=7))
        finals = [m for m in msgs if m["type"] == "final"]
        assert [f["trial_id"] for f in finals] == [0, 1]

    def test_malformed_json_yields_error_record(self):
        _, msgs = run_serve("{not json\n", start_msg())
        assert msgs[1]["type"] == "error"
        assert "JSON" in msgs[1]["message"]
        # the loop keeps serving after an error
        assert msgs[-1]["type"] == "final"

    def test_unknown_type_yields_error_record(self):
        _, msgs = run_serve({"type": "report", "step": 1})
        assert msgs[1]["type"] == "error"
        assert "report" in msgs[1]["message"]

    def test_missing_start_fields_yield_error_record(self):
        _, msgs = run_serve({"type": "start_trial", "trial_id": 0})
        assert msgs[1]["type"] == "error"
        assert "config" in msgs[1]["message"]

    def test_blank_lines_and_late_stops_ignored(self):
        _, msgs = run_serve("\n", {"type": "stop", "trial_id": 9}, start_msg())
        assert [m["type"] for m in msgs] == ["hello"] + ["report"] * 6 + ["final"]

    def test_one_json_object_per_line(self):
        inp = io.StringIO(json.dumps(start_msg()) + "\n")
        out = io.StringIO()
        serve(inp, out)
        for line in out.getvalue().splitlines():
            json.loads(line)
            assert "\n" not in line
