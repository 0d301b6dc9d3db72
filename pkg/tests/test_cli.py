import json
from pathlib import Path

import yaml

from hpoharness.cli import (
    EXIT_OK,
    EXIT_REPLAY_MISMATCH,
    EXIT_USAGE,
    bundled_fixture_paths,
    main,
)
from hpoharness.space import LogUniform, SearchSpace, Uniform
from hpoharness.surrogate import SurrogateSpec

FIXTURES = Path(__file__).parent.parent / "src" / "hpoharness" / "fixtures"


def toy_spec_dict(**overrides):
    space = SearchSpace(
        entries={"lr": LogUniform(9.9e-5, 3.01e-4), "wr": Uniform(0.0, 0.2)},
        label="S_full",
        grid_values={"lr": (1e-4, 2e-4, 3e-4), "wr": (0.1,)},
    )
    kwargs = dict(
        space=space,
        optimum={"wr": 0.5},
        curvature={"wr": 4.0},
        epochs=2,
        checkpoints_per_epoch=5,
    )
    kwargs.update(overrides)
    return SurrogateSpec(**kwargs).as_dict()


def write_config(tmp_path, name="exp.yaml", spec=None, **overrides):
    full = {
        "label": "S_full",
        "entries": {
            "lr": {"kind": "loguniform", "lo": 9.9e-5, "hi": 3.01e-4},
            "wr": {"kind": "uniform", "lo": 0.0, "hi": 0.2},
        },
        "grid_values": {"lr": [1e-4, 2e-4, 3e-4], "wr": [0.1]},
    }
    smin = {
        "label": "S_min",
        "entries": {
            "lr": {"kind": "loguniform", "lo": 9.9e-5, "hi": 3.01e-4},
            "wr": {"kind": "fixed", "value": 0.1},
        },
        "grid_values": full["grid_values"],
    }
    doc = {
        "experiment_id": "cli-exp",
        "task": {"kind": "surrogate", "spec": spec or toy_spec_dict()},
        "grid": {"entries": {"lr": [1e-4, 2e-4, 3e-4], "wr": [0.1]}, "epochs": 2},
        "spaces": [full, smin],
        "algorithms": ["RS", "ASHA", "BO+ASHA"],
        "seeds": [1],
    }
    doc.update(overrides)
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return path


def store_kinds(path):
    return [json.loads(l)["kind"] for l in Path(path).read_text().splitlines()]


class TestUsageErrors:
    def test_no_subcommand(self):
        assert main([]) == EXIT_USAGE

    def test_unknown_flag(self):
        assert main(["grid", "--nope"]) == EXIT_USAGE

    def test_missing_config_file(self, tmp_path):
        assert main(["grid", "--config", str(tmp_path / "nope.yaml")]) == EXIT_USAGE

    def test_invalid_config_contents(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("experiment_id: x\n")  # no task
        assert main(["grid", "--config", str(path)]) == EXIT_USAGE

    def test_unknown_surrogate_preset_name(self, tmp_path):
        assert main(["surrogate-gen", "misaligned",
                     "--out", str(tmp_path / "s.yaml")]) == EXIT_USAGE


class TestGrid:
    def test_runs_and_persists(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "grid.jsonl"
        assert main(["grid", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        assert "grid baseline:" in capsys.readouterr().out
        kinds = store_kinds(out)
        assert kinds.count("trial") == 3
        assert kinds.count("run_summary") == 1


class TestHpo:
    def test_runs_and_persists(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "hpo.jsonl"
        assert main(["hpo", "--config", str(cfg), "--out", str(out),
                     "--algo", "RS"]) == EXIT_OK
        stdout = capsys.readouterr().out
        assert "RS seed=1:" in stdout
        records = [json.loads(l) for l in out.read_text().splitlines()]
        summaries = [r for r in records if r["kind"] == "run_summary"]
        assert [s["algorithm"] for s in summaries] == ["grid", "RS"]
        assert summaries[1]["space_label"] == "S_full"

    def test_space_flag_selects_ladder_entry(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "hpo.jsonl"
        assert main(["hpo", "--config", str(cfg), "--out", str(out),
                     "--algo", "RS", "--space", "S_min"]) == EXIT_OK
        summaries = [json.loads(l) for l in out.read_text().splitlines()
                     if json.loads(l)["kind"] == "run_summary"]
        assert summaries[-1]["space_label"] == "S_min"

    def test_algorithm_outside_configured_set(self, tmp_path):
        cfg = write_config(tmp_path, algorithms=["RS"])
        assert main(["hpo", "--config", str(cfg), "--algo", "ASHA",
                     "--out", str(tmp_path / "x.jsonl")]) == EXIT_USAGE

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path)
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for out in (a, b):
            assert main(["hpo", "--config", str(cfg), "--out", str(out),
                         "--algo", "BO+ASHA", "--budget-multiplier", "2.0"]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()


class TestTroubleshoot:
    def test_planted_overfit_full_procedure(self, tmp_path, capsys):
        spec = toy_spec_dict(optimum={"wr": 0.0}, curvature={"wr": 3.0},
                             test_shift={"wr": 0.5})
        cfg = write_config(tmp_path, spec=spec, seeds=[1, 2, 3])
        out = tmp_path / "ts.jsonl"
        assert main(["troubleshoot", "--config", str(cfg), "--out", str(out),
                     "--algo", "RS"]) == EXIT_OK
        stdout = capsys.readouterr().out
        assert "terminal:" in stdout
        kinds = store_kinds(out)
        assert "round" in kinds
        assert kinds[-1] == "procedure_terminal"


class TestReplay:
    def test_bundled_fixtures_pass(self, capsys):
        assert len(bundled_fixture_paths()) == 2
        assert main(["replay"]) == EXIT_OK
        stdout = capsys.readouterr().out
        assert "replay ok:" in stdout
        assert "electra/RTE/RS:" in stdout

    def test_walkthrough_fixture(self, capsys):
        path = FIXTURES / "walkthrough_electra_rte.yaml"
        assert main(["replay", str(path)]) == EXIT_OK
        assert "WeakOverfit" in capsys.readouterr().out

    def test_mismatching_fixture_exits_three(self, tmp_path, capsys):
        doc = yaml.safe_load((FIXTURES / "procedure_electra.yaml").read_text())
        rep = doc["tasks"][0]["algorithms"][0]["rounds"][0]["reps"][0]
        rep["expected"] = "Overfit" if rep["expected"] != "Overfit" else "Underperform"
        bad = tmp_path / "bad.yaml"
        bad.write_text(yaml.safe_dump(doc))
        assert main(["replay", str(bad)]) == EXIT_REPLAY_MISMATCH
        assert "replay mismatch" in capsys.readouterr().err


class TestReport:
    def test_renders_store(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "grid.jsonl"
        main(["grid", "--config", str(cfg), "--out", str(out)])
        capsys.readouterr()
        assert main(["report", "--out", str(out)]) == EXIT_OK
        assert "grid" in capsys.readouterr().out


class TestSurrogateGen:
    def test_written_spec_loads(self, tmp_path):
        out = tmp_path / "spec.yaml"
        assert main(["surrogate-gen", "planted-overfit", "--seed", "3",
                     "--out", str(out)]) == EXIT_OK
        spec = SurrogateSpec.from_dict(yaml.safe_load(out.read_text()))
        assert spec.seed == 3
        assert spec.test_shift  # divergence preset keeps its shift
