import pytest

from hpoharness.engine import (
    BudgetSpec,
    EmptyRunError,
    EngineError,
    SurrogateEvaluator,
    TrialRecord,
    Report,
    checkpoint_plan,
    run_grid_search,
    run_hpo,
    select_best,
)
from hpoharness.scheduler import AshaConfig
from hpoharness.space import GridSpec, LogUniform, SearchSpace, Uniform
from hpoharness.surrogate import SurrogateSpec


def toy_space():
    return SearchSpace(
        entries={"lr": LogUniform(1e-5, 1e-3), "wr": Uniform(0.0, 0.2)},
        label="toy",
    )


def toy_spec(**overrides):
    kwargs = dict(
        space=toy_space(),
        optimum={"wr": 0.2},
        curvature={"wr": 4.0},
        epochs=2,
        checkpoints_per_epoch=5,
    )
    kwargs.update(overrides)
    return SurrogateSpec(**kwargs)


def toy_grid():
    return GridSpec(entries={"lr": (1e-4, 2e-4, 3e-4), "wr": (0.1,)}, epochs=2)


class TestTrialRecord:
    def test_best_checkpoint_prefers_metric_then_loss_then_step(self):
        rec = TrialRecord(trial_id=0, config={})
        rec.append(Report(1, 80.0, 0.9, 1.0))
        rec.append(Report(2, 81.0, 0.8, 1.0))
        rec.append(Report(3, 81.0, 0.7, 1.0))
        assert rec.best_checkpoint.step == 3
        assert rec.cost == pytest.approx(3.0)

    def test_non_increasing_step_rejected(self):
        rec = TrialRecord(trial_id=0, config={})
        rec.append(Report(2, 80.0, 0.9, 1.0))
        with pytest.raises(EngineError):
            rec.append(Report(2, 81.0, 0.8, 1.0))


class TestSelectBest:
    def test_global_best_across_trials(self):
        a = TrialRecord(trial_id=0, config={})
        a.append(Report(1, 80.0, 0.9, 1.0))
        b = TrialRecord(trial_id=1, config={})
        b.append(Report(1, 85.0, 0.9, 1.0))
        trial_id, ckpt = select_best([a, b])
        assert trial_id == 1 and ckpt.val_metric == 85.0

    def test_tie_breaks_by_lower_trial_id(self):
        a = TrialRecord(trial_id=0, config={})
        a.append(Report(1, 85.0, 0.9, 1.0))
        b = TrialRecord(trial_id=1, config={})
        b.append(Report(1, 85.0, 0.9, 1.0))
        assert select_best([a, b])[0] == 0

    def test_no_reports_raises(self):
        with pytest.raises(EmptyRunError):
            select_best([TrialRecord(trial_id=0, config={})])


class TestCheckpointPlan:
    def test_density_by_task_size(self):
        assert len(checkpoint_plan(3, "small")) == 15
        assert len(checkpoint_plan(3, "large")) == 30

    def test_invalid_args(self):
        with pytest.raises(EngineError):
            checkpoint_plan(0, "small")
        with pytest.raises(EngineError):
            checkpoint_plan(3, "medium")


class TestGridSearch:
    def test_serial_runtime_is_sum_of_costs(self):
        task = SurrogateEvaluator(toy_spec())
        baseline = run_grid_search(task, toy_grid())
        # 3 configs x 10 checkpoints x 1s
        assert baseline.runtime_seconds == pytest.approx(30.0)
        assert len(baseline.trials) == 3
        assert all(t.status == "completed" for t in baseline.trials)

    def test_scores_match_best_trial(self):
        task = SurrogateEvaluator(toy_spec())
        baseline = run_grid_search(task, toy_grid())
        best = next(t for t in baseline.trials if t.trial_id == baseline.best_trial_id)
        assert baseline.scores.val_metric == best.best_checkpoint.val_metric
        assert baseline.scores.test_metric == best.test_metric_at_best


class TestRunHpo:
    def budget(self, multiplier=1.0):
        return BudgetSpec(gst_multiplier=multiplier, gst_seconds=30.0)

    def test_unknown_algorithm_rejected(self):
        task = SurrogateEvaluator(toy_spec())
        with pytest.raises(EngineError):
            run_hpo("CMA-ES", toy_space(), self.budget(), task, rep_seed=1)

    def test_rs_fills_the_budget_with_full_trials(self):
        task = SurrogateEvaluator(toy_spec())
        run = run_hpo("RS", toy_space(), self.budget(), task, rep_seed=1)
        assert len(run.trials) == 3  # 10s per trial, 30s budget
        assert run.trials_completed == 3
        assert run.budget_used <= run.deadline

    def test_budget_scales_trial_count(self):
        task = SurrogateEvaluator(toy_spec())
        run = run_hpo("RS", toy_space(), self.budget(4.0), task, rep_seed=1)
        assert len(run.trials) == 12

    def test_deadline_truncates_in_flight_trial(self):
        task = SurrogateEvaluator(toy_spec())
        budget = BudgetSpec(gst_multiplier=1.0, gst_seconds=25.0)
        run = run_hpo("RS", toy_space(), budget, task, rep_seed=1)
        assert run.trials[-1].status == "truncated"
        assert len(run.trials[-1].reports) == 5  # cut at the first step past 25s

    def test_asha_prunes_and_runs_more_trials(self):
        task = SurrogateEvaluator(toy_spec())
        rs = run_hpo("RS", toy_space(), self.budget(), task, rep_seed=1)
        asha = run_hpo(
            "ASHA", toy_space(), self.budget(), task, rep_seed=1,
            asha=AshaConfig(grace_period=1, eta=4, max_t=task.total_steps),
        )
        assert len(asha.trials) > len(rs.trials)
        assert any(t.status == "pruned" for t in asha.trials)

    def test_bo_asha_runs_and_stays_in_space(self):
        task = SurrogateEvaluator(toy_spec())
        run = run_hpo("BO+ASHA", toy_space(), self.budget(4.0), task, rep_seed=1)
        space = toy_space()
        for t in run.trials:
            assert space.contains(t.config)

    def test_deterministic_rerun(self):
        task = SurrogateEvaluator(toy_spec())
        a = run_hpo("ASHA", toy_space(), self.budget(), task, rep_seed=3)
        b = run_hpo("ASHA", toy_space(), self.budget(), task, rep_seed=3)
        assert [t.as_dict() for t in a.trials] == [t.as_dict() for t in b.trials]

    def test_different_seeds_differ(self):
        task = SurrogateEvaluator(toy_spec())
        a = run_hpo("RS", toy_space(), self.budget(), task, rep_seed=1)
        b = run_hpo("RS", toy_space(), self.budget(), task, rep_seed=2)
        assert [t.config for t in a.trials] != [t.config for t in b.trials]

    def test_max_trials_cap(self):
        task = SurrogateEvaluator(toy_spec())
        run = run_hpo("RS", toy_space(), self.budget(4.0), task, rep_seed=1, max_trials=2)
        assert len(run.trials) == 2

    def test_multiple_slots_run_more_concurrent_work(self):
        task = SurrogateEvaluator(toy_spec())
        one = run_hpo("RS", toy_space(), self.budget(), task, rep_seed=1, slots=1)
        two = run_hpo("RS", toy_space(), self.budget(), task, rep_seed=1, slots=2)
        assert len(two.trials) == 2 * len(one.trials)
        # wall-clock deadline still respected per slot
        assert all(t.start_time + t.cost <= two.deadline + 1e-9 for t in two.trials)

    def test_invalid_slots(self):
        task = SurrogateEvaluator(toy_spec())
        with pytest.raises(EngineError):
            run_hpo("RS", toy_space(), self.budget(), task, rep_seed=1, slots=0)

    def test_pruned_trials_enter_history_with_last_objective(self):
        captured = {}
        import hpoharness.engine as engine_mod

        orig = engine_mod.tpe_suggest

        def spy(history, space, params, rng):
            captured["history"] = list(history)
            return orig(history, space, params, rng)

        task = SurrogateEvaluator(toy_spec())
        engine_mod.tpe_suggest = spy
        try:
            run_hpo("BO+ASHA", toy_space(), self.budget(4.0), task, rep_seed=1)
        finally:
            engine_mod.tpe_suggest = orig
        pruned = [o for o in captured["history"] if o.status == "pruned"]
        completed = [o for o in captured["history"] if o.status == "completed"]
        assert completed, "expected completed observations in the history"
        assert pruned, "expected pruned observations in the history"

    def test_budget_must_be_positive(self):
        with pytest.raises(EngineError):
            BudgetSpec(gst_multiplier=0.0, gst_seconds=30.0)
        with pytest.raises(EngineError):
            BudgetSpec(gst_multiplier=1.0, gst_seconds=0.0)
