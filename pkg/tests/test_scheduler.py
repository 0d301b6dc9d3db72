import math

import numpy as np
import pytest

from hpoharness.scheduler import (
    AshaConfig,
    Decision,
    DuplicateReportError,
    RungLedger,
    SchedulerError,
    milestones,
    on_report,
)


class TestConfig:
    def test_defaults_validate(self):
        cfg = AshaConfig(grace_period=1, eta=4, max_t=50)
        assert milestones(cfg) == [1, 4, 16]

    def test_grace_scaling(self):
        assert milestones(AshaConfig(grace_period=2, eta=3, max_t=60)) == [2, 6, 18, 54]

    def test_invalid_params(self):
        with pytest.raises(SchedulerError):
            AshaConfig(grace_period=0, eta=4, max_t=10)
        with pytest.raises(SchedulerError):
            AshaConfig(grace_period=1, eta=1, max_t=10)
        with pytest.raises(SchedulerError):
            AshaConfig(grace_period=20, eta=4, max_t=10)


class TestOnReport:
    def cfg(self):
        return AshaConfig(grace_period=1, eta=4, max_t=100)

    def test_non_milestone_steps_continue_without_recording(self):
        ledger = RungLedger()
        assert on_report(ledger, self.cfg(), 0, 2, 50.0) is Decision.CONTINUE
        assert ledger.recorded(2) == []

    def test_first_trial_at_a_rung_continues(self):
        ledger = RungLedger()
        assert on_report(ledger, self.cfg(), 0, 1, 10.0) is Decision.CONTINUE

    def test_worse_later_trial_is_stopped(self):
        ledger = RungLedger()
        on_report(ledger, self.cfg(), 0, 1, 90.0)
        assert on_report(ledger, self.cfg(), 1, 1, 10.0) is Decision.STOP

    def test_better_later_trial_continues(self):
        ledger = RungLedger()
        on_report(ledger, self.cfg(), 0, 1, 10.0)
        assert on_report(ledger, self.cfg(), 1, 1, 90.0) is Decision.CONTINUE

    def test_ties_continue(self):
        ledger = RungLedger()
        cfg = self.cfg()
        on_report(ledger, cfg, 0, 1, 50.0)
        on_report(ledger, cfg, 1, 1, 50.0)
        assert on_report(ledger, cfg, 2, 1, 50.0) is Decision.CONTINUE

    def test_final_rung_always_continues(self):
        cfg = AshaConfig(grace_period=1, eta=4, max_t=4)
        ledger = RungLedger()
        on_report(ledger, cfg, 0, 4, 90.0)
        assert on_report(ledger, cfg, 1, 4, 1.0) is Decision.CONTINUE

    def test_keep_fraction(self):
        # with eta=2 and 4 trials recorded, the top 2 survive
        cfg = AshaConfig(grace_period=1, eta=2, max_t=100)
        ledger = RungLedger()
        decisions = [on_report(ledger, cfg, i, 1, obj)
                     for i, obj in enumerate([10.0, 20.0, 30.0, 25.0])]
        assert decisions == [Decision.CONTINUE, Decision.CONTINUE,
                             Decision.CONTINUE, Decision.CONTINUE]
        # a 5th trial below the surviving pair is cut: keep = ceil(5/2) = 3
        assert on_report(ledger, cfg, 4, 1, 15.0) is Decision.STOP

    def test_duplicate_report_rejected(self):
        ledger = RungLedger()
        on_report(ledger, self.cfg(), 0, 1, 10.0)
        with pytest.raises(DuplicateReportError):
            on_report(ledger, self.cfg(), 0, 1, 11.0)

    def test_invalid_report_values(self):
        ledger = RungLedger()
        with pytest.raises(SchedulerError):
            on_report(ledger, self.cfg(), 0, 0, 10.0)
        with pytest.raises(SchedulerError):
            on_report(ledger, self.cfg(), 0, 1, float("inf"))


def sort_oracle(rung_objectives, objective, eta):
    """Independent formulation: continue iff the objective is at least the
    keep-th largest value recorded at the rung (self included)."""
    values = sorted(rung_objectives + [objective], reverse=True)
    keep = math.ceil(len(values) / eta)
    return Decision.CONTINUE if objective >= values[keep - 1] else Decision.STOP


class TestAgainstSortOracle:
    def test_randomized_histories_match_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            eta = int(rng.integers(2, 5))
            cfg = AshaConfig(grace_period=1, eta=eta, max_t=64)
            rungs = milestones(cfg)
            ledger = RungLedger()
            shadow = {m: [] for m in rungs}
            for trial in range(int(rng.integers(2, 12))):
                for step in range(1, cfg.max_t + 1):
                    obj = float(rng.integers(0, 40)) / 10.0  # coarse: ties happen
                    decision = on_report(ledger, cfg, trial, step, obj)
                    if step in rungs:
                        if step >= cfg.max_t:
                            expected = Decision.CONTINUE
                        else:
                            expected = sort_oracle(shadow[step], obj, eta)
                        assert decision is expected, (eta, trial, step)
                        shadow[step].append(obj)
                    else:
                        assert decision is Decision.CONTINUE
                    if decision is Decision.STOP:
                        break
