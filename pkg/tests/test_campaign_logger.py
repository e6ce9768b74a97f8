"""Tests for per-trial campaign logging"""

import json

import pytest

from adapters.logging.campaign_logger import (CampaignLogger, TrialMetrics,
                                              TrialRecord, get_campaign_logger)
from core.domain.models import TrialOutcome


def _finish(trial_logger: CampaignLogger, property_id: str, trial: int, passed: bool,
            adversarial: bool = False, details=None) -> TrialRecord:
    context = trial_logger.start_trial(property_id, trial, seed=1000 + trial)
    outcome = TrialOutcome(trial=trial, seed=1000 + trial, passed=passed, adversarial=adversarial,
                           details=details or {})
    return trial_logger.end_trial(context, outcome)


@pytest.fixture
def file_logger(tmp_path):
    return CampaignLogger(storage_path=str(tmp_path / "logs"), enable_file_logging=True)


class TestCampaignLogger:
    """Records, metrics and the JSONL trail"""

    def test_record_fields(self, file_logger):
        record = _finish(file_logger, "LIFT_IFF", 3, True, adversarial=True)
        assert (record.property_id, record.trial, record.seed) == ("LIFT_IFF", 3, 1003)
        assert record.passed and record.adversarial
        assert record.duration_seconds >= 0
        assert record.error is None

    def test_duration_copied_to_outcome(self, file_logger):
        context = file_logger.start_trial("ALBERT_K1", 0, 5)
        outcome = TrialOutcome(trial=0, seed=5, passed=True, adversarial=False)
        record = file_logger.end_trial(context, outcome)
        assert outcome.duration_seconds == record.duration_seconds

    def test_failed_trial_keeps_error(self, file_logger):
        record = _finish(file_logger, "A2_IMPLIES_NONDEG", 0, False, details={"error": "boom"})
        assert record.error == "boom"

    def test_metrics_per_property(self, file_logger):
        for trial in range(4):
            _finish(file_logger, "LIFT_IFF", trial, passed=trial != 2, adversarial=trial == 0)
        _finish(file_logger, "ALBERT_K1", 0, True)
        metrics = file_logger.get_property_metrics("LIFT_IFF")
        assert (metrics.total_trials, metrics.passed, metrics.failed, metrics.adversarial) == (4, 3, 1, 1)
        assert file_logger.global_metrics.total_trials == 5
        assert file_logger.get_property_metrics("EQUIVALENCE_44") is None

    def test_jsonl_trail(self, file_logger, tmp_path):
        for trial in range(3):
            _finish(file_logger, "PRESYM_DOUBLE_ORTHO", trial, True)
        lines = (tmp_path / "logs" / "trials.jsonl").read_text().splitlines()
        assert [json.loads(line)["trial"] for line in lines] == [0, 1, 2]
        assert TrialRecord(**json.loads(lines[-1])).seed == 1002

    def test_without_file_logging(self, tmp_path):
        trial_logger = CampaignLogger(storage_path=str(tmp_path / "unused"))
        _finish(trial_logger, "LIFT_IFF", 0, True)
        assert not (tmp_path / "unused").exists()

    def test_report(self, file_logger):
        _finish(file_logger, "LIFT_IFF", 0, True)
        _finish(file_logger, "ALBERT_K1", 0, False)
        report = file_logger.generate_report()
        assert report["overall_metrics"]["total_trials"] == 2
        assert list(report["property_breakdown"]) == ["ALBERT_K1", "LIFT_IFF"]
        assert file_logger.generate_report("LIFT_IFF")["overall_metrics"]["passed"] == 1
        assert "error" in file_logger.generate_report("TRANSLATION_REDUCTION")


class TestTrialMetrics:
    def test_average(self):
        metrics = TrialMetrics()
        for duration in (1.0, 3.0):
            metrics.update(TrialRecord(timestamp="t", property_id="LIFT_IFF", trial=0, seed=0,
                                       passed=True, adversarial=False, duration_seconds=duration))
        assert metrics.average_duration_seconds == 2.0


def test_process_wide_logger_is_shared():
    assert get_campaign_logger() is get_campaign_logger()
