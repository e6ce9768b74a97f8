#!/usr/bin/env python3
"""
Campaign trial logging

Structured per-trial records for property campaigns:
- pass/fail per trial with seed provenance
- wall time per trial and per property
- optional JSONL trail under the storage path
"""

import json
import logging
import sys
import threading
import time
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

import structlog

from config.settings import settings
from core.domain.models import TrialOutcome
from core.domain.ports import LoggingPort

# Ensure structlog logs to stderr, not stdout
structlog.configure(
    processors=[
        structlog.processors.add_log_level,
        structlog.processors.KeyValueRenderer(key_order=["event"])
    ],
    wrapper_class=structlog.make_filtering_bound_logger(
        getattr(logging, settings.log_level.upper(), logging.INFO)
    ),
    logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
)


@dataclass
class TrialRecord:
    """One finished trial"""
    timestamp: str
    property_id: str
    trial: int
    seed: int
    passed: bool
    adversarial: bool
    duration_seconds: float
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class TrialMetrics:
    """Aggregated trial metrics"""
    total_trials: int = 0
    passed: int = 0
    failed: int = 0
    adversarial: int = 0
    total_duration_seconds: float = 0.0
    average_duration_seconds: float = 0.0

    def update(self, record: TrialRecord) -> None:
        self.total_trials += 1
        if record.passed:
            self.passed += 1
        else:
            self.failed += 1
        if record.adversarial:
            self.adversarial += 1
        self.total_duration_seconds += record.duration_seconds
        self.average_duration_seconds = self.total_duration_seconds / self.total_trials

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class CampaignLogger(LoggingPort):
    """Trial logger with structured output and an optional JSONL file"""

    def __init__(self, storage_path: str = "./storage/logs",
                 enable_file_logging: bool = False):
        """
        Args:
            storage_path: Directory to store log files
            enable_file_logging: Whether to append trials to trials.jsonl
        """
        self.storage_path = Path(storage_path)
        self.enable_file_logging = enable_file_logging
        self.property_metrics: Dict[str, TrialMetrics] = {}
        self.global_metrics = TrialMetrics()
        # end_trial is called from campaign worker threads
        self._lock = threading.Lock()

        if self.enable_file_logging:
            self.storage_path.mkdir(parents=True, exist_ok=True)
            self.log_file = self.storage_path / "trials.jsonl"

        self.logger = structlog.get_logger("campaign_logger")
        self.logger.debug(
            "Campaign logger initialized",
            storage_path=str(self.storage_path),
            file_logging_enabled=self.enable_file_logging
        )

    def start_trial(self, property_id: str, trial: int, seed: int) -> Dict[str, Any]:
        """Returns a context dict to pass to end_trial"""
        context = {
            "start_time": time.perf_counter(),
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "property_id": property_id,
            "trial": trial,
            "seed": seed,
        }
        self.logger.debug("Started trial", property_id=property_id, trial=trial, seed=seed)
        return context

    def end_trial(self, context: Dict[str, Any], outcome: TrialOutcome) -> TrialRecord:
        duration = time.perf_counter() - context["start_time"]
        outcome.duration_seconds = duration
        record = TrialRecord(
            timestamp=context["timestamp"],
            property_id=context["property_id"],
            trial=context["trial"],
            seed=context["seed"],
            passed=outcome.passed,
            adversarial=outcome.adversarial,
            duration_seconds=duration,
            error=outcome.details.get("error"),
        )
        self._log_record(record)
        self._update_metrics(record)
        return record

    def _log_record(self, record: TrialRecord) -> None:
        data = record.to_dict()
        if record.passed:
            self.logger.debug("Trial passed", **data)
        else:
            self.logger.error("Trial failed", **data)

        if self.enable_file_logging:
            try:
                with self._lock, open(self.log_file, "a") as f:
                    f.write(json.dumps(data) + "\n")
            except OSError as e:
                self.logger.error("Failed to write to log file", error=str(e))

    def _update_metrics(self, record: TrialRecord) -> None:
        with self._lock:
            metrics = self.property_metrics.setdefault(record.property_id, TrialMetrics())
            metrics.update(record)
            self.global_metrics.update(record)

    def get_property_metrics(self, property_id: str) -> Optional[TrialMetrics]:
        return self.property_metrics.get(property_id)

    def generate_report(self, property_id: Optional[str] = None) -> Dict[str, Any]:
        if property_id:
            metrics = self.get_property_metrics(property_id)
            if not metrics:
                return {"error": f"No trials recorded for {property_id}"}
        else:
            metrics = self.global_metrics
        return {
            "report_generated_at": datetime.now(timezone.utc).isoformat(),
            "property_id": property_id,
            "overall_metrics": metrics.to_dict(),
            "property_breakdown": {
                name: m.to_dict() for name, m in sorted(self.property_metrics.items())
            },
        }


_campaign_logger: Optional[CampaignLogger] = None


def get_campaign_logger() -> CampaignLogger:
    """Process-wide logger built from settings"""
    global _campaign_logger
    if _campaign_logger is None:
        _campaign_logger = CampaignLogger(
            storage_path=str(Path(settings.storage_path) / "logs"),
            enable_file_logging=settings.enable_file_logging,
        )
    return _campaign_logger
