"""Per-stage latency ledger and KPI budget reporting."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

from .errors import InvalidParams

STAGES = ("transcription", "translation", "emotion", "signgen", "summary")

# per-stage latency budgets in milliseconds
BUDGETS_MS = {"transcription": 2000.0, "translation": 2000.0, "emotion": 200.0}


@dataclass(frozen=True)
class StageLatency:
    stage: str
    event_id: str
    enqueue_time: float  # monotonic ms
    dequeue_time: float
    complete_time: float

    def __post_init__(self):
        if self.stage not in STAGES:
            raise InvalidParams(f"unknown stage: {self.stage}")
        if not self.enqueue_time <= self.dequeue_time <= self.complete_time:
            raise InvalidParams(
                f"timestamps must be monotone: {self.enqueue_time}, "
                f"{self.dequeue_time}, {self.complete_time}"
            )

    @property
    def total_ms(self) -> float:
        return self.complete_time - self.enqueue_time

    @property
    def queue_ms(self) -> float:
        return self.dequeue_time - self.enqueue_time


def percentile(samples: list[float], p: float) -> float:
    """Nearest-rank percentile on the full sorted sample set."""
    if not samples:
        raise InvalidParams("percentile of empty sample set")
    ordered = sorted(samples)
    rank = max(1, math.ceil(p / 100.0 * len(ordered)))
    return ordered[rank - 1]


@dataclass
class StageKpi:
    stage: str
    count: int
    errors: int
    mean_ms: float
    p50_ms: float
    p95_ms: float
    p99_ms: float
    budget_ms: float | None
    passed: bool


class LatencyLedger:
    """Accepts concurrent appends; reporting takes a consistent snapshot."""

    def __init__(self):
        self._lock = threading.Lock()
        self._records: dict[str, list[StageLatency]] = {s: [] for s in STAGES}
        self._errors: dict[str, int] = {s: 0 for s in STAGES}

    def record(self, record: StageLatency) -> None:
        with self._lock:
            self._records[record.stage].append(record)

    def record_latency(
        self, stage: str, event_id: str, enqueue: float, dequeue: float, complete: float
    ) -> None:
        self.record(StageLatency(stage, event_id, enqueue, dequeue, complete))

    def record_error(self, stage: str) -> None:
        with self._lock:
            if stage not in self._errors:
                raise InvalidParams(f"unknown stage: {stage}")
            self._errors[stage] += 1

    def stage_samples(self, stage: str) -> list[float]:
        with self._lock:
            return [r.total_ms for r in self._records[stage]]

    def error_count(self, stage: str | None = None) -> int:
        with self._lock:
            if stage is not None:
                return self._errors[stage]
            return sum(self._errors.values())

    def kpi_report(self) -> dict[str, StageKpi]:
        with self._lock:
            snapshot = {s: [r.total_ms for r in rs] for s, rs in self._records.items()}
            errors = dict(self._errors)
        report: dict[str, StageKpi] = {}
        for stage, samples in snapshot.items():
            budget = BUDGETS_MS.get(stage)
            if not samples:
                report[stage] = StageKpi(stage, 0, errors[stage], 0.0, 0.0, 0.0, 0.0, budget, True)
                continue
            mean = sum(samples) / len(samples)
            p95 = percentile(samples, 95)
            report[stage] = StageKpi(
                stage=stage,
                count=len(samples),
                errors=errors[stage],
                mean_ms=mean,
                p50_ms=percentile(samples, 50),
                p95_ms=p95,
                p99_ms=percentile(samples, 99),
                budget_ms=budget,
                passed=budget is None or p95 < budget,
            )
        return report
