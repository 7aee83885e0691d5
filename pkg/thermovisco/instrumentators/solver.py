import time
from contextlib import contextmanager

from prometheus_client import Counter, Histogram

__all__ = ["SolverInstrumentator"]

METRIC_LABELS = ["scenario"]

STEPS_COUNTER = Counter(
    "thermovisco_steps_total",
    "Step attempts by outcome",
    METRIC_LABELS + ["outcome"],
)

CG_ITERATIONS_HISTOGRAM = Histogram(
    "thermovisco_cg_iterations",
    "Conjugate gradient iterations per linear solve",
    METRIC_LABELS + ["system"],
    buckets=(1, 5, 10, 25, 50, 100, 250, 500, 1000, float("inf")),
)

STEP_DURATION_HISTOGRAM = Histogram(
    "thermovisco_step_duration_seconds",
    "Wall time of an accepted step, rejected attempts included",
    METRIC_LABELS,
)


class SolverInstrumentator:
    class WatchContainer:
        def __init__(self, labels: dict):
            self.labels = labels

        def register_rejection(self, reason: str):
            STEPS_COUNTER.labels(**self.labels, outcome=f"rejected_{reason}").inc()

        def register_solve(self, system: str, iterations: int):
            CG_ITERATIONS_HISTOGRAM.labels(**self.labels, system=system).observe(iterations)

    def __init__(self, scenario: str):
        self.labels = {"scenario": scenario}

    @contextmanager
    def watch(self):
        watch_container = SolverInstrumentator.WatchContainer(self.labels)
        start_time = time.perf_counter()
        outcome = "failed"

        try:
            yield watch_container
            outcome = "accepted"
        finally:
            STEPS_COUNTER.labels(**self.labels, outcome=outcome).inc()
            if outcome == "accepted":
                STEP_DURATION_HISTOGRAM.labels(**self.labels).observe(
                    time.perf_counter() - start_time
                )
