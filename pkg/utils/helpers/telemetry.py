import os
import time
from contextlib import contextmanager
from functools import lru_cache
from typing import Iterator

from opentelemetry import metrics
from opentelemetry.exporter.otlp.proto.http.metric_exporter import OTLPMetricExporter
from opentelemetry.sdk.metrics import MeterProvider
from opentelemetry.sdk.metrics.export import PeriodicExportingMetricReader
from opentelemetry.sdk.resources import Resource

from utils.helpers.logger import logger, telemetry_enabled
from utils.helpers.otlp_connection import check_otlp_connection


class SolverTelemetryManager:
    def __init__(self):
        """Initialize telemetry manager."""
        self._telemetry_enabled = False
        self._meter_provider = None
        self.solve_duration_histogram = None
        self.evaluation_counter = None

        if telemetry_enabled():
            self._initialize_telemetry()
        else:
            logger.debug("Telemetry is disabled via environment variable")

        self._define_metrics()

    @property
    def enabled(self) -> bool:
        return self._telemetry_enabled

    def _initialize_telemetry(self):
        """Set up OTLP metrics exporter and meter provider."""
        try:
            environment = os.getenv("DEPLOYMENT_ENV", "local")
            service_name = f"{os.getenv('OTEL_SERVICE_NAME', 'Riesz Centers')} {environment}"
            endpoint = os.getenv("OTEL_EXPORTER_OTLP_ENDPOINT", "http://localhost:4318")

            success, formatted_endpoint = check_otlp_connection(endpoint)
            if not success:
                raise ConnectionError("OTLP connection failed.")

            resource = Resource.create(
                {"service.name": service_name, "deployment.environment": environment}
            )
            reader = PeriodicExportingMetricReader(
                OTLPMetricExporter(endpoint=f"{formatted_endpoint}/v1/metrics"),
                export_interval_millis=60000,
            )
            self._meter_provider = MeterProvider(resource=resource, metric_readers=[reader])
            metrics.set_meter_provider(self._meter_provider)
            self._telemetry_enabled = True
            logger.info(f"Telemetry metrics exported to {formatted_endpoint}/v1/metrics")
        except Exception as e:
            logger.error(f"Telemetry initialization failed: {e}", exc_info=True)
            self._telemetry_enabled = False

    def _define_metrics(self):
        if not self._telemetry_enabled:
            return

        try:
            meter = metrics.get_meter("riesz_centers")
            self.solve_duration_histogram = meter.create_histogram(
                "solve_duration_seconds",
                description="Wall time of center searches, unfolded regions and oracle runs",
                unit="seconds",
            )
            self.evaluation_counter = meter.create_counter(
                "potential_evaluations_total",
                description="Number of potential evaluations issued by the solver",
            )
        except Exception as e:
            logger.error(f"Failed to define metrics: {e}", exc_info=True)
            self._telemetry_enabled = False

    def record_duration(self, operation: str, seconds: float, **attributes) -> None:
        if not self._telemetry_enabled or self.solve_duration_histogram is None:
            return
        try:
            self.solve_duration_histogram.record(seconds, {"operation": operation, **attributes})
        except Exception as e:
            logger.error(f"Failed to record duration of {operation}: {e}", exc_info=True)

    def count_evaluations(self, count: int, **attributes) -> None:
        if not self._telemetry_enabled or self.evaluation_counter is None:
            return
        try:
            self.evaluation_counter.add(count, attributes)
        except Exception as e:
            logger.error(f"Failed to count evaluations: {e}", exc_info=True)

    def shutdown(self):
        """Shut down the telemetry resources."""
        if self._meter_provider:
            self._meter_provider.shutdown()
            self._meter_provider = None
            logger.info("Telemetry meter provider shut down successfully.")


@lru_cache(maxsize=1)
def get_telemetry() -> SolverTelemetryManager:
    return SolverTelemetryManager()


@contextmanager
def track_solve(operation: str, **attributes) -> Iterator[None]:
    """
    Time the enclosed block and report it as `solve_duration_seconds`.

    Args:
        operation (str): Name of the measured operation, e.g. "find_centers".
        **attributes: Extra metric attributes (stringified).
    """
    start = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start
        logger.debug(f"{operation} took {elapsed:.3f}s")
        get_telemetry().record_duration(
            operation, elapsed, **{k: str(v) for k, v in attributes.items()}
        )
