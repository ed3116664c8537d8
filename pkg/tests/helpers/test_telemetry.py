import logging

import pytest
import requests

from utils.helpers import otlp_connection
from utils.helpers.logger import logger, set_level, setup_logger, telemetry_enabled
from utils.helpers.otlp_connection import check_otlp_connection, normalize_endpoint
from utils.helpers.settings import load_settings
from utils.helpers.telemetry import SolverTelemetryManager, track_solve


@pytest.mark.parametrize(
    "endpoint, expected",
    [
        ("localhost:4318/v1/logs", "http://localhost:4318"),
        ("http://collector:4318", "http://collector:4318"),
        ("https://otel.example.org/v1/metrics", "https://otel.example.org"),
    ],
)
def test_normalize_endpoint(endpoint, expected):
    assert normalize_endpoint(endpoint) == expected


class _Response:
    def __init__(self, status_code):
        self.status_code = status_code


def test_collector_answer_counts_as_reachable(monkeypatch):
    calls = []

    def post(url, **kwargs):
        calls.append((url, kwargs["timeout"]))
        return _Response(405)

    monkeypatch.setattr(otlp_connection.requests, "post", post)
    assert check_otlp_connection("localhost:4318") == (True, "http://localhost:4318")
    assert calls == [("http://localhost:4318/v1/logs", 5)]


def test_unreachable_collector_is_retried(monkeypatch):
    timeouts = []

    def post(url, **kwargs):
        timeouts.append(kwargs["timeout"])
        raise requests.ConnectionError("refused")

    monkeypatch.setattr(otlp_connection.requests, "post", post)
    monkeypatch.setattr(otlp_connection.time, "sleep", lambda _: None)
    assert check_otlp_connection("http://nowhere:4318", max_retries=3) == (False, "http://nowhere:4318")
    assert timeouts == [5, 2, 2]


def test_server_errors_are_not_reachable(monkeypatch):
    monkeypatch.setattr(otlp_connection.requests, "post", lambda url, **kwargs: _Response(503))
    monkeypatch.setattr(otlp_connection.time, "sleep", lambda _: None)
    assert check_otlp_connection("localhost:4318", max_retries=2)[0] is False


def test_telemetry_is_off_by_default(monkeypatch):
    monkeypatch.delenv("TELEMETRY_ENABLED", raising=False)
    assert not telemetry_enabled()
    manager = SolverTelemetryManager()
    assert not manager.enabled
    manager.record_duration("find_centers", 0.5, body="disk")
    manager.count_evaluations(10)
    manager.shutdown()


def test_failed_collector_disables_telemetry(monkeypatch):
    monkeypatch.setenv("TELEMETRY_ENABLED", "true")
    monkeypatch.setattr("utils.helpers.telemetry.check_otlp_connection", lambda endpoint: (False, endpoint))
    assert not SolverTelemetryManager().enabled


def test_track_solve_reraises():
    with pytest.raises(KeyError):
        with track_solve("unfolded_region", dirs=64):
            raise KeyError("boom")
    with track_solve("noop"):
        pass


def test_set_level():
    previous = logger.level
    try:
        set_level("debug")
        assert logger.level == logging.DEBUG
        assert all(handler.level == logging.DEBUG for handler in logger.handlers)
        with pytest.raises(ValueError, match="Unknown log level"):
            set_level("chatty")
    finally:
        set_level(logging.getLevelName(previous))


def test_logger_defaults_come_from_settings(monkeypatch, tmp_path):
    log_path = tmp_path / "riesz.log"
    monkeypatch.setenv("RIESZ_LOG_LEVEL", "info")
    monkeypatch.setenv("RIESZ_LOG_FILE", str(log_path))
    monkeypatch.delenv("TELEMETRY_ENABLED", raising=False)
    load_settings.cache_clear()
    configured = setup_logger(name="riesz_settings_check")
    try:
        assert configured.level == logging.INFO
        files = [h for h in configured.handlers if isinstance(h, logging.FileHandler)]
        assert [h.baseFilename for h in files] == [str(log_path)]
        configured.info("written")
        files[0].flush()
        assert "INFO - written" in log_path.read_text(encoding="utf-8")
    finally:
        for handler in list(configured.handlers):
            handler.close()
            configured.removeHandler(handler)
        load_settings.cache_clear()


def test_logger_survives_an_invalid_level(monkeypatch):
    monkeypatch.setenv("RIESZ_LOG_LEVEL", "chatty")
    load_settings.cache_clear()
    configured = setup_logger(name="riesz_invalid_level_check")
    try:
        assert configured.level == logging.WARNING
    finally:
        for handler in list(configured.handlers):
            configured.removeHandler(handler)
        load_settings.cache_clear()
