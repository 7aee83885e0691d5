import os
from unittest import mock

import pytest

from thermovisco.config import Config, ConfigLogging, ConfigMetrics, ConfigOutput

# pylint: disable=direct-environment-variable-reference


@pytest.mark.parametrize(
    ("values", "expected"),
    [
        ({}, ConfigLogging()),
        (
            {
                "TVS_LOGGING__LEVEL": "DEBUG",
                "TVS_LOGGING__FORMAT_JSON": "no",
                "TVS_LOGGING__TO_FILE": "/file/file1.text",
            },
            ConfigLogging(level="DEBUG", format_json=False, to_file="/file/file1.text"),
        ),
    ],
)
def test_config_logging(values: dict, expected: ConfigLogging):
    with mock.patch.dict(os.environ, values, clear=True):
        config = Config(_env_file=None)  # type: ignore[call-arg]

        assert config.logging == expected


@pytest.mark.parametrize(
    ("values", "expected"),
    [
        ({}, ConfigOutput()),
        ({"TVS_OUTPUT__DIRECTORY": "/data/runs"}, ConfigOutput(directory="/data/runs")),
    ],
)
def test_config_output(values: dict, expected: ConfigOutput):
    with mock.patch.dict(os.environ, values, clear=True):
        config = Config(_env_file=None)  # type: ignore[call-arg]

        assert config.output == expected


@pytest.mark.parametrize(
    ("values", "expected"),
    [
        ({}, ConfigMetrics()),
        (
            {
                "TVS_METRICS__ENABLED": "true",
                "TVS_METRICS__HOST": "localhost",
                "TVS_METRICS__PORT": "9100",
            },
            ConfigMetrics(enabled=True, host="localhost", port=9100),
        ),
    ],
)
def test_config_metrics(values: dict, expected: ConfigMetrics):
    with mock.patch.dict(os.environ, values, clear=True):
        config = Config(_env_file=None)  # type: ignore[call-arg]

        assert config.metrics == expected


def test_config_ignores_unprefixed_variables():
    with mock.patch.dict(os.environ, {"LOGGING__LEVEL": "DEBUG"}, clear=True):
        config = Config(_env_file=None)  # type: ignore[call-arg]

        assert config.logging.level == "INFO"
