from __future__ import annotations

import pytest
from pydantic import ValidationError

from fixcert.core.config import Settings
from fixcert.core.exceptions import (
    ConfigException,
    UnknownKeyException,
    UnknownContractionException,
    exception_to_http_response,
)


def test_eps_ladder_accepts_comma_separated_and_json_forms():
    assert Settings(EPS_LADDER="1e-2, 1e-4").EPS_LADDER == [1e-2, 1e-4]
    assert Settings(EPS_LADDER="[0.1, 0.01]").EPS_LADDER == [0.1, 0.01]


def test_debug_flag_parses_common_spellings():
    assert Settings(DEBUG="yes").DEBUG is True
    assert Settings(DEBUG="off").DEBUG is False


def test_settings_reject_inverted_grid_and_non_positive_tolerance():
    with pytest.raises(ValidationError):
        Settings(GRID_MIN=10.0, GRID_MAX=1.0)
    with pytest.raises(ValidationError):
        Settings(EPS_TOL=0.0)
    with pytest.raises(ValidationError):
        Settings(EPS_LADDER=[1e-3, -1.0])


def test_log_level_is_normalized():
    assert Settings(LOG_LEVEL="debug").LOG_LEVEL == "DEBUG"
    with pytest.raises(ValidationError):
        Settings(LOG_LEVEL="chatty")


def test_config_exception_prefixes_position():
    exc = UnknownKeyException("unknown key 'colour' in [space]", line=3, column=1)
    assert exc.message == "line 3, column 1: unknown key 'colour' in [space]"
    assert exc.reason == "unknown key 'colour' in [space]"
    assert (exc.line, exc.column) == (3, 1)
    assert ConfigException("no position").message == "no position"


def test_exception_to_http_response_keeps_status():
    http_exc = exception_to_http_response(UnknownContractionException("no entry 'x'"))
    assert http_exc.status_code == 404
    assert http_exc.detail == "no entry 'x'"
