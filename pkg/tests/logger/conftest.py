import logging

import pytest


@pytest.fixture()
def mock_log_record(mocker):
    return mocker.MagicMock(spec=logging.LogRecord)


@pytest.fixture
def step_event_log_record(mock_log_record):
    mock_log_record.msg = {
        "event": "step",
        "step": 3,
        "epoch": 1,
        "ce": 0.25,
        "kd": 0.0,
        "sparse": 1.5,
        "total": 0.265,
    }
    return mock_log_record
