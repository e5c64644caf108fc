import logging
import os
import traceback
from logging.handlers import RotatingFileHandler
from threading import Lock

import click

from minsumkd.logger.formatters import TrainingEventJSONFormatter
from minsumkd.util import get_user_project_path

# prevent loggers from printing stacks to stderr if a pipe is broken
logging.raiseExceptions = False

logger_deps_lock = Lock()
ERROR_LOG_FILE_NAME = "minsumkd_errors.log"
LIBRARY_LOGGER_NAME = "minsumkd"
TRAINING_LOGGER_PREFIX = "minsumkd_training"


class ClickEchoHandler(logging.Handler):
    """Writes records to whatever click currently considers stderr."""

    def emit(self, record):
        try:
            click.echo(self.format(record), err=True)
        except Exception:
            self.handleError(record)


def _get_standard_formatter():
    return logging.Formatter("%(message)s")


def _get_console_formatter():
    return logging.Formatter("%(levelname)s %(name)s: %(message)s")


def _get_error_log_path():
    log_path = get_user_project_path("log")
    return os.path.join(log_path, ERROR_LOG_FILE_NAME)


def _create_error_file_handler():
    log_path = _get_error_log_path()
    return RotatingFileHandler(
        log_path, maxBytes=250000000, encoding="utf-8", delay=True
    )


def add_handler_to_logger(logger, handler, formatter):
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    return logger


def logger_has_handlers(logger):
    return len(logger.handlers)


def configure_console_logger(debug=False):
    """Routes library log records (warnings, or everything when `debug`) to stderr."""
    logger = logging.getLogger(LIBRARY_LOGGER_NAME)
    if not logger_has_handlers(logger):
        with logger_deps_lock:
            if not logger_has_handlers(logger):
                add_handler_to_logger(
                    logger, ClickEchoHandler(), _get_console_formatter()
                )
    logger.setLevel(logging.DEBUG if debug else logging.WARNING)
    return logger


def get_training_logger(path):
    """Gets the logger that writes one JSON object per training event to `path`."""
    path = os.path.abspath(path)
    logger = logging.getLogger(f"{TRAINING_LOGGER_PREFIX}.{path}")
    if logger_has_handlers(logger):
        return logger

    with logger_deps_lock:
        if not logger_has_handlers(logger):
            logger.setLevel(logging.INFO)
            logger.propagate = False
            handler = logging.FileHandler(path, mode="w", encoding="utf-8", delay=True)
            return add_handler_to_logger(logger, handler, TrainingEventJSONFormatter())
    return logger


def close_training_logger(logger):
    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)


def _get_error_file_logger():
    """Gets the logger where raw exceptions are logged."""
    logger = logging.getLogger("minsumkd_error_logger")
    if logger_has_handlers(logger):
        return logger

    with logger_deps_lock:
        if not logger_has_handlers(logger):
            formatter = _create_formatter_for_error_file()
            handler = _create_error_file_handler()
            return add_handler_to_logger(logger, handler, formatter)
    return logger


def get_view_error_details_message():
    """Returns the error message that is printed when errors occur."""
    path = _get_error_log_path()
    return f"View details in {path}"


def _create_formatter_for_error_file():
    return logging.Formatter("%(asctime)s %(message)s")


class CliLogger:
    def __init__(self):
        self._logger = _get_error_file_logger()

    def log_error(self, err):
        message = str(err) if err else None
        if message:
            self._logger.error(message)

    def log_verbose_error(self, invocation_str=None):
        """For logging traces and invocation strs during exceptions to the error log file."""
        prefix = (
            "Exception occurred."
            if not invocation_str
            else f"Exception occurred from input: '{invocation_str}'."
        )
        message = f"{prefix}. See error below."
        self.log_error(message)
        self.log_error(traceback.format_exc())


def get_main_cli_logger():
    return CliLogger()
