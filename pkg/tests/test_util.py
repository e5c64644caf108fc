import hashlib
import os
import signal

import pytest

from minsumkd.util import default_worker_count
from minsumkd.util import get_user_project_path
from minsumkd.util import hash_file
from minsumkd.util import warn_interrupt

_NAMESPACE = "minsumkd.util"


@pytest.fixture
def echo_output(mocker):
    return mocker.patch(f"{_NAMESPACE}.echo")


@pytest.fixture
def sigint_restore():
    previous = signal.getsignal(signal.SIGINT)
    yield
    signal.signal(signal.SIGINT, previous)


def test_get_user_project_path_creates_hidden_dir(mocker, tmp_path):
    mocker.patch(f"{_NAMESPACE}.path.expanduser", return_value=str(tmp_path))
    result = get_user_project_path("log")
    assert result == os.path.join(str(tmp_path), ".minsumkd", "log")
    assert os.path.isdir(result)


def test_hash_file_is_sha256_of_contents(tmp_path):
    path = tmp_path / "h.alist"
    path.write_bytes(b"7 3\n")
    assert hash_file(str(path)) == hashlib.sha256(b"7 3\n").hexdigest()


def test_default_worker_count_is_at_least_one(mocker):
    mocker.patch(f"{_NAMESPACE}.os.cpu_count", return_value=None)
    assert default_worker_count() == 1


def test_warn_interrupt_restores_handler():
    previous = signal.getsignal(signal.SIGINT)
    with warn_interrupt() as interrupt:
        assert signal.getsignal(signal.SIGINT) == interrupt._handle_interrupts
        assert not interrupt.interrupted
    assert signal.getsignal(signal.SIGINT) == previous


def test_warn_interrupt_warns_once_then_exits_when_done(echo_output, sigint_restore):
    with pytest.raises(SystemExit):
        with warn_interrupt(warning="Saving the checkpoint...") as interrupt:
            interrupt._handle_interrupts(signal.SIGINT, None)
            assert interrupt.interrupted
    assert "Saving the checkpoint..." in echo_output.call_args[0][0]


def test_warn_interrupt_second_interrupt_exits_immediately(echo_output, sigint_restore):
    with pytest.raises(SystemExit):
        with warn_interrupt() as interrupt:
            interrupt._handle_interrupts(signal.SIGINT, None)
            interrupt._handle_interrupts(signal.SIGINT, None)
