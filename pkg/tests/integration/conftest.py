import os

import pytest

from minsumkd.codebook import read_code

BCH_ALIST_ENVVAR = "MINSUMKD_BCH63_45_ALIST"


@pytest.fixture(scope="session")
def bch_alist():
    """Path of the BCH(63,45) right-regular parity-check matrix."""
    path = os.environ.get(BCH_ALIST_ENVVAR)
    if not path:
        pytest.skip(f"{BCH_ALIST_ENVVAR} is not set.")
    if not os.path.isfile(path):
        pytest.exit(f"{BCH_ALIST_ENVVAR} points to a missing file: {path}")
    return path


@pytest.fixture(scope="session")
def bch(bch_alist):
    return read_code(bch_alist)


@pytest.fixture(scope="session")
def trained_checkpoint(runner, bch_alist, tmp_path_factory):
    """A default-budget training run, shared by the acceptance checks that need one."""
    from minsumkd.main import cli

    output = str(tmp_path_factory.mktemp("train") / "bch.ckpt")
    result = runner.invoke(cli, ["train", "--pcm", bch_alist, "-o", output])
    if result.exit_code != 0:
        pytest.exit(result.output)
    return output
