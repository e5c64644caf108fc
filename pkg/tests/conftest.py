import os

import numpy as np
import pytest
from click.testing import CliRunner

from minsumkd.codebook import bundled_code
from minsumkd.codebook import load_code
from minsumkd.codebook import ParityCheckMatrix
from minsumkd.decoder import OffsetParameters
from minsumkd.options import CLIState

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

HAMMING_7_4_ALIST = """7 3
3 4
2 2 2 3 1 1 1
4 4 4
1 2
1 3
2 3
1 2 3
1
2
3
1 2 4 5
1 3 4 6
2 3 4 7
"""

# columns only; the row section is rebuilt
HAMMING_7_4_ALIST_NO_ROWS = "\n".join(HAMMING_7_4_ALIST.splitlines()[:11]) + "\n"

# zero padded index lists, as some tools write them
HAMMING_7_4_ALIST_PADDED = """7 3
3 4
2 2 2 3 1 1 1
4 4 4
1 2 0
1 3 0
2 3 0
1 2 3
1 0 0
2 0 0
3 0 0
1 2 4 5
1 3 4 6
2 3 4 7
"""


def hamming_15_11_matrix():
    """Columns are the binary expansions of 1..15."""
    columns = [[(value >> bit) & 1 for bit in range(4)] for value in range(1, 16)]
    return ParityCheckMatrix.from_dense(np.array(columns).T)


@pytest.fixture(scope="session")
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def io_prevention(monkeypatch):
    monkeypatch.setattr("logging.FileHandler._open", lambda *args, **kwargs: None)


@pytest.fixture
def cli_state():
    return CLIState()


@pytest.fixture
def hamming74():
    return bundled_code("hamming_7_4")


@pytest.fixture
def hamming1511():
    with open(os.path.join(DATA_DIR, "hamming_15_11.alist"), encoding="utf-8") as file:
        return load_code(file.read(), name="hamming_15_11")


@pytest.fixture
def hamming74_alist(tmp_path):
    path = tmp_path / "hamming_7_4.alist"
    path.write_text(HAMMING_7_4_ALIST)
    return str(path)


@pytest.fixture
def hamming1511_alist():
    return os.path.join(DATA_DIR, "hamming_15_11.alist")


@pytest.fixture
def small_offsets(hamming74):
    rng = np.random.default_rng(7)
    return OffsetParameters(rng.uniform(0.0, 0.5, size=(3, hamming74.graph.edge_count)))


def noisy_llr(code, frames, snr_db, seed=0):
    """Random codewords over AWGN; returns (llr, codewords)."""
    from minsumkd import channel
    from minsumkd.codebook import encode

    rng = np.random.default_rng(seed)
    cfg = channel.ChannelConfig(snr_db, code.rate)
    messages = rng.integers(0, 2, size=(frames, code.k), dtype=np.uint8)
    codewords = encode(code.g, messages)
    received = channel.transmit(channel.modulate(codewords), cfg, rng)
    return channel.llr(received, cfg), codewords
