import json

import pytest

from minsumkd.checkpoint import Checkpoint
from minsumkd.checkpoint import save_checkpoint
from minsumkd.evaluation import BerPoint
from minsumkd.evaluation import BerSweepReport

BITS = 7_000_000


def write_report(path, bers, snrs=(0.0, 1.0, 2.0), kind="minsum", matrix_hash="abc"):
    points = [
        BerPoint(snr, BITS, round(ber * BITS), BITS // 7, round(ber * BITS) // 2)
        for snr, ber in zip(snrs, bers)
    ]
    report = BerSweepReport(
        {"kind": kind, "iterations": 5}, {"name": "test", "matrix_hash": matrix_hash}, points
    )
    with open(path, "w", encoding="utf-8") as file:
        json.dump(report.to_dict(), file)
    return str(path)


def read_manifest(path):
    with open(path, encoding="utf-8") as file:
        return json.load(file)


@pytest.fixture
def checkpoint_file(tmp_path, hamming74, small_offsets):
    path = str(tmp_path / "offsets.ckpt")
    save_checkpoint(path, Checkpoint.for_code(hamming74, small_offsets, step=9))
    return path


@pytest.fixture
def eval_args(hamming74_alist, tmp_path):
    """A small uncoded sweep writing under ``tmp_path/ber``."""
    return [
        "eval",
        "--pcm",
        hamming74_alist,
        "--decoder",
        "uncoded",
        "--snr",
        "0:2:1",
        "--max-frames",
        "300",
        "--chunk-frames",
        "100",
        "--workers",
        "1",
        "--seed",
        "11",
        "--no-plot",
        "-o",
        str(tmp_path / "ber"),
    ]
