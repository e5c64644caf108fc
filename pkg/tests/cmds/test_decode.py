import pandas as pd
import pytest
from tests.cmds.conftest import read_manifest

from minsumkd.cmds.decode import TRACE_COLUMNS
from minsumkd.main import cli

CLEAN_FRAME = "4 4 4 4 4 4 4\n"


@pytest.fixture
def decode_args(hamming74_alist):
    return ["decode", "--pcm", hamming74_alist, "-f", "csv"]


def test_decode_reads_frames_from_stdin(runner, decode_args):
    result = runner.invoke(cli, decode_args, input=CLEAN_FRAME + CLEAN_FRAME)
    assert result.exit_code == 0, result.output
    assert "line,bits,valid,iterations" in result.output
    assert "1,0000000,True,5" in result.output
    assert "2,0000000,True,5" in result.output


def test_decode_early_exit_stops_after_one_iteration(runner, decode_args):
    result = runner.invoke(cli, [*decode_args, "--early-exit"], input=CLEAN_FRAME)
    assert "1,0000000,True,1" in result.output


def test_decode_negative_llrs_decide_ones(runner, decode_args):
    result = runner.invoke(cli, decode_args, input="-4 -4 -4 -4 -4 -4 -4\n")
    assert result.exit_code == 0, result.output
    assert "1,1111111,True," in result.output


def test_decode_reads_input_file(runner, decode_args, tmp_path):
    frames = tmp_path / "frames.txt"
    frames.write_text("# clean frame\n" + CLEAN_FRAME)
    result = runner.invoke(cli, [*decode_args, "--input", str(frames)])
    assert result.exit_code == 0, result.output
    assert "2,0000000,True,5" in result.output


def test_decode_malformed_line_is_skipped_and_reported(runner, decode_args):
    result = runner.invoke(cli, decode_args, input="4 4 4\n" + CLEAN_FRAME)
    assert result.exit_code == 2
    assert "Line 1: expected 7 values, got 3" in result.output
    assert "2,0000000,True,5" in result.output
    assert "1 malformed line(s) were skipped." in result.output


def test_decode_without_frames_is_data_error(runner, decode_args):
    result = runner.invoke(cli, decode_args, input="# nothing\n")
    assert result.exit_code == 2
    assert "No LLR frames to decode." in result.output


def test_decode_with_checkpoint(runner, decode_args, checkpoint_file):
    result = runner.invoke(
        cli, [*decode_args, "--checkpoint", checkpoint_file], input=CLEAN_FRAME
    )
    assert result.exit_code == 0, result.output
    assert "1,0000000,True,3" in result.output


def test_decode_checkpoint_with_iters_is_usage_error(runner, decode_args, checkpoint_file):
    result = runner.invoke(
        cli, [*decode_args, "--checkpoint", checkpoint_file, "--iters", "4"], input=CLEAN_FRAME
    )
    assert result.exit_code == 1


def test_decode_trace_writes_every_message(runner, decode_args, tmp_path):
    trace_path = tmp_path / "trace.csv"
    result = runner.invoke(cli, [*decode_args, "--trace", str(trace_path)], input=CLEAN_FRAME)
    assert result.exit_code == 0, result.output
    trace = pd.read_csv(trace_path)
    assert trace.columns.tolist() == TRACE_COLUMNS
    kinds = trace["kind"].value_counts().to_dict()
    # 5 iterations over 12 edges and 7 variables
    assert kinds == {"var_to_check": 60, "check_to_var": 60, "soft_output": 35}
    assert trace["iteration"].is_monotonic_increasing
    check_rows = trace[trace["kind"] == "check_to_var"]
    assert check_rows["argmin_edge"].notna().all()


def test_decode_manifest_only_when_asked(runner, decode_args, tmp_path):
    path = tmp_path / "decode.manifest.json"
    result = runner.invoke(cli, [*decode_args, "--manifest", str(path)], input=CLEAN_FRAME)
    assert result.exit_code == 0, result.output
    manifest = read_manifest(path)
    assert manifest["subcommand"] == "decode"
    assert manifest["params"]["llr_file"] == "-"
