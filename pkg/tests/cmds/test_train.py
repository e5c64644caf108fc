import pandas as pd
import pytest
from tests.cmds.conftest import read_manifest

import minsumkd.cmds.train as train_module
from minsumkd.checkpoint import load_checkpoint
from minsumkd.main import cli
from minsumkd.trainer import TrainingResult


@pytest.fixture
def train_args(hamming74_alist, tmp_path):
    return [
        "train",
        "--pcm",
        hamming74_alist,
        "--snr",
        "2,4",
        "--examples-per-snr",
        "3",
        "--epochs",
        "1",
        "--batches-per-epoch",
        "2",
        "--t-teacher",
        "4",
        "--t-student",
        "2",
        "--t-o",
        "2",
        "--p",
        "4",
        "--validation-frames",
        "50",
        "--workers",
        "1",
        "-o",
        str(tmp_path / "offsets.ckpt"),
    ]


def test_train_writes_checkpoint_and_manifest(runner, train_args, tmp_path, hamming74):
    result = runner.invoke(cli, train_args)
    assert result.exit_code == 0, result.output
    checkpoint = load_checkpoint(str(tmp_path / "offsets.ckpt"), code=hamming74)
    assert checkpoint.t_student == 2
    assert checkpoint.edge_count == 12
    assert checkpoint.config["batch_size"] == 6
    assert checkpoint.config["loss_cfg"]["p"] == 4
    assert f"Checkpoint {checkpoint.checkpoint_id}: 24 offsets" in result.output
    manifest = read_manifest(tmp_path / "offsets.ckpt.manifest.json")
    assert manifest["subcommand"] == "train"
    assert manifest["params"]["snr_grid"] == [2.0, 4.0]
    assert manifest["params"]["loss_terms"] == ["ce", "kd", "sparse"]


def test_train_with_mismatched_batch_size_is_usage_error(runner, train_args, tmp_path):
    result = runner.invoke(cli, [*train_args, "--batch-size", "5"])
    assert result.exit_code == 1
    assert "Batch size 5 does not match 3 examples at each of 2 SNR values (6)." in result.output
    assert not (tmp_path / "offsets.ckpt").exists()


def test_train_with_short_teacher_is_usage_error(runner, train_args):
    result = runner.invoke(cli, [*train_args, "--t-teacher", "3"])
    assert result.exit_code == 1
    assert "The teacher needs at least t_student + t_o = 4 iterations, got 3." in result.output


def test_train_with_unknown_loss_term_is_usage_error(runner, train_args):
    result = runner.invoke(cli, [*train_args, "--loss", "ce,l2"])
    assert result.exit_code == 1
    assert "'l2' is not a loss term" in result.output


def test_train_ce_only_does_not_need_a_long_teacher(runner, train_args):
    result = runner.invoke(cli, [*train_args, "--loss", "ce", "--t-teacher", "1"])
    assert result.exit_code == 0, result.output


def test_train_diverged_exits_with_numerical_code(
    mocker, runner, train_args, tmp_path, hamming74, small_offsets
):
    from minsumkd.checkpoint import Checkpoint

    best = Checkpoint.for_code(hamming74, small_offsets, step=1)
    mocker.patch(
        f"{train_module.__name__}.run_training",
        return_value=TrainingResult(best, [], diverged=True),
    )
    result = runner.invoke(cli, train_args)
    assert result.exit_code == 3
    assert "Training diverged" in result.output
    assert load_checkpoint(str(tmp_path / "offsets.ckpt")).step == 1


def test_train_p_sweep_writes_table(runner, train_args, tmp_path):
    result = runner.invoke(cli, [*train_args, "--p-sweep", "2,4", "-f", "csv"])
    assert result.exit_code == 0, result.output
    table = pd.read_csv(tmp_path / "offsets.ckpt")
    assert table["p"].tolist() == [2, 4]
    assert table.columns.tolist() == ["p", "validation_ber", "epochs", "diverged"]
    assert "p,validation_ber,epochs,diverged" in result.output


def test_train_p_sweep_rejects_odd_orders(runner, train_args):
    result = runner.invoke(cli, [*train_args, "--p-sweep", "2,3"])
    assert result.exit_code == 1
    assert "Norm orders must be even integers" in result.output


def test_train_reads_flag_spellings_from_config(runner, train_args, tmp_path):
    config = tmp_path / "run.ini"
    config.write_text("[train]\nsnr = 4\nloss = ce\nlr = 0.05\nteacher-beta = 0.5\n")
    snr_at = train_args.index("--snr")
    args = [*train_args[:snr_at], *train_args[snr_at + 2 :], "--config", str(config)]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    params = read_manifest(tmp_path / "offsets.ckpt.manifest.json")["params"]
    assert params["snr_grid"] == [4.0]
    assert params["loss_terms"] == ["ce"]
    assert params["learning_rate"] == 0.05
    assert params["teacher_offset"] == 0.5


def test_train_config_flag_loses_to_command_line(runner, train_args, tmp_path):
    config = tmp_path / "run.ini"
    config.write_text("[train]\nsnr = 1:8:1\nloss = ce,kd\n")
    result = runner.invoke(cli, [*train_args, "--config", str(config)])
    assert result.exit_code == 0, result.output
    params = read_manifest(tmp_path / "offsets.ckpt.manifest.json")["params"]
    assert params["snr_grid"] == [2.0, 4.0]
    assert params["loss_terms"] == ["ce", "kd"]
