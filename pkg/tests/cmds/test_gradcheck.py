import json

from tests.cmds.conftest import read_manifest

import minsumkd.cmds.gradcheck as gradcheck_module
from minsumkd.grad import GradCheckReport
from minsumkd.main import cli


def test_gradcheck_on_bundled_code_passes(runner):
    result = runner.invoke(cli, ["gradcheck", "-f", "csv"])
    assert result.exit_code == 0, result.output
    assert "sampled,checked,kinks,max_relative_error,tolerance,passed" in result.output
    # every one of the 5 x 12 offsets is sampled
    assert "\n60," in result.output


def test_gradcheck_on_given_code_with_symmetric_sparse_loss(runner, hamming1511_alist):
    result = runner.invoke(
        cli,
        [
            "gradcheck",
            "--pcm",
            hamming1511_alist,
            "--sparse-variant",
            "symmetric",
            "--samples",
            "30",
            "--t-student",
            "3",
            "--t-teacher",
            "5",
        ],
    )
    assert result.exit_code == 0, result.output


def test_gradcheck_writes_entries_and_manifest(runner, tmp_path):
    output = tmp_path / "grad.json"
    result = runner.invoke(cli, ["gradcheck", "--samples", "10", "-o", str(output)])
    assert result.exit_code == 0, result.output
    with open(output, encoding="utf-8") as file:
        written = json.load(file)
    assert written["summary"]["sampled"] == 10
    assert len(written["entries"]) == 10
    assert read_manifest(f"{output}.manifest.json")["subcommand"] == "gradcheck"


def test_gradcheck_is_reproducible(runner, tmp_path):
    outputs = [tmp_path / "a.json", tmp_path / "b.json"]
    for output in outputs:
        runner.invoke(cli, ["gradcheck", "--samples", "10", "--seed", "4", "-o", str(output)])
    assert outputs[0].read_text() == outputs[1].read_text()


def test_gradcheck_failure_exits_with_numerical_code(mocker, runner):
    entry = {
        "iteration": 0,
        "edge": 3,
        "analytic": 1.0,
        "numeric": 2.0,
        "relative_error": 0.5,
        "kink": False,
    }
    mocker.patch(
        f"{gradcheck_module.__name__}.finite_difference_check",
        return_value=GradCheckReport([entry], 1e-4),
    )
    result = runner.invoke(cli, ["gradcheck"])
    assert result.exit_code == 3
    assert "Gradient check failed" in result.output


def test_gradcheck_rejects_non_positive_epsilon(runner):
    result = runner.invoke(cli, ["gradcheck", "--epsilon", "0"])
    assert result.exit_code == 1
    assert "must be positive" in result.output
