import json

from tests.cmds.conftest import read_manifest

from minsumkd.main import cli


def test_replay_reproduces_eval_report(runner, eval_args, tmp_path):
    result = runner.invoke(cli, eval_args)
    assert result.exit_code == 0, result.output
    first = (tmp_path / "ber.csv").read_text()
    (tmp_path / "ber.csv").unlink()

    result = runner.invoke(cli, ["replay", str(tmp_path / "ber.manifest.json")])
    assert result.exit_code == 0, result.output
    assert "Replaying eval recorded" in result.output
    assert (tmp_path / "ber.csv").read_text() == first


def test_replay_refuses_changed_inputs(runner, eval_args, tmp_path, hamming74_alist):
    runner.invoke(cli, eval_args)
    with open(hamming74_alist, "a") as file:
        file.write("\n")
    result = runner.invoke(cli, ["replay", str(tmp_path / "ber.manifest.json")])
    assert result.exit_code == 2
    assert "changed since the run was recorded" in result.output


def test_replay_rejects_unknown_subcommand(runner, tmp_path):
    path = tmp_path / "bad.manifest.json"
    manifest = manifest_template("replay")
    path.write_text(json.dumps(manifest))
    result = runner.invoke(cli, ["replay", str(path)])
    assert result.exit_code == 1
    assert "'replay' is not a command that can be replayed." in result.output


def test_replay_rejects_unknown_parameters(runner, tmp_path):
    path = tmp_path / "bad.manifest.json"
    manifest = manifest_template("sweep-compare")
    manifest["params"] = {"frames": 3}
    path.write_text(json.dumps(manifest))
    result = runner.invoke(cli, ["replay", str(path)])
    assert result.exit_code == 1
    assert "'sweep-compare' has no parameter(s) frames." in result.output


def manifest_template(subcommand):
    return {
        "subcommand": subcommand,
        "params": {},
        "input_hashes": {},
        "seed": None,
        "tool_version": "0",
        "started_at": None,
        "finished_at": None,
        "elapsed_seconds": None,
    }


def test_replayed_manifest_records_the_replay(runner, eval_args, tmp_path):
    runner.invoke(cli, eval_args)
    recorded = read_manifest(tmp_path / "ber.manifest.json")
    runner.invoke(cli, ["replay", str(tmp_path / "ber.manifest.json")])
    replayed = read_manifest(tmp_path / "ber.manifest.json")
    assert replayed["params"] == recorded["params"]
    assert replayed["subcommand"] == "eval"
