import pandas as pd
import pytest
from tests.cmds.conftest import read_manifest
from tests.cmds.conftest import write_report

from minsumkd.main import cli


@pytest.fixture
def reports(tmp_path):
    return [
        write_report(tmp_path / "minsum.json", [2e-1, 2e-2, 2e-3]),
        write_report(tmp_path / "neural.json", [2e-2, 2e-3, 2e-4], kind="neural"),
    ]


def test_sweep_compare_prints_ratios_and_gains(runner, reports):
    result = runner.invoke(cli, ["sweep-compare", *reports, "-f", "csv"])
    assert result.exit_code == 0, result.output
    assert "report,decoder,snr_db,ber,ci95,ratio,ratio_ci95,reliable" in result.output
    assert "report,decoder,ber_level,reference_snr_db,snr_db,gain_db" in result.output


def test_sweep_compare_writes_tables_plot_and_manifest(runner, reports, tmp_path):
    prefix = str(tmp_path / "cmp")
    result = runner.invoke(cli, ["sweep-compare", *reports, "-o", prefix])
    assert result.exit_code == 0, result.output
    gains = pd.read_csv(f"{prefix}_gains.csv")
    assert gains["ber_level"].tolist() == pytest.approx([1e-2])
    assert gains["gain_db"].tolist() == pytest.approx([1.0])
    ratios = pd.read_csv(f"{prefix}_ratios.csv")
    assert ratios[ratios["report"] == 1]["ratio"].tolist() == pytest.approx([0.1] * 3)
    with open(f"{prefix}.svg", encoding="utf-8") as file:
        assert "<svg" in file.read()
    assert read_manifest(f"{prefix}.manifest.json")["subcommand"] == "sweep-compare"


def test_sweep_compare_other_reference_flips_gain(runner, reports, tmp_path):
    prefix = str(tmp_path / "cmp")
    result = runner.invoke(cli, ["sweep-compare", *reports, "--reference", "1", "-o", prefix])
    assert result.exit_code == 0, result.output
    assert pd.read_csv(f"{prefix}_gains.csv")["gain_db"].tolist() == pytest.approx([-1.0])


def test_sweep_compare_reference_out_of_range_is_usage_error(runner, reports):
    result = runner.invoke(cli, ["sweep-compare", *reports, "--reference", "2"])
    assert result.exit_code == 1
    assert "there are only 2 reports." in result.output


def test_sweep_compare_different_grids_is_data_error(runner, reports, tmp_path):
    other = write_report(tmp_path / "other.json", [1e-1, 1e-2], snrs=(0.0, 0.5))
    result = runner.invoke(cli, ["sweep-compare", reports[0], other])
    assert result.exit_code == 2
    assert "different SNR grids" in result.output


def test_sweep_compare_different_codes_is_data_error(runner, reports, tmp_path):
    other = write_report(tmp_path / "other.json", [1e-1, 1e-2, 1e-3], matrix_hash="def")
    result = runner.invoke(cli, ["sweep-compare", reports[0], other])
    assert result.exit_code == 2
    assert "different codes" in result.output


def test_sweep_compare_without_shared_level_says_so(runner, tmp_path):
    reports = [
        write_report(tmp_path / "a.json", [2e-1, 1e-1, 5e-2]),
        write_report(tmp_path / "b.json", [2e-4, 1e-4, 5e-5]),
    ]
    result = runner.invoke(cli, ["sweep-compare", *reports])
    assert result.exit_code == 0, result.output
    assert "The curves share no BER level" in result.output
