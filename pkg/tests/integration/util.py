from shlex import split as split_command

from minsumkd.main import cli


def assert_test_is_successful(runner, command):
    result = runner.invoke(cli, split_command(command))
    assert result.exit_code == 0, result.output
    return result


def read_point(report, snr_db):
    return next(p for p in report.points if p.snr_db == snr_db)


def clearly_below(low, high):
    """True when ``low`` has the smaller BER and the two 95% intervals do not overlap."""
    return low.ber + low.ci95_halfwidth < high.ber - high.ci95_halfwidth
