import click

from minsumkd.codebook import bundled_code
from minsumkd.codebook import read_code
from minsumkd.output_formats import DataFrameOutputFormatter


def load_code(pcm, gen=None, default=None):
    """The code given by --pcm/--gen, or the bundled `default` code when --pcm is omitted."""
    if pcm is None and default:
        return bundled_code(default)
    return read_code(pcm, gen)


def echo_table(df, format, **kwargs):
    DataFrameOutputFormatter(format).echo_formatted_dataframes(df, **kwargs)


def echo_written(paths):
    for path in paths:
        click.echo(f"Wrote {path}", err=True)
