import json
from itertools import chain

import click
from pandas import concat
from pandas import notnull

from minsumkd.enums import OutputFormat
from minsumkd.errors import MinSumCLIError

# Uses method `echo_via_pager()` when 10 or more records.
OUTPUT_VIA_PAGER_THRESHOLD = 10


class DataFrameOutputFormatter:
    """Echoes report tables as an aligned table, CSV or JSON."""

    def __init__(self, output_format):
        self.output_format = output_format.upper() if output_format else OutputFormat.TABLE
        if self.output_format not in OutputFormat.choices():
            raise MinSumCLIError(
                f"DataFrameOutputFormatter received an invalid format: {self.output_format}"
            )

    def _ensure_iterable(self, dfs):
        if not isinstance(dfs, (list, tuple)):
            return [dfs]
        return dfs

    def _iter_table(self, dfs, columns=None, **kwargs):
        df = concat(self._ensure_iterable(dfs))
        if df.empty:
            return
        # strings so every column can be left-justified
        df = df.fillna("").astype(str)
        if columns:
            df = self._select_columns(df, columns)
        kwargs = {
            "index": False,
            "justify": "left",
            "formatters": make_left_aligned_formatter(df),
            **kwargs,
        }
        for line in df.to_string(**kwargs).splitlines():
            yield f"{line}\n"

    def _iter_csv(self, dfs, columns=None, **kwargs):
        no_header = kwargs.get("header") is False
        for i, df in enumerate(self._ensure_iterable(dfs)):
            if df.empty:
                continue
            df = df.fillna("")
            if columns:
                df = self._select_columns(df, columns)
            # header on the first frame only
            header = False if no_header else (i == 0)
            kwargs = {"index": False, **kwargs, "header": header}
            yield from df.to_csv(**kwargs).splitlines(keepends=True)

    def _iter_json(self, dfs, columns=None, **kwargs):
        kwargs = {"ensure_ascii": False, **kwargs}
        for row in self.iter_rows(dfs, columns=columns):
            yield f"{json.dumps(row, **kwargs)}\n"

    def _echo_via_pager_if_over_threshold(self, gen):
        first_rows = []
        try:
            for _ in range(OUTPUT_VIA_PAGER_THRESHOLD):
                first_rows.append(next(gen))
        except StopIteration:
            click.echo("".join(first_rows), nl=False)
            return

        click.echo_via_pager(chain(first_rows, gen))

    def _select_columns(self, df, columns):
        if df.empty:
            return df
        if not isinstance(columns, (list, tuple)):
            raise MinSumCLIError("'columns' parameter must be a list or tuple of column names.")
        # enable case-insensitive column selection
        normalized_map = {c.lower(): c for c in df.columns}
        try:
            columns = [normalized_map[c.lower()] for c in columns]
            return df[columns]
        except KeyError as e:
            key = e.args[0]
            raise click.BadArgumentUsage(
                f"'{key}' is not a valid column. Valid columns are: {list(df.columns)}"
            )

    def iter_rows(self, dfs, columns=None):
        """Yields every row of the given DataFrame(s) as a dict with NaN mapped to None."""
        for df in self._ensure_iterable(dfs):
            df = df.astype(object).where(notnull(df), None)
            if columns:
                df = self._select_columns(df, columns)
            yield from df.to_dict("records")

    def get_formatted_output(self, dfs, columns=None, **kwargs):
        """Formats the given DataFrame(s) and yields the result line by line.

        Any additional kwargs are passed to the underlying pandas or json call.
        """
        if self.output_format == OutputFormat.TABLE:
            yield from self._iter_table(dfs, columns=columns, **kwargs)

        elif self.output_format == OutputFormat.CSV:
            yield from self._iter_csv(dfs, columns=columns, **kwargs)

        elif self.output_format == OutputFormat.JSON:
            kwargs = {"indent": 4, **kwargs}
            yield from self._iter_json(dfs, columns=columns, **kwargs)

        elif self.output_format == OutputFormat.RAW:
            yield from self._iter_json(dfs, columns=columns, **kwargs)

    def echo_formatted_dataframes(
        self, dfs, columns=None, force_pager=False, force_no_pager=False, **kwargs
    ):
        """Formats the given DataFrame(s) and echoes them to stdout, through the pager when more
        than ten lines come out unless `force_pager` or `force_no_pager` says otherwise."""
        if force_pager and force_no_pager:
            raise MinSumCLIError("force_pager cannot be used with force_no_pager.")
        lines = self.get_formatted_output(dfs, columns=columns, **kwargs)
        try:
            first = next(lines)
            lines = chain([first], lines)
        except StopIteration:
            click.echo("No results found.")
            return
        if force_pager:
            click.echo_via_pager(lines)
        elif force_no_pager:
            for line in lines:
                click.echo(line, nl=False)
        else:
            self._echo_via_pager_if_over_threshold(lines)


def make_left_aligned_formatter(df):
    return {c: f"{{:<{df[c].str.len().max()}s}}".format for c in df.columns}
