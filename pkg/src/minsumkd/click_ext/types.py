import math

import chardet
import click

from minsumkd.enums import LossTerm
from minsumkd.logger import CliLogger


class AutoDecodedFile(click.File):
    """Attempts to autodetect file's encoding prior to normal click.File processing."""

    def convert(self, value, param, ctx):
        if hasattr(value, "read"):
            return value
        try:
            with open(value, "rb") as file:
                self.encoding = chardet.detect(file.read())["encoding"]
            if self.encoding is None:
                CliLogger().log_error(f"Failed to detect encoding of file: {value}")
        except Exception:
            pass  # we'll let click.File do it's own exception handling for the filepath

        return super().convert(value, param, ctx)


class _ListType(click.ParamType):
    """Comma-separated values. Already converted lists pass through unchanged, so values read
    back from a run manifest convert again cleanly."""

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return list(value)
        items = [item.strip() for item in str(value).split(",") if item.strip()]
        if not items:
            self.fail("Expected at least one value.", param, ctx)
        return [self.convert_item(item, param, ctx) for item in items]

    def convert_item(self, item, param, ctx):
        raise NotImplementedError


class SnrList(_ListType):
    """SNR values in dB, either a range ``start:stop:step`` (stop included) or a comma list."""

    name = "snr-list"

    def get_metavar(self, param, ctx=None):
        return "START:STOP:STEP|SNR[,SNR...]"

    def convert(self, value, param, ctx):
        if isinstance(value, str) and ":" in value:
            return self._convert_range(value, param, ctx)
        return [float(v) for v in super().convert(value, param, ctx)]

    def convert_item(self, item, param, ctx):
        try:
            value = float(item)
        except ValueError:
            self.fail(f"'{item}' is not a number.", param, ctx)
        if not math.isfinite(value):
            self.fail(f"SNR must be finite, got '{item}'.", param, ctx)
        return value

    def _convert_range(self, value, param, ctx):
        parts = value.split(":")
        if len(parts) != 3:
            self.fail(f"'{value}' is not of the form START:STOP:STEP.", param, ctx)
        start, stop, step = (self.convert_item(p.strip(), param, ctx) for p in parts)
        if step <= 0:
            self.fail(f"The SNR step must be positive, got {step}.", param, ctx)
        if stop < start:
            self.fail(f"The SNR range {value} is empty.", param, ctx)
        count = math.floor((stop - start) / step + 1e-9) + 1
        return [round(start + i * step, 10) for i in range(count)]


class LossTerms(_ListType):
    """``all`` or a comma list out of ``ce``, ``kd`` and ``sparse``."""

    name = "loss-terms"

    def get_metavar(self, param, ctx=None):
        return "all|ce,kd,sparse"

    def convert(self, value, param, ctx):
        if isinstance(value, str) and value.strip().lower() == "all":
            return LossTerm.choices()
        return super().convert(value, param, ctx)

    def convert_item(self, item, param, ctx):
        item = item.lower()
        if item not in LossTerm.choices():
            self.fail(
                f"'{item}' is not a loss term. Choose from: all, {', '.join(LossTerm.choices())}.",
                param,
                ctx,
            )
        return item


class EvenIntList(_ListType):
    """Comma list of even integers ≥ 2."""

    name = "even-int-list"

    def get_metavar(self, param, ctx=None):
        return "P[,P...]"

    def convert_item(self, item, param, ctx):
        try:
            value = int(item)
        except (TypeError, ValueError):
            self.fail(f"'{item}' is not an integer.", param, ctx)
        if value < 2 or value % 2:
            self.fail(f"Norm orders must be even integers ≥ 2, got {value}.", param, ctx)
        return value
