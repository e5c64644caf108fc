"""Readers for the text inputs of the CLI."""
import chardet
import numpy as np


class FrameLine:
    """One line of an LLR frame file: either `llr` or `error` is set."""

    def __init__(self, line_number, llr=None, error=None):
        self.line_number = line_number
        self.llr = llr
        self.error = error

    @property
    def ok(self):
        return self.error is None


def read_llr_frames(file, n):
    """Reads one frame per line, `n` whitespace-separated reals. Blank lines and lines starting
    with `#` are skipped. Malformed lines are yielded with an error message instead of values so
    the caller can report them and go on.
    """
    for line_number, line in enumerate(file, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        tokens = text.replace(",", " ").split()
        if len(tokens) != n:
            yield FrameLine(line_number, error=f"expected {n} values, got {len(tokens)}")
            continue
        try:
            values = np.array([float(t) for t in tokens])
        except ValueError as err:
            yield FrameLine(line_number, error=str(err))
            continue
        if not np.all(np.isfinite(values)):
            yield FrameLine(line_number, error="LLRs must be finite")
            continue
        yield FrameLine(line_number, llr=values)


def read_text(path):
    """Reads a whole text file after detecting its encoding. Undetectable files are read as
    UTF-8."""
    with open(path, "rb") as file:
        raw = file.read()
    encoding = chardet.detect(raw)["encoding"] or "utf-8"
    return raw.decode(encoding)
