class MinSumError(Exception):
    """Base class for all errors raised by the minsumkd library. The CLI translates these into
    `minsumkd.errors.MinSumCLIError` (or a subclass) so they print cleanly."""


class AlistParseError(MinSumError):
    """An alist file could not be parsed. `line_number` is 1-based and refers to the original
    text, blank lines included."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        self.reason = message
        location = f"line {line_number}" if line_number else "end of input"
        super().__init__(f"Malformed alist at {location}: {message}")


class MatrixError(MinSumError):
    """A binary matrix violates an invariant (empty row/column, G·Hᵀ ≠ 0, rank mismatch...)."""


class LengthMismatchError(MinSumError):
    def __init__(self, what, expected, actual):
        super().__init__(f"Expected {what} of length {expected}, got {actual}.")


class ShapeMismatchError(MinSumError):
    def __init__(self, what, expected, actual):
        super().__init__(
            f"Expected {what} with shape {tuple(expected)}, got {tuple(actual)}."
        )


class ChannelConfigError(MinSumError):
    pass


class NeighborNotFoundError(MinSumError):
    def __init__(self, edge_id):
        super().__init__(f"Edge {edge_id} is not in the adjacency list.")


class NumericalInstabilityError(MinSumError):
    """Raised when the training loss or its gradient stops being finite."""

    def __init__(self, message, step=None):
        self.step = step
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)


class CheckpointError(MinSumError):
    pass


class CorruptCheckpointError(CheckpointError):
    def __init__(self, path, reason):
        super().__init__(f"Checkpoint '{path}' is corrupt: {reason}")


class CodeMismatchError(CheckpointError):
    def __init__(self, path, expected_hash, actual_hash):
        super().__init__(
            f"Checkpoint '{path}' was trained for a different code "
            f"(matrix hash {actual_hash[:12]}..., expected {expected_hash[:12]}...)."
        )


class OracleLimitError(MinSumError):
    def __init__(self, k, limit):
        super().__init__(
            f"Brute-force ML decoding enumerates 2^k codewords; k={k} exceeds the limit of {limit}."
        )


class GridMismatchError(MinSumError):
    pass


class ConfigError(MinSumError):
    pass


class InputChangedError(MinSumError):
    def __init__(self, path, reason):
        super().__init__(f"Input '{path}' {reason}; the recorded run cannot be replayed.")
