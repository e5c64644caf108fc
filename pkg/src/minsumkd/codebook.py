"""Binary linear block codes: parity-check and generator matrices, alist I/O, GF(2) algebra,
encoding and syndromes.

Bits are numpy ``uint8`` arrays. Every operation accepts a single vector of shape ``(n,)`` or a
batch of shape ``(B, n)``.
"""
import hashlib
import logging
import os
import pkgutil

import numpy as np

from minsumkd.exceptions import AlistParseError
from minsumkd.exceptions import LengthMismatchError
from minsumkd.exceptions import MatrixError
from minsumkd.exceptions import OracleLimitError
from minsumkd.file_readers import read_text

logger = logging.getLogger(__name__)

ML_ENUMERATION_LIMIT = 20
BUNDLED_CODES = {"hamming_7_4": "data/hamming_7_4.alist"}


class ParityCheckMatrix:
    """An (n−k) × n binary parity-check matrix stored as sorted per-row and per-column lists of
    the positions of its ones (0-based). Immutable.

    Args:
        n_cols (int): Block length n.
        row_indices (iterable of iterables): For each check equation, the columns it touches.
    """

    def __init__(self, n_cols, row_indices):
        rows = tuple(tuple(sorted(int(i) for i in row)) for row in row_indices)
        self._n_cols = int(n_cols)
        self._rows = rows
        self._validate()
        cols = [[] for _ in range(self._n_cols)]
        for r, row in enumerate(rows):
            for c in row:
                cols[c].append(r)
        self._cols = tuple(tuple(col) for col in cols)
        empty_cols = [c for c, col in enumerate(self._cols) if not col]
        if empty_cols:
            raise MatrixError(
                f"Parity-check matrix has all-zero columns {empty_cols}; every bit must be checked."
            )
        self._dense = None

    def _validate(self):
        if not self._rows:
            raise MatrixError("Parity-check matrix has no rows.")
        if len(self._rows) > self._n_cols:
            raise MatrixError(
                f"Parity-check matrix has more rows ({len(self._rows)}) than columns ({self._n_cols})."
            )
        for r, row in enumerate(self._rows):
            if not row:
                raise MatrixError(f"Row {r} of the parity-check matrix is all-zero.")
            if len(set(row)) != len(row):
                raise MatrixError(f"Row {r} lists a column more than once.")
            if row[0] < 0 or row[-1] >= self._n_cols:
                raise MatrixError(f"Row {r} has a column index out of range.")

    @classmethod
    def from_dense(cls, matrix):
        matrix = np.asarray(matrix) % 2
        if matrix.ndim != 2:
            raise MatrixError("A parity-check matrix must be two-dimensional.")
        return cls(matrix.shape[1], [np.flatnonzero(row) for row in matrix])

    @property
    def rows(self):
        """Number of check equations (n−k when H has full rank)."""
        return len(self._rows)

    @property
    def cols(self):
        """Block length n."""
        return self._n_cols

    @property
    def row_indices(self):
        return self._rows

    @property
    def col_indices(self):
        return self._cols

    @property
    def ones(self):
        return sum(len(row) for row in self._rows)

    @property
    def dense(self):
        """Read-only dense ``uint8`` copy of the matrix."""
        if self._dense is None:
            dense = np.zeros((self.rows, self.cols), dtype=np.uint8)
            for r, row in enumerate(self._rows):
                dense[r, list(row)] = 1
            dense.setflags(write=False)
            self._dense = dense
        return self._dense

    def __eq__(self, other):
        if not isinstance(other, ParityCheckMatrix):
            return NotImplemented
        return self._n_cols == other._n_cols and self._rows == other._rows

    def __hash__(self):
        return hash((self._n_cols, self._rows))

    def __repr__(self):
        return f"ParityCheckMatrix(rows={self.rows}, cols={self.cols}, ones={self.ones})"


class GeneratorMatrix:
    """A k × n generator matrix in original column order.

    ``column_permutation`` lists the n columns so that ``entries[:, column_permutation]`` is
    systematic, ``[I_k | P]``; its first k entries are the information positions. It is the
    identity when G was supplied externally. ``dropped_checks`` counts the dependent rows of H
    that were removed while deriving G.
    """

    def __init__(self, entries, column_permutation=None, dropped_checks=0):
        entries = np.array(entries, dtype=np.uint8) % 2
        if entries.ndim != 2:
            raise MatrixError("A generator matrix must be two-dimensional.")
        k, n = entries.shape
        if column_permutation is None:
            column_permutation = range(n)
        column_permutation = tuple(int(c) for c in column_permutation)
        if sorted(column_permutation) != list(range(n)):
            raise MatrixError("Column permutation is not a permutation of the block positions.")
        entries.setflags(write=False)
        self._entries = entries
        self._permutation = column_permutation
        self._dropped_checks = int(dropped_checks)

    @property
    def k(self):
        return self._entries.shape[0]

    @property
    def n(self):
        return self._entries.shape[1]

    @property
    def entries(self):
        return self._entries

    @property
    def column_permutation(self):
        return self._permutation

    @property
    def information_positions(self):
        return self._permutation[: self.k]

    @property
    def dropped_checks(self):
        return self._dropped_checks

    def systematic(self):
        return self._entries[:, list(self._permutation)]

    def __repr__(self):
        return f"GeneratorMatrix(k={self.k}, n={self.n})"


class Code:
    """A code ready for decoding: H, G, its Tanner graph and its identity (content hash of the
    canonical alist of H)."""

    def __init__(self, h, g=None, name=None):
        self.h = h
        self.g = g if g is not None else derive_generator(h)
        if self.g.n != h.cols:
            raise MatrixError(
                f"Generator matrix has {self.g.n} columns but the parity-check matrix has {h.cols}."
            )
        self.name = name or f"code_{h.cols}_{self.g.k}"
        self.matrix_hash = hash_matrix(h)
        self._graph = None

    @property
    def n(self):
        return self.h.cols

    @property
    def k(self):
        return self.g.k

    @property
    def rate(self):
        return self.k / self.n

    @property
    def graph(self):
        if self._graph is None:
            # imported here, the graph module sits above this one
            from minsumkd import tanner

            self._graph = tanner.build(self.h)
        return self._graph

    def describe(self):
        return {
            "name": self.name,
            "n": self.n,
            "k": self.k,
            "checks": self.h.rows,
            "edges": self.h.ones,
            "matrix_hash": self.matrix_hash,
        }


def _tokenize(text):
    """Yields (line_number, [ints]) for every non-blank line."""
    for number, line in enumerate(text.splitlines(), start=1):
        words = line.split()
        if not words:
            continue
        try:
            yield number, [int(w) for w in words]
        except ValueError:
            raise AlistParseError(number, f"expected integers, got '{line.strip()}'")


def _read_index_line(number, values, degree, bound, what):
    # zeros may only pad the end of a list
    padding = values.index(0) if 0 in values else len(values)
    if any(values[padding:]):
        raise AlistParseError(number, f"zero padding inside the index list of {what}")
    nonzero = values[:padding]
    if len(nonzero) != degree:
        raise AlistParseError(
            number, f"{what} lists {len(nonzero)} entries but its degree is {degree}"
        )
    for v in nonzero:
        if v < 1 or v > bound:
            raise AlistParseError(number, f"index {v} of {what} is out of range 1..{bound}")
    if len(set(nonzero)) != len(nonzero):
        raise AlistParseError(number, f"duplicate index in {what}")
    return sorted(v - 1 for v in nonzero)


def _parse_alist_lists(text, allow_empty=False):
    lines = list(_tokenize(text))
    if not lines:
        raise AlistParseError(1, "empty input")

    def line(i, what):
        if i >= len(lines):
            raise AlistParseError(lines[-1][0], f"input ends before the {what}")
        return lines[i]

    number, header = line(0, "header")
    if len(header) != 2 or header[0] <= 0 or header[1] <= 0:
        raise AlistParseError(number, "header must hold two positive integers 'n m'")
    n, m = header
    number, max_degrees = line(1, "maximum degrees")
    if len(max_degrees) != 2:
        raise AlistParseError(number, "expected the two maximum degrees")
    col_number, col_degrees = line(2, "column degrees")
    if len(col_degrees) != n:
        raise AlistParseError(col_number, f"expected {n} column degrees, got {len(col_degrees)}")
    row_number, row_degrees = line(3, "row degrees")
    if len(row_degrees) != m:
        raise AlistParseError(row_number, f"expected {m} row degrees, got {len(row_degrees)}")
    if max(col_degrees) != max_degrees[0] or max(row_degrees) != max_degrees[1]:
        raise AlistParseError(number, "maximum degrees disagree with the degree lists")
    if sum(col_degrees) != sum(row_degrees):
        raise AlistParseError(row_number, "column and row degrees count different numbers of ones")
    if not allow_empty:
        for degrees, lineno, what in (
            (col_degrees, col_number, "column"),
            (row_degrees, row_number, "row"),
        ):
            zero = [i + 1 for i, d in enumerate(degrees) if d == 0]
            if zero:
                raise AlistParseError(lineno, f"{what} {zero[0]} has degree 0")

    col_lists = []
    for v in range(n):
        number, values = line(4 + v, f"index list of column {v + 1}")
        col_lists.append(_read_index_line(number, values, col_degrees[v], m, f"column {v + 1}"))

    from_cols = [[] for _ in range(m)]
    for v, col in enumerate(col_lists):
        for c in col:
            from_cols[c].append(v)

    if len(lines) == 4 + n:
        logger.warning(
            "alist has no row section; reconstructing rows from the column lists."
        )
        return n, m, col_lists, from_cols

    row_lists = []
    for c in range(m):
        number, values = line(4 + n + c, f"index list of row {c + 1}")
        row = _read_index_line(number, values, row_degrees[c], n, f"row {c + 1}")
        if row != from_cols[c]:
            raise AlistParseError(
                number, f"row {c + 1} disagrees with the column lists"
            )
        row_lists.append(row)
    if len(lines) > 4 + n + m:
        raise AlistParseError(lines[4 + n + m][0], "unexpected trailing data")
    return n, m, col_lists, row_lists


def parse_alist(text):
    """Parses alist text into a :class:`ParityCheckMatrix`.

    Index lists may be zero padded. When the row section is missing it is rebuilt from the
    column section. Raises :class:`AlistParseError` naming the offending line.
    """
    n, m, _cols, rows = _parse_alist_lists(text)
    if m > n:
        raise AlistParseError(1, f"more check equations ({m}) than bits ({n})")
    return ParityCheckMatrix(n, rows)


def to_alist(matrix):
    """Canonical alist text of a :class:`ParityCheckMatrix`: 1-based, single spaces, no padding."""
    cols = matrix.col_indices
    rows = matrix.row_indices
    col_degrees = [len(c) for c in cols]
    row_degrees = [len(r) for r in rows]

    def join(values):
        return " ".join(str(v) for v in values)

    lines = [
        join([matrix.cols, matrix.rows]),
        join([max(col_degrees), max(row_degrees)]),
        join(col_degrees),
        join(row_degrees),
    ]
    lines.extend(join(i + 1 for i in col) for col in cols)
    lines.extend(join(i + 1 for i in row) for row in rows)
    return "\n".join(lines) + "\n"


def hash_matrix(matrix):
    return hashlib.sha256(to_alist(matrix).encode("ascii")).hexdigest()


def gf2_row_reduce(matrix):
    """Reduced row-echelon form over GF(2).

    Returns:
        tuple (numpy.ndarray, list): the reduced matrix (``uint8``) and its pivot columns. The
        number of pivots is the GF(2) rank; rows past it are all-zero.
    """
    reduced = np.array(matrix, dtype=bool)
    n_rows, n_cols = reduced.shape
    pivots = []
    pivot_row = 0
    for col in range(n_cols):
        if pivot_row == n_rows:
            break
        candidates = np.flatnonzero(reduced[pivot_row:, col])
        if not candidates.size:
            continue
        found = pivot_row + candidates[0]
        if found != pivot_row:
            reduced[[pivot_row, found]] = reduced[[found, pivot_row]]
        flip = reduced[:, col].copy()
        flip[pivot_row] = False
        reduced[flip] ^= reduced[pivot_row]
        pivots.append(col)
        pivot_row += 1
    return reduced.astype(np.uint8), pivots


def gf2_rank(matrix):
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0
    return len(gf2_row_reduce(matrix)[1])


def derive_generator(h):
    """Builds a generator matrix for the code defined by ``h``.

    H is brought to reduced row-echelon form; its non-pivot columns become the information
    positions and G is systematic on them. Dependent rows of H are dropped with a warning.
    """
    reduced, pivots = gf2_row_reduce(h.dense)
    rank = len(pivots)
    dropped = h.rows - rank
    if dropped:
        logger.warning(
            "Parity-check matrix has %d dependent rows; effective n-k is %d.", dropped, rank
        )
    pivot_set = set(pivots)
    free = [c for c in range(h.cols) if c not in pivot_set]
    k = len(free)
    entries = np.zeros((k, h.cols), dtype=np.uint8)
    if k:
        entries[np.arange(k), free] = 1
        entries[:, pivots] = reduced[:rank, free].T
    g = GeneratorMatrix(entries, free + pivots, dropped_checks=dropped)
    verify_generator(g, h)
    return g


def verify_generator(g, h):
    """Raises :class:`MatrixError` unless G·Hᵀ = 0 over GF(2) and rank(G) = k."""
    if g.n != h.cols:
        raise MatrixError(f"G has {g.n} columns, H has {h.cols}.")
    if g.k and np.any((g.entries.astype(np.int64) @ h.dense.T.astype(np.int64)) % 2):
        raise MatrixError("G·Hᵀ is not zero over GF(2).")
    rank = gf2_rank(g.entries)
    if rank != g.k:
        raise MatrixError(f"Generator matrix has rank {rank} but {g.k} rows.")
    expected = h.cols - gf2_rank(h.dense)
    if g.k != expected:
        raise MatrixError(f"Generator matrix has {g.k} rows but the code dimension is {expected}.")


def load_generator(text, h):
    """Parses an externally supplied generator matrix (alist layout) and validates it against H."""
    n, k, _cols, rows = _parse_alist_lists(text, allow_empty=True)
    entries = np.zeros((k, n), dtype=np.uint8)
    for r, row in enumerate(rows):
        entries[r, row] = 1
    g = GeneratorMatrix(entries)
    verify_generator(g, h)
    return g


def _as_bits(bits, length, what):
    bits = np.asarray(bits)
    if bits.shape[-1:] != (length,):
        raise LengthMismatchError(what, length, bits.shape[-1] if bits.ndim else 0)
    return bits.astype(np.int64) % 2


def encode(g, message):
    """Maps message bits (length k) to a codeword in original column order."""
    message = _as_bits(message, g.k, "message")
    return ((message @ g.entries.astype(np.int64)) % 2).astype(np.uint8)


def syndrome(h, bits):
    """Component c is the XOR of ``bits`` over the ones of row c of H."""
    bits = _as_bits(bits, h.cols, "word")
    return ((bits @ h.dense.T.astype(np.int64)) % 2).astype(np.uint8)


def is_codeword(h, bits):
    return ~np.any(syndrome(h, bits), axis=-1)


def enumerate_codewords(g, limit=ML_ENUMERATION_LIMIT):
    """All 2^k codewords; row i encodes the message whose bits are the big-endian digits of i."""
    if g.k > limit:
        raise OracleLimitError(g.k, limit)
    indices = np.arange(2 ** g.k, dtype=np.int64)
    shifts = np.arange(g.k - 1, -1, -1, dtype=np.int64)
    messages = ((indices[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    return encode(g, messages)


def load_code(pcm_text, name=None, gen_text=None):
    h = parse_alist(pcm_text)
    g = load_generator(gen_text, h) if gen_text is not None else None
    return Code(h, g, name=name)


def _read_alist_file(path):
    try:
        return read_text(path)
    except (UnicodeDecodeError, LookupError) as err:
        raise AlistParseError(1, f"'{path}' could not be decoded as text: {err}")


def read_code(pcm_path, gen_path=None):
    """Reads a code from alist files. Their text encoding is detected."""
    pcm_text = _read_alist_file(pcm_path)
    gen_text = _read_alist_file(gen_path) if gen_path else None
    name = os.path.splitext(os.path.basename(pcm_path))[0]
    return load_code(pcm_text, name=name, gen_text=gen_text)


def bundled_code(name):
    """One of the codes shipped with the package, e.g. ``hamming_7_4``."""
    text = pkgutil.get_data("minsumkd", BUNDLED_CODES[name]).decode("ascii")
    return load_code(text, name=name)
