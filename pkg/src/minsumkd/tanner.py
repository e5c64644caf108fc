"""Edge-indexed Tanner graph.

Edges are numbered 0..E−1 in row-major order of H (by check, then by variable). Every per-edge
tensor in the package (messages, offsets, gradients) uses this numbering.

Message kernels work on padded index tables: a table row lists edge ids and unused slots hold E,
which the kernels map to a neutral element appended after the last edge (0 for sums, +∞ for
minimums, +1 for sign products).
"""
import numpy as np

from minsumkd.codebook import ParityCheckMatrix
from minsumkd.exceptions import NeighborNotFoundError


def exclusive_neighbors(adjacency, excluded):
    """The edge ids of ``adjacency`` without ``excluded``, order preserved."""
    adjacency = list(adjacency)
    if excluded not in adjacency:
        raise NeighborNotFoundError(excluded)
    return [e for e in adjacency if e != excluded]


def _padded_table(lists, pad, width=None):
    width = width or max(1, max((len(values) for values in lists), default=0))
    table = np.full((len(lists), width), pad, dtype=np.intp)
    for row, values in enumerate(lists):
        table[row, : len(values)] = values
    table.setflags(write=False)
    return table


def _exclusion_table(adjacency, edge_count):
    """Row e lists the other edges that share e's node, ascending."""
    excl = [None] * edge_count
    for edges in adjacency:
        for e in edges:
            excl[e] = exclusive_neighbors(edges, e)
    return _padded_table(excl, edge_count)


class TannerGraph:
    """Bipartite graph of n variable nodes and m check nodes. Immutable."""

    def __init__(self, n_var, n_check, edge_check, edge_var):
        self._n_var = int(n_var)
        self._n_check = int(n_check)
        self._edge_check = np.asarray(edge_check, dtype=np.intp)
        self._edge_var = np.asarray(edge_var, dtype=np.intp)
        self._edge_check.setflags(write=False)
        self._edge_var.setflags(write=False)
        edge_count = len(self._edge_check)

        var_adj = [[] for _ in range(self._n_var)]
        check_adj = [[] for _ in range(self._n_check)]
        for e, (c, v) in enumerate(zip(self._edge_check, self._edge_var)):
            var_adj[v].append(e)
            check_adj[c].append(e)
        self._var_adjacency = tuple(tuple(a) for a in var_adj)
        self._check_adjacency = tuple(tuple(a) for a in check_adj)

        self.var_table = _padded_table(var_adj, edge_count)
        self.check_var_table = _padded_table(
            [[int(self._edge_var[e]) for e in edges] for edges in check_adj], self._n_var
        )
        self.var_excl = _exclusion_table(var_adj, edge_count)
        self.check_excl = _exclusion_table(check_adj, edge_count)

    @property
    def n_var(self):
        return self._n_var

    @property
    def n_check(self):
        return self._n_check

    @property
    def edge_count(self):
        return len(self._edge_check)

    @property
    def edge_check(self):
        return self._edge_check

    @property
    def edge_var(self):
        return self._edge_var

    @property
    def edges(self):
        return list(zip(self._edge_check.tolist(), self._edge_var.tolist()))

    @property
    def var_adjacency(self):
        """For each variable v, the ids of its edges (N(v))."""
        return self._var_adjacency

    @property
    def check_adjacency(self):
        """For each check c, the ids of its edges (M(c))."""
        return self._check_adjacency

    @property
    def var_degrees(self):
        return np.array([len(a) for a in self._var_adjacency])

    @property
    def check_degrees(self):
        return np.array([len(a) for a in self._check_adjacency])

    def to_matrix(self):
        rows = [[int(self._edge_var[e]) for e in edges] for edges in self._check_adjacency]
        return ParityCheckMatrix(self._n_var, rows)

    def syndrome(self, bits):
        """Parity of every check for a batch of hard decisions of shape (B, n)."""
        bits = np.asarray(bits, dtype=np.uint8)
        padded = np.concatenate([bits, np.zeros(bits.shape[:-1] + (1,), np.uint8)], axis=-1)
        return padded[..., self.check_var_table].sum(axis=-1) % 2

    def __repr__(self):
        return f"TannerGraph(n_var={self.n_var}, n_check={self.n_check}, edges={self.edge_count})"


def build(h):
    """The Tanner graph of a :class:`~minsumkd.codebook.ParityCheckMatrix`, one edge per one."""
    edge_check = []
    edge_var = []
    for c, row in enumerate(h.row_indices):
        edge_check.extend([c] * len(row))
        edge_var.extend(row)
    return TannerGraph(h.cols, h.rows, edge_check, edge_var)
