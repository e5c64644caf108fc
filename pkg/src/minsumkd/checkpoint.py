"""Binary checkpoint of trained offsets.

Layout, little-endian:

    8s   magic ``MSKDBETA``
    H    format version
    32s  SHA-256 of the canonical alist of H
    I    n
    I    n − k
    I    E
    I    T_student
    B    sign convention (1: positive LLR decodes to bit 0)
    T·E  float64 offsets in canonical edge order, iteration major
    I    trailer length, followed by a UTF-8 JSON trailer (step, history, config, optimizer)

The trailer is written with sorted keys and carries no timing, so equal runs give equal files.
"""
import json
import struct

import numpy as np

from minsumkd.decoder import OffsetParameters
from minsumkd.exceptions import CodeMismatchError
from minsumkd.exceptions import CorruptCheckpointError

MAGIC = b"MSKDBETA"
FORMAT_VERSION = 1
POSITIVE_LLR_IS_ZERO = 1
_HEADER = struct.Struct("<8sH32sIIIIB")
_LENGTH = struct.Struct("<I")


class Checkpoint:
    """Trained offsets together with the identity of the code they belong to."""

    def __init__(
        self,
        beta,
        matrix_hash,
        n,
        n_minus_k,
        step=0,
        history=None,
        config=None,
        optimizer=None,
        sign_convention=POSITIVE_LLR_IS_ZERO,
    ):
        self.beta = beta if isinstance(beta, OffsetParameters) else OffsetParameters(beta)
        self.matrix_hash = matrix_hash
        self.n = int(n)
        self.n_minus_k = int(n_minus_k)
        self.step = int(step)
        self.history = list(history or [])
        self.config = dict(config or {})
        self.optimizer = dict(optimizer or {})
        self.sign_convention = int(sign_convention)

    @classmethod
    def for_code(cls, code, beta, **kwargs):
        return cls(beta, code.matrix_hash, code.n, code.n - code.k, **kwargs)

    @property
    def edge_count(self):
        return self.beta.edge_count

    @property
    def t_student(self):
        return self.beta.t_student

    @property
    def parameter_count(self):
        return self.beta.parameter_count

    @property
    def checkpoint_id(self):
        return f"{self.matrix_hash[:12]}-T{self.t_student}-step{self.step}"

    def verify_code(self, code, path="<memory>"):
        if code.matrix_hash != self.matrix_hash:
            raise CodeMismatchError(path, code.matrix_hash, self.matrix_hash)
        if code.graph.edge_count != self.edge_count:
            raise CorruptCheckpointError(
                path, f"holds {self.edge_count} edges, the code has {code.graph.edge_count}"
            )

    def to_bytes(self):
        header = _HEADER.pack(
            MAGIC,
            FORMAT_VERSION,
            bytes.fromhex(self.matrix_hash),
            self.n,
            self.n_minus_k,
            self.edge_count,
            self.t_student,
            self.sign_convention,
        )
        body = self.beta.beta.astype("<f8").tobytes(order="C")
        trailer = json.dumps(
            {
                "step": self.step,
                "history": self.history,
                "config": self.config,
                "optimizer": self.optimizer,
            },
            sort_keys=True,
        ).encode("utf-8")
        return header + body + _LENGTH.pack(len(trailer)) + trailer

    @classmethod
    def from_bytes(cls, data, path="<memory>"):
        if len(data) < _HEADER.size:
            raise CorruptCheckpointError(path, "truncated header")
        magic, version, digest, n, n_minus_k, edges, t_student, sign = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise CorruptCheckpointError(path, "not a checkpoint file")
        if version != FORMAT_VERSION:
            raise CorruptCheckpointError(path, f"unsupported format version {version}")
        offset = _HEADER.size
        body_size = 8 * t_student * edges
        if len(data) < offset + body_size + _LENGTH.size:
            raise CorruptCheckpointError(path, "truncated offsets")
        beta = np.frombuffer(data, dtype="<f8", count=t_student * edges, offset=offset)
        beta = beta.astype(np.float64).reshape(t_student, edges)
        offset += body_size
        (trailer_size,) = _LENGTH.unpack_from(data, offset)
        offset += _LENGTH.size
        if len(data) != offset + trailer_size:
            raise CorruptCheckpointError(path, "trailer length does not match the file size")
        try:
            trailer = json.loads(data[offset:].decode("utf-8"))
        except ValueError as err:
            raise CorruptCheckpointError(path, f"unreadable trailer ({err})")
        if not np.all(np.isfinite(beta)):
            raise CorruptCheckpointError(path, "offsets are not finite")
        return cls(
            beta,
            digest.hex(),
            n,
            n_minus_k,
            step=trailer.get("step", 0),
            history=trailer.get("history"),
            config=trailer.get("config"),
            optimizer=trailer.get("optimizer"),
            sign_convention=sign,
        )


def save_checkpoint(path, checkpoint):
    with open(path, "wb") as file:
        file.write(checkpoint.to_bytes())


def load_checkpoint(path, code=None):
    """Reads a checkpoint; with ``code``, also checks that it was trained for that code."""
    with open(path, "rb") as file:
        data = file.read()
    checkpoint = Checkpoint.from_bytes(data, path=path)
    if code is not None:
        checkpoint.verify_code(code, path=path)
    return checkpoint
