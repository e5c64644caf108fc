"""Min-sum message passing on a :class:`~minsumkd.tanner.TannerGraph`.

All kernels are batched: LLRs have shape (B, n), messages (B, E). Messages live in the LLR
domain and are clipped to ±``llr_cap`` after every update. A positive soft output decodes to bit 0.
"""
import logging

import numpy as np

from minsumkd.exceptions import ShapeMismatchError

logger = logging.getLogger(__name__)

DEFAULT_LLR_CAP = 30.0


class OffsetParameters:
    """Learnable offsets β, one per edge per student iteration, shape (T, E)."""

    def __init__(self, beta):
        beta = np.array(beta, dtype=np.float64)
        if beta.ndim != 2:
            raise ShapeMismatchError("offsets", ("T", "E"), beta.shape)
        if not np.all(np.isfinite(beta)):
            raise ValueError("Offsets must be finite.")
        self._beta = beta

    @classmethod
    def zeros(cls, t_student, edge_count):
        return cls(np.zeros((t_student, edge_count)))

    @property
    def beta(self):
        return self._beta

    @property
    def t_student(self):
        return self._beta.shape[0]

    @property
    def edge_count(self):
        return self._beta.shape[1]

    @property
    def parameter_count(self):
        return self._beta.size

    def check_graph(self, graph):
        if self.edge_count != graph.edge_count:
            raise ShapeMismatchError(
                "offsets", (self.t_student, graph.edge_count), self._beta.shape
            )

    def copy(self):
        return OffsetParameters(self._beta.copy())


class CheckUpdate:
    def __init__(self, messages, argmin, offset_active, saturated):
        self.messages = messages
        self.argmin = argmin
        self.offset_active = offset_active
        self.saturated = saturated


class MessageTrace:
    """Per-iteration messages of a batched decode.

    Arrays are indexed (frame, iteration, edge) or (frame, iteration, variable); iteration index
    i holds iteration t = i + 1. ``argmin_index`` is −1 where a check edge has no competitor.
    """

    def __init__(
        self,
        llr_input,
        var_to_check,
        check_to_var,
        soft_output,
        argmin_index,
        offset_active,
        var_saturated,
        check_saturated,
        llr_cap,
    ):
        self.llr_input = llr_input
        self.var_to_check = var_to_check
        self.check_to_var = check_to_var
        self.soft_output = soft_output
        self.argmin_index = argmin_index
        self.offset_active = offset_active
        self.var_saturated = var_saturated
        self.check_saturated = check_saturated
        self.llr_cap = llr_cap

    @property
    def iterations(self):
        return self.check_to_var.shape[1]

    @property
    def batch_size(self):
        return self.check_to_var.shape[0]


class _TraceRecorder:
    def __init__(self):
        self.fields = {
            "var_to_check": [],
            "check_to_var": [],
            "soft_output": [],
            "argmin_index": [],
            "offset_active": [],
            "var_saturated": [],
            "check_saturated": [],
        }

    def add(self, v2c, var_sat, check, soft):
        self.fields["var_to_check"].append(v2c)
        self.fields["var_saturated"].append(var_sat)
        self.fields["check_to_var"].append(check.messages)
        self.fields["argmin_index"].append(check.argmin)
        self.fields["offset_active"].append(check.offset_active)
        self.fields["check_saturated"].append(check.saturated)
        self.fields["soft_output"].append(soft)

    def build(self, llr, llr_cap):
        arrays = {key: np.stack(values, axis=1) for key, values in self.fields.items()}
        return MessageTrace(llr_input=llr, llr_cap=llr_cap, **arrays)


class DecodeResult:
    """Outcome of a batched decode. ``bits`` is the hard slice of ``soft_output``."""

    def __init__(self, bits, soft_output, iterations_run, valid_codeword, trace=None):
        self.bits = bits
        self.soft_output = soft_output
        self.iterations_run = iterations_run
        self.valid_codeword = valid_codeword
        self.trace = trace

    @property
    def batch_size(self):
        return self.bits.shape[0]


def _append_pad(messages, value):
    pad = np.full(messages.shape[:-1] + (1,), value, dtype=messages.dtype)
    return np.concatenate([messages, pad], axis=-1)


def variable_update(check_to_var, llr, graph, llr_cap=DEFAULT_LLR_CAP):
    """μ_{v,c}(t) = l_v + Σ_{c'∈N(v)\\c} μ_{c',v}(t−1), clipped to ±llr_cap.

    Returns:
        tuple (numpy.ndarray, numpy.ndarray): the messages and the mask of clipped entries.
    """
    incoming = _append_pad(check_to_var, 0.0)[:, graph.var_excl].sum(axis=-1)
    raw = llr[:, graph.edge_var] + incoming
    saturated = np.abs(raw) > llr_cap
    return np.clip(raw, -llr_cap, llr_cap), saturated


def check_update(var_to_check, offsets, graph, llr_cap=DEFAULT_LLR_CAP):
    """μ_{c,v}(t) = Π sign(μ_{v',c}) · max(min |μ_{v',c}| − β_{c,v}, 0) over v' ∈ M(c)\\v.

    ``offsets`` is a row of length E or a scalar. sign(0) is +1; the minimum over no competitor
    is +∞ and ties go to the lowest edge id.
    """
    magnitudes = _append_pad(np.abs(var_to_check), np.inf)[:, graph.check_excl]
    signs = np.where(var_to_check < 0, -1.0, 1.0)
    signs = _append_pad(signs, 1.0)[:, graph.check_excl].prod(axis=-1)

    position = magnitudes.argmin(axis=-1)
    smallest = np.take_along_axis(magnitudes, position[..., None], axis=-1)[..., 0]
    argmin = graph.check_excl[np.arange(graph.edge_count), position]
    argmin = np.where(argmin == graph.edge_count, -1, argmin)

    raw = smallest - offsets
    offset_active = raw > 0
    magnitude = np.where(offset_active, raw, 0.0)
    saturated = magnitude > llr_cap
    messages = signs * np.minimum(magnitude, llr_cap)
    return CheckUpdate(messages, argmin, offset_active, saturated)


def soft_output(check_to_var, llr, graph):
    """s_v(t) = l_v + Σ_{c'∈N(v)} μ_{c',v}(t)."""
    return llr + _append_pad(check_to_var, 0.0)[:, graph.var_table].sum(axis=-1)


def hard_slice(s):
    """Bit 0 where s > 0, bit 1 where s ≤ 0."""
    return (np.asarray(s) <= 0).astype(np.uint8)


def _as_batch(llr, graph):
    llr = np.asarray(llr, dtype=np.float64)
    if llr.ndim == 1:
        llr = llr[None, :]
    if llr.ndim != 2 or llr.shape[1] != graph.n_var:
        raise ShapeMismatchError("LLRs", ("B", graph.n_var), llr.shape)
    return llr


def _run(llr, graph, iterations, offset_for, record_trace, early_exit, llr_cap):
    llr = _as_batch(llr, graph)
    batch = llr.shape[0]
    c2v = np.zeros((batch, graph.edge_count))
    recorder = _TraceRecorder() if record_trace else None

    final_soft = np.array(llr)
    iterations_run = np.zeros(batch, dtype=np.int64)
    converged = np.zeros(batch, dtype=bool)
    for i in range(iterations):
        v2c, var_sat = variable_update(c2v, llr, graph, llr_cap)
        check = check_update(v2c, offset_for(i), graph, llr_cap)
        c2v = check.messages
        soft = soft_output(c2v, llr, graph)
        if recorder:
            recorder.add(v2c, var_sat, check, soft)

        running = ~converged
        final_soft[running] = soft[running]
        iterations_run[running] = i + 1
        if early_exit:
            valid = ~np.any(graph.syndrome(hard_slice(soft)), axis=-1)
            converged |= running & valid
            if converged.all():
                logger.debug("All %d frames converged after %d iterations.", batch, i + 1)
                break

    bits = hard_slice(final_soft)
    valid = ~np.any(graph.syndrome(bits), axis=-1)
    trace = recorder.build(llr, llr_cap) if recorder else None
    return DecodeResult(bits, final_soft, iterations_run, valid, trace)


def decode(
    llr,
    graph,
    beta=None,
    iterations=None,
    record_trace=False,
    early_exit=False,
    llr_cap=DEFAULT_LLR_CAP,
):
    """Neural min-sum decoding with per-edge, per-iteration offsets.

    Args:
        llr (numpy.ndarray): Channel LLRs, shape (n,) or (B, n).
        graph (TannerGraph): The code's graph.
        beta (OffsetParameters or numpy.ndarray): Offsets of shape (T, E); zero when omitted.
        iterations (int): T. Defaults to the number of offset rows.
        record_trace (bool): Keep every iteration's messages.
        early_exit (bool): Freeze each frame once its hard decision satisfies every check, and
            stop when all frames have.
        llr_cap (float): Message clipping level.

    Returns:
        DecodeResult
    """
    if beta is None:
        if iterations is None:
            raise ValueError("Either offsets or an iteration count is required.")
        beta = np.zeros((iterations, graph.edge_count))
    beta = beta.beta if isinstance(beta, OffsetParameters) else np.asarray(beta, dtype=np.float64)
    iterations = beta.shape[0] if iterations is None else iterations
    if iterations < 1:
        raise ValueError("At least one iteration is required.")
    if beta.shape != (iterations, graph.edge_count):
        raise ShapeMismatchError("offsets", (iterations, graph.edge_count), beta.shape)
    return _run(llr, graph, iterations, lambda i: beta[i], record_trace, early_exit, llr_cap)


def minsum_decode(
    llr,
    graph,
    iterations,
    offset=0.0,
    record_trace=False,
    early_exit=False,
    llr_cap=DEFAULT_LLR_CAP,
):
    """Plain min-sum (``offset`` = 0) or offset min-sum with one fixed offset for every edge."""
    if iterations < 1:
        raise ValueError("At least one iteration is required.")
    offset = float(offset)
    return _run(llr, graph, iterations, lambda i: offset, record_trace, early_exit, llr_cap)
