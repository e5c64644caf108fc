"""Reverse-mode derivative of the combined loss with respect to the offsets β.

The backward pass walks the unrolled student decoder from the last iteration to the first and
reuses the flags recorded by the forward pass:

* a check message passes its adjoint to β and to its minimum only where the offset is active
  (relu'(0) = 0) and the message was not clipped,
* the minimum routes its adjoint to the recorded argmin edge only, times sign(μ) with sign(0) = +1,
* sign products are constants,
* a clipped variable message blocks its adjoint.

The teacher trace only enters through the loss seeds; nothing flows back into it.
"""
import logging

import numpy as np

from minsumkd import loss
from minsumkd.decoder import decode
from minsumkd.decoder import DEFAULT_LLR_CAP
from minsumkd.decoder import minsum_decode
from minsumkd.decoder import OffsetParameters
from minsumkd.exceptions import ConfigError
from minsumkd.exceptions import ShapeMismatchError

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-4
_RELATIVE_FLOOR = 1e-6


class GradientBuffer:
    """Per-frame adjoints of one backward pass.

    ``per_example_d_beta`` has shape (B, T, E); ``d_beta`` is its batch mean, the gradient of the
    batch-mean loss.
    """

    def __init__(self, per_example_d_beta, d_var_to_check, d_check_to_var, loss_value):
        self.per_example_d_beta = per_example_d_beta
        self.d_var_to_check = d_var_to_check
        self.d_check_to_var = d_check_to_var
        self.loss_value = loss_value

    @property
    def d_beta(self):
        return self.per_example_d_beta.sum(axis=0) / self.per_example_d_beta.shape[0]


def _check_shapes(trace, teacher_trace, target_bits, cfg):
    batch, _, edges = trace.check_to_var.shape
    if np.shape(target_bits) != trace.soft_output[:, -1].shape:
        raise ShapeMismatchError("target bits", trace.soft_output[:, -1].shape, np.shape(target_bits))
    if cfg.enable_kd:
        needed = trace.iterations + cfg.t_o
        shape = teacher_trace.check_to_var.shape
        if shape[0] != batch or shape[2] != edges or shape[1] < needed:
            raise ShapeMismatchError("teacher trace", (batch, needed, edges), shape)


def backward(trace, teacher_trace, target_bits, cfg, graph):
    """Gradient of L = L_ce + α·L_kd + γ·L_s with respect to β for every frame of ``trace``.

    Args:
        trace (MessageTrace): Student trace recorded with ``record_trace``.
        teacher_trace (MessageTrace): Teacher trace covering t_student + t_o iterations.
        target_bits (numpy.ndarray): Transmitted codewords, shape (B, n).
        cfg (LossConfig): Loss configuration.
        graph (TannerGraph): The graph both traces were decoded on.

    Returns:
        GradientBuffer
    """
    _check_shapes(trace, teacher_trace, target_bits, cfg)
    breakdown = loss.combined(trace, teacher_trace, target_bits, cfg)
    seeds = loss.combined_seeds(trace, teacher_trace, target_bits, cfg)

    batch, iterations, edges = trace.check_to_var.shape
    d_beta = np.zeros((batch, iterations, edges))
    d_v2c = np.zeros((batch, iterations, edges))
    d_c2v = np.zeros((batch, iterations, edges))
    frame_offsets = (np.arange(batch) * edges)[:, None]
    d_pre_next = None

    for i in range(iterations - 1, -1, -1):
        grad_c = seeds.check_to_var[:, i].copy()
        if i == iterations - 1:
            grad_c += seeds.soft_final[:, graph.edge_var]
        if d_pre_next is not None:
            padded = np.concatenate([d_pre_next, np.zeros((batch, 1))], axis=1)
            grad_c += padded[:, graph.var_excl].sum(axis=-1)
        d_c2v[:, i] = grad_c

        v2c = trace.var_to_check[:, i]
        argmin = trace.argmin_index[:, i]
        signs = np.where(v2c < 0, -1.0, 1.0)
        competitor_signs = np.concatenate([signs, np.ones((batch, 1))], axis=1)
        competitor_signs = competitor_signs[:, graph.check_excl].prod(axis=-1)
        flow = trace.offset_active[:, i] & ~trace.check_saturated[:, i] & (argmin >= 0)

        grad_m = np.where(flow, grad_c * competitor_signs, 0.0)
        d_beta[:, i] = -grad_m

        target = np.where(flow, argmin, 0)
        routed = grad_m * np.take_along_axis(signs, target, axis=1)
        grad_v = seeds.var_to_check[:, i] + np.bincount(
            (frame_offsets + target).ravel(), weights=routed.ravel(), minlength=batch * edges
        ).reshape(batch, edges)
        d_v2c[:, i] = grad_v
        d_pre_next = np.where(trace.var_saturated[:, i], 0.0, grad_v)

    return GradientBuffer(d_beta, d_v2c, d_c2v, breakdown.total)


def _loss_of(llr, target_bits, teacher_trace, beta, cfg, graph, llr_cap):
    result = decode(llr, graph, beta, record_trace=True, llr_cap=llr_cap)
    return loss.combined(result.trace, teacher_trace, target_bits, cfg).total, result.trace


def _kink_between(a, b):
    return bool(
        np.any(a.argmin_index != b.argmin_index)
        or np.any(a.offset_active != b.offset_active)
        or np.any(a.check_saturated != b.check_saturated)
        or np.any(a.var_saturated != b.var_saturated)
        or np.any((a.var_to_check < 0) != (b.var_to_check < 0))
        or np.any(
            (np.abs(a.soft_output[:, -1]) > loss.SIGMOID_CLAMP)
            != (np.abs(b.soft_output[:, -1]) > loss.SIGMOID_CLAMP)
        )
    )


class GradCheckReport:
    def __init__(self, entries, tolerance):
        self.entries = entries
        self.tolerance = tolerance

    @property
    def checked(self):
        return [e for e in self.entries if not e["kink"]]

    @property
    def kink_count(self):
        return len(self.entries) - len(self.checked)

    @property
    def max_relative_error(self):
        errors = [e["relative_error"] for e in self.checked]
        return max(errors) if errors else 0.0

    @property
    def passed(self):
        return self.max_relative_error < self.tolerance

    def summary(self):
        return {
            "sampled": len(self.entries),
            "checked": len(self.checked),
            "kinks": self.kink_count,
            "max_relative_error": self.max_relative_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def finite_difference_check(
    llr,
    target_bits,
    graph,
    beta,
    cfg,
    t_teacher,
    epsilon=1e-4,
    sample_count=200,
    rng=None,
    teacher_offset=0.0,
    llr_cap=DEFAULT_LLR_CAP,
    tolerance=DEFAULT_TOLERANCE,
):
    """Compares the analytic gradient with central differences (L(β+ε) − L(β−ε)) / 2ε.

    Entries are sampled without replacement. An entry whose ±ε perturbation changes any recorded
    flag (argmin, offset activity, clipping, message sign) sits on a kink and is reported but not
    scored.

    Returns:
        GradCheckReport
    """
    if not epsilon > 0:
        raise ConfigError(f"Finite-difference step must be positive, got {epsilon}.")
    beta = beta.beta if isinstance(beta, OffsetParameters) else np.asarray(beta, dtype=np.float64)
    rng = rng or np.random.default_rng(0)
    cfg.check_horizon(beta.shape[0], t_teacher)

    teacher = minsum_decode(
        llr, graph, t_teacher, offset=teacher_offset, record_trace=True, llr_cap=llr_cap
    ).trace
    student = decode(llr, graph, beta, record_trace=True, llr_cap=llr_cap).trace
    analytic = backward(student, teacher, target_bits, cfg, graph).d_beta

    size = beta.size
    picks = rng.choice(size, size=min(int(sample_count), size), replace=False)
    entries = []
    for flat in np.sort(picks):
        t, e = np.unravel_index(flat, beta.shape)
        plus = beta.copy()
        minus = beta.copy()
        plus[t, e] += epsilon
        minus[t, e] -= epsilon
        loss_plus, trace_plus = _loss_of(llr, target_bits, teacher, plus, cfg, graph, llr_cap)
        loss_minus, trace_minus = _loss_of(llr, target_bits, teacher, minus, cfg, graph, llr_cap)
        numeric = (loss_plus - loss_minus) / (2.0 * epsilon)
        exact = analytic[t, e]
        relative = abs(numeric - exact) / max(abs(numeric), abs(exact), _RELATIVE_FLOOR)
        entries.append(
            {
                "iteration": int(t) + 1,
                "edge": int(e),
                "analytic": float(exact),
                "numeric": float(numeric),
                "relative_error": float(relative),
                "kink": _kink_between(trace_plus, trace_minus),
            }
        )
    report = GradCheckReport(entries, tolerance)
    logger.debug("Gradient check: %s", report.summary())
    return report
