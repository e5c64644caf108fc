"""Training losses of the student decoder and their derivatives with respect to its messages.

Every term is computed per frame; batch values are frame means. Sigmoid arguments are clamped to
±``SIGMOID_CLAMP`` and the derivative of a clamped entry is zero.
"""
import numpy as np
from scipy.special import expit
from scipy.special import log_expit

from minsumkd.enums import LossTerm
from minsumkd.enums import SparseVariant
from minsumkd.exceptions import ConfigError
from minsumkd.exceptions import ShapeMismatchError

SIGMOID_CLAMP = 30.0


class LossConfig:
    """Weights and shape of the combined loss L = L_ce + α·L_kd + γ·L_s.

    Args:
        alpha (float): Weight of the distillation term.
        gamma (float): Weight of the sparse activation term.
        p (int): Even norm order of the distillation and sparse terms.
        t_o (int): Look-ahead; student iteration t is paired with teacher iteration t + t_o.
        terms (iterable): Enabled terms, any of ``ce``, ``kd`` and ``sparse``.
        sparse_variant (str): ``literal`` penalizes σ(μ)^p, ``symmetric`` penalizes (2σ(μ)−1)^p.
        kd_normalize (bool): Divide the distillation term by the edge count.
    """

    def __init__(
        self,
        alpha=1.0,
        gamma=0.01,
        p=12,
        t_o=25,
        terms=(LossTerm.CE, LossTerm.KD, LossTerm.SPARSE),
        sparse_variant=SparseVariant.LITERAL,
        kd_normalize=False,
    ):
        self.alpha = float(alpha)
        self.gamma = float(gamma)
        self.p = int(p)
        self.t_o = int(t_o)
        terms = set(terms)
        unknown = terms - set(LossTerm.choices())
        if unknown:
            raise ConfigError(f"Unknown loss terms: {sorted(unknown)}.")
        self.terms = tuple(t for t in LossTerm.choices() if t in terms)
        self.sparse_variant = sparse_variant
        self.kd_normalize = bool(kd_normalize)
        self.validate()

    def validate(self):
        if not self.terms:
            raise ConfigError(f"At least one loss term out of {LossTerm.choices()} is required.")
        if self.p < 2 or self.p % 2:
            raise ConfigError(f"Norm order p must be an even integer ≥ 2, got {self.p}.")
        if self.t_o < 0:
            raise ConfigError(f"Look-ahead must be non-negative, got {self.t_o}.")
        if self.sparse_variant not in SparseVariant.choices():
            raise ConfigError(f"Unknown sparse loss variant '{self.sparse_variant}'.")

    @property
    def enable_ce(self):
        return LossTerm.CE in self.terms

    @property
    def enable_kd(self):
        return LossTerm.KD in self.terms

    @property
    def enable_sparse(self):
        return LossTerm.SPARSE in self.terms

    def check_horizon(self, t_student, t_teacher):
        if self.enable_kd and t_teacher < t_student + self.t_o:
            raise ConfigError(
                f"The teacher needs at least t_student + t_o = {t_student + self.t_o} "
                f"iterations, got {t_teacher}."
            )

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "gamma": self.gamma,
            "p": self.p,
            "t_o": self.t_o,
            "terms": list(self.terms),
            "sparse_variant": self.sparse_variant,
            "kd_normalize": self.kd_normalize,
        }

    @classmethod
    def from_dict(cls, values):
        return cls(**values)


class LossBreakdown:
    """Batch-mean loss terms. ``per_example`` holds the per-frame totals."""

    def __init__(self, ce, kd, sparse, alpha, gamma, per_example=None):
        self.ce = float(ce)
        self.kd = float(kd)
        self.sparse = float(sparse)
        self.total = self.ce + alpha * self.kd + gamma * self.sparse
        self.per_example = per_example

    def to_dict(self):
        return {"ce": self.ce, "kd": self.kd, "sparse": self.sparse, "total": self.total}

    def __repr__(self):
        return (
            f"LossBreakdown(ce={self.ce:.6g}, kd={self.kd:.6g}, "
            f"sparse={self.sparse:.6g}, total={self.total:.6g})"
        )


class LossSeeds:
    """∂L/∂(final soft output), ∂L/∂μ_{c,v}(t) and ∂L/∂μ_{v,c}(t) per frame, already weighted."""

    def __init__(self, soft_final, check_to_var, var_to_check):
        self.soft_final = soft_final
        self.check_to_var = check_to_var
        self.var_to_check = var_to_check


def _clamped(x):
    x = np.asarray(x, dtype=np.float64)
    return np.clip(x, -SIGMOID_CLAMP, SIGMOID_CLAMP), np.abs(x) <= SIGMOID_CLAMP


def cross_entropy(soft, target_bits):
    """Per-frame −(1/n) Σ_v [B_v·log σ(−s_v) + (1−B_v)·log σ(s_v)]."""
    soft = np.asarray(soft, dtype=np.float64)
    target = np.asarray(target_bits, dtype=np.float64)
    if soft.shape != target.shape:
        raise ShapeMismatchError("target bits", soft.shape, target.shape)
    s, _ = _clamped(soft)
    terms = target * log_expit(-s) + (1.0 - target) * log_expit(s)
    return -terms.mean(axis=-1)


def cross_entropy_grad(soft, target_bits):
    s, inside = _clamped(soft)
    n = s.shape[-1]
    return (expit(s) - 1.0 + np.asarray(target_bits, dtype=np.float64)) * inside / n


def _kd_pairs(student_c2v, teacher_c2v, t_o):
    t_student = student_c2v.shape[1]
    if teacher_c2v.shape[1] < t_student + t_o:
        raise ShapeMismatchError(
            "teacher trace iterations", (t_student + t_o,), (teacher_c2v.shape[1],)
        )
    if teacher_c2v.shape[0] != student_c2v.shape[0] or teacher_c2v.shape[2] != student_c2v.shape[2]:
        raise ShapeMismatchError("teacher trace", student_c2v.shape, teacher_c2v.shape)
    return teacher_c2v[:, t_o : t_o + t_student]


def kd_loss(student_c2v, teacher_c2v, cfg):
    """Per-frame Σ_t Σ_edges |σ(μ^teacher(t + t_o)) − σ(μ^student(t))|^p over check-to-variable
    messages."""
    teacher = _kd_pairs(student_c2v, teacher_c2v, cfg.t_o)
    diff = expit(_clamped(teacher)[0]) - expit(_clamped(student_c2v)[0])
    value = (diff ** cfg.p).sum(axis=(1, 2))
    if cfg.kd_normalize:
        value = value / student_c2v.shape[2]
    return value


def kd_loss_grad(student_c2v, teacher_c2v, cfg):
    teacher = _kd_pairs(student_c2v, teacher_c2v, cfg.t_o)
    student, inside = _clamped(student_c2v)
    sig = expit(student)
    diff = expit(_clamped(teacher)[0]) - sig
    grad = -cfg.p * diff ** (cfg.p - 1) * sig * (1.0 - sig) * inside
    if cfg.kd_normalize:
        grad = grad / student_c2v.shape[2]
    return grad


def _sparse_terms(messages, cfg):
    x, inside = _clamped(messages)
    sig = expit(x)
    if cfg.sparse_variant == SparseVariant.SYMMETRIC:
        base = 2.0 * sig - 1.0
        grad = cfg.p * base ** (cfg.p - 1) * 2.0 * sig * (1.0 - sig)
    else:
        base = sig
        grad = cfg.p * sig ** cfg.p * (1.0 - sig)
    return base ** cfg.p, grad * inside


def sparse_loss(student_v2c, student_c2v, cfg):
    """Per-frame Σ_t [Σ_edges σ(μ_{c,v}(t))^p + Σ_edges σ(μ_{v,c}(t))^p]."""
    check_terms, _ = _sparse_terms(student_c2v, cfg)
    var_terms, _ = _sparse_terms(student_v2c, cfg)
    return check_terms.sum(axis=(1, 2)) + var_terms.sum(axis=(1, 2))


def sparse_loss_grad(student_v2c, student_c2v, cfg):
    """Returns (∂L_s/∂μ_{v,c}, ∂L_s/∂μ_{c,v})."""
    return _sparse_terms(student_v2c, cfg)[1], _sparse_terms(student_c2v, cfg)[1]


def _student_window(student_trace):
    return student_trace.var_to_check, student_trace.check_to_var


def combined(student_trace, teacher_trace, target_bits, cfg):
    """Batch-mean :class:`LossBreakdown`; disabled terms contribute 0."""
    v2c, c2v = _student_window(student_trace)
    batch = c2v.shape[0]
    zeros = np.zeros(batch)
    ce = cross_entropy(student_trace.soft_output[:, -1], target_bits) if cfg.enable_ce else zeros
    kd = kd_loss(c2v, teacher_trace.check_to_var, cfg) if cfg.enable_kd else zeros
    sparse = sparse_loss(v2c, c2v, cfg) if cfg.enable_sparse else zeros
    per_example = ce + cfg.alpha * kd + cfg.gamma * sparse
    return LossBreakdown(
        ce.mean(), kd.mean(), sparse.mean(), cfg.alpha, cfg.gamma, per_example=per_example
    )


def combined_seeds(student_trace, teacher_trace, target_bits, cfg):
    """Per-frame derivatives of the weighted combined loss with respect to the student's
    messages and final soft output."""
    v2c, c2v = _student_window(student_trace)
    soft_seed = np.zeros_like(student_trace.soft_output[:, -1])
    c2v_seed = np.zeros_like(c2v)
    v2c_seed = np.zeros_like(v2c)
    if cfg.enable_ce:
        soft_seed = cross_entropy_grad(student_trace.soft_output[:, -1], target_bits)
    if cfg.enable_kd:
        c2v_seed = c2v_seed + cfg.alpha * kd_loss_grad(c2v, teacher_trace.check_to_var, cfg)
    if cfg.enable_sparse:
        d_v2c, d_c2v = sparse_loss_grad(v2c, c2v, cfg)
        c2v_seed = c2v_seed + cfg.gamma * d_c2v
        v2c_seed = v2c_seed + cfg.gamma * d_v2c
    return LossSeeds(soft_seed, c2v_seed, v2c_seed)
