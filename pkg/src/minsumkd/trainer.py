"""Training of the per-edge offsets by gradient descent on mixed-SNR batches.

Every batch holds the same number of random codewords at each SNR of the grid. A fixed min-sum
teacher decodes the batch with T_teacher iterations; the student decodes it with its learnable
offsets and T_student iterations. The combined loss is differentiated with :mod:`minsumkd.grad`
and the offsets are updated once per batch.
"""
import logging

import numpy as np
from pandas import DataFrame

from minsumkd import channel
from minsumkd.checkpoint import Checkpoint
from minsumkd.codebook import encode
from minsumkd.decoder import decode
from minsumkd.decoder import DEFAULT_LLR_CAP
from minsumkd.decoder import minsum_decode
from minsumkd.decoder import OffsetParameters
from minsumkd.enums import DecoderKind
from minsumkd.enums import OptimizerKind
from minsumkd.enums import SnrConvention
from minsumkd.enums import StreamPurpose
from minsumkd.evaluation import DecoderSpec
from minsumkd.evaluation import measure_ber
from minsumkd.exceptions import ConfigError
from minsumkd.exceptions import NumericalInstabilityError
from minsumkd.grad import backward
from minsumkd.loss import combined
from minsumkd.loss import LossBreakdown
from minsumkd.loss import LossConfig
from minsumkd.optim import create_optimizer

logger = logging.getLogger(__name__)

# frames per forward/backward task; fixed so sums never depend on the worker count
TRAIN_CHUNK_EXAMPLES = 45
DEFAULT_SNR_GRID = tuple(float(s) for s in range(1, 9))


class TrainingConfig:
    """Everything that determines a training run.

    ``batch_size`` may be omitted; it is then examples_per_snr × len(snr_grid_db). When given it
    must equal that product.
    """

    def __init__(
        self,
        snr_grid_db=DEFAULT_SNR_GRID,
        examples_per_snr=45,
        batch_size=None,
        learning_rate=0.01,
        optimizer=OptimizerKind.SGD,
        epochs=5,
        batches_per_epoch=1000,
        t_teacher=30,
        t_student=5,
        seed=0,
        loss_cfg=None,
        validation_snr_db=6.0,
        validation_frames=100_000,
        early_stop_patience=3,
        teacher_offset=0.0,
        llr_cap=DEFAULT_LLR_CAP,
        snr_convention=SnrConvention.EBNO,
    ):
        self.snr_grid_db = tuple(float(s) for s in snr_grid_db)
        self.examples_per_snr = int(examples_per_snr)
        expected = self.examples_per_snr * len(self.snr_grid_db)
        self.batch_size = expected if batch_size is None else int(batch_size)
        self.learning_rate = float(learning_rate)
        self.optimizer = optimizer
        self.epochs = int(epochs)
        self.batches_per_epoch = int(batches_per_epoch)
        self.t_teacher = int(t_teacher)
        self.t_student = int(t_student)
        self.seed = int(seed)
        self.loss_cfg = loss_cfg if loss_cfg is not None else LossConfig()
        self.validation_snr_db = float(validation_snr_db)
        self.validation_frames = int(validation_frames)
        self.early_stop_patience = int(early_stop_patience)
        self.teacher_offset = float(teacher_offset)
        self.llr_cap = float(llr_cap)
        self.snr_convention = snr_convention
        self.validate()

    def validate(self):
        if not self.snr_grid_db:
            raise ConfigError("The training SNR grid is empty.")
        if self.examples_per_snr < 1:
            raise ConfigError("At least one example per SNR is required.")
        expected = self.examples_per_snr * len(self.snr_grid_db)
        if self.batch_size != expected:
            raise ConfigError(
                f"Batch size {self.batch_size} does not match {self.examples_per_snr} examples "
                f"at each of {len(self.snr_grid_db)} SNR values ({expected})."
            )
        if self.t_student < 1:
            raise ConfigError("The student needs at least one iteration.")
        if self.t_teacher < 1:
            raise ConfigError("The teacher needs at least one iteration.")
        if self.learning_rate < 0:
            raise ConfigError(f"Learning rate must be non-negative, got {self.learning_rate}.")
        if self.optimizer not in OptimizerKind.choices():
            raise ConfigError(f"Unknown optimizer '{self.optimizer}'.")
        if self.epochs < 0 or self.batches_per_epoch < 1:
            raise ConfigError("Epochs must be non-negative and epochs need at least one batch.")
        if self.validation_frames < 1:
            raise ConfigError("Validation needs at least one frame.")
        if self.early_stop_patience < 1:
            raise ConfigError("Early-stop patience must be at least one epoch.")
        self.loss_cfg.check_horizon(self.t_student, self.t_teacher)

    def to_dict(self):
        return {
            "snr_grid_db": list(self.snr_grid_db),
            "examples_per_snr": self.examples_per_snr,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "optimizer": self.optimizer,
            "epochs": self.epochs,
            "batches_per_epoch": self.batches_per_epoch,
            "t_teacher": self.t_teacher,
            "t_student": self.t_student,
            "seed": self.seed,
            "loss_cfg": self.loss_cfg.to_dict(),
            "validation_snr_db": self.validation_snr_db,
            "validation_frames": self.validation_frames,
            "early_stop_patience": self.early_stop_patience,
            "teacher_offset": self.teacher_offset,
            "llr_cap": self.llr_cap,
            "snr_convention": self.snr_convention,
        }

    @classmethod
    def from_dict(cls, values):
        values = dict(values)
        values["loss_cfg"] = LossConfig.from_dict(values["loss_cfg"])
        return cls(**values)

    def replace(self, **changes):
        values = self.to_dict()
        values["loss_cfg"] = self.loss_cfg
        values.update(changes)
        return TrainingConfig(**values)


class Batch:
    def __init__(self, llr, bits, snr_db):
        self.llr = llr
        self.bits = bits
        self.snr_db = snr_db

    def __len__(self):
        return self.llr.shape[0]


def make_batch(code, cfg, rng):
    """Draws ``examples_per_snr`` random codewords per grid SNR and returns their channel LLRs."""
    llrs, words, snrs = [], [], []
    for snr_db in cfg.snr_grid_db:
        channel_cfg = channel.ChannelConfig(
            snr_db, code.rate, seed=cfg.seed, convention=cfg.snr_convention
        )
        messages = rng.integers(0, 2, size=(cfg.examples_per_snr, code.k), dtype=np.uint8)
        codewords = encode(code.g, messages)
        received = channel.transmit(channel.modulate(codewords), channel_cfg, rng)
        llrs.append(channel.llr(received, channel_cfg))
        words.append(codewords)
        snrs.append(np.full(cfg.examples_per_snr, snr_db))
    return Batch(np.concatenate(llrs), np.concatenate(words), np.concatenate(snrs))


def batch_for_step(code, cfg, step):
    return make_batch(code, cfg, channel.stream(cfg.seed, StreamPurpose.TRAIN, step))


def _chunk_gradient(llr, bits, beta, graph, cfg):
    loss_cfg = cfg.loss_cfg
    teacher = None
    if loss_cfg.enable_kd:
        teacher = minsum_decode(
            llr,
            graph,
            cfg.t_teacher,
            offset=cfg.teacher_offset,
            record_trace=True,
            llr_cap=cfg.llr_cap,
        ).trace
    student = decode(llr, graph, beta, record_trace=True, llr_cap=cfg.llr_cap).trace
    breakdown = combined(student, teacher, bits, loss_cfg)
    buffer = backward(student, teacher, bits, loss_cfg, graph)
    size = len(llr)
    return (
        buffer.per_example_d_beta.sum(axis=0),
        np.array([breakdown.ce, breakdown.kd, breakdown.sparse]) * size,
        breakdown.per_example,
    )


def train_step(batch, beta, graph, cfg, optimizer, worker=None, step=0):
    """One gradient step on ``batch``.

    Returns:
        tuple (OffsetParameters, LossBreakdown): the updated offsets and the batch-mean loss
        before the update.

    Raises:
        NumericalInstabilityError: The loss or its gradient is not finite. ``beta`` is untouched.
    """
    beta = beta.beta if isinstance(beta, OffsetParameters) else np.asarray(beta)
    chunks = [
        (batch.llr[i : i + TRAIN_CHUNK_EXAMPLES], batch.bits[i : i + TRAIN_CHUNK_EXAMPLES])
        for i in range(0, len(batch), TRAIN_CHUNK_EXAMPLES)
    ]

    def run(chunk):
        return _chunk_gradient(chunk[0], chunk[1], beta, graph, cfg)

    results = worker.map(run, chunks) if worker else [run(c) for c in chunks]
    d_beta = np.zeros_like(beta)
    terms = np.zeros(3)
    for chunk_d_beta, chunk_terms, _ in results:
        d_beta += chunk_d_beta
        terms += chunk_terms
    d_beta /= len(batch)
    terms /= len(batch)
    per_example = np.concatenate([r[2] for r in results])
    loss_cfg = cfg.loss_cfg
    breakdown = LossBreakdown(*terms, loss_cfg.alpha, loss_cfg.gamma, per_example=per_example)

    if not np.all(np.isfinite(per_example)) or not np.all(np.isfinite(d_beta)):
        raise NumericalInstabilityError(f"Loss is not finite at step {step}.", step=step)
    updated = optimizer.step(beta, d_beta)
    if not np.all(np.isfinite(updated)):
        raise NumericalInstabilityError(f"Offsets are not finite after step {step}.", step=step)
    return OffsetParameters(updated), breakdown


class TrainingResult:
    """Outcome of :func:`train`. ``checkpoint`` holds the best offsets seen by validation."""

    def __init__(self, checkpoint, history, diverged=False, interrupted=False, stopped_early=False):
        self.checkpoint = checkpoint
        self.history = history
        self.diverged = diverged
        self.interrupted = interrupted
        self.stopped_early = stopped_early


def validation_ber(code, beta, cfg, worker=None):
    spec = DecoderSpec(DecoderKind.NEURAL, beta=beta, llr_cap=cfg.llr_cap)
    point = measure_ber(
        code,
        spec,
        cfg.validation_snr_db,
        cfg.validation_frames,
        seed=cfg.seed,
        worker=worker,
        convention=cfg.snr_convention,
    )
    return point.ber


def _emit(event_logger, **event):
    if event_logger:
        event_logger.info(event)


def _mean_breakdown(breakdowns, loss_cfg):
    if not breakdowns:
        return {}
    ce = float(np.mean([b.ce for b in breakdowns]))
    kd = float(np.mean([b.kd for b in breakdowns]))
    sparse = float(np.mean([b.sparse for b in breakdowns]))
    return LossBreakdown(ce, kd, sparse, loss_cfg.alpha, loss_cfg.gamma).to_dict()


def train(code, cfg, worker=None, event_logger=None, should_stop=None, progress=None):
    """Runs ``cfg.epochs`` epochs of ``cfg.batches_per_epoch`` steps from β = 0.

    The validation BER of β = 0 is measured first. After every epoch the validation BER is
    measured again; the best offsets are kept and training stops after
    ``early_stop_patience`` epochs without improvement. A non-finite loss ends training and
    returns the best offsets with ``diverged`` set.

    Args:
        code (Code): The code to train for.
        cfg (TrainingConfig): The run configuration.
        worker (Worker): Optional pool computing batch chunks and validation frames.
        event_logger (logging.Logger): Receives one dict per step and per epoch.
        should_stop (callable): Polled after every step; training ends when it returns True.
        progress (callable): Called with the step index after every step.

    Returns:
        TrainingResult
    """
    cfg.validate()
    graph = code.graph
    beta = OffsetParameters.zeros(cfg.t_student, graph.edge_count)
    optimizer = create_optimizer(cfg.optimizer, cfg.learning_rate)

    def snapshot(params, step, history):
        return Checkpoint.for_code(
            code,
            params.copy(),
            step=step,
            history=list(history),
            config=cfg.to_dict(),
            optimizer=optimizer.state(),
        )

    history = []
    if cfg.epochs == 0:
        return TrainingResult(snapshot(beta, 0, history), history)

    best_ber = validation_ber(code, beta, cfg, worker)
    history.append({"epoch": 0, "validation_ber": best_ber, "best": True, "degraded": False})
    _emit(event_logger, event="epoch", epoch=0, validation_ber=best_ber, best=True)
    best = snapshot(beta, 0, history)
    previous_ber = best_ber
    epochs_without_improvement = 0
    diverged = interrupted = stopped_early = False
    step = 0

    for epoch in range(1, cfg.epochs + 1):
        breakdowns = []
        for _ in range(cfg.batches_per_epoch):
            batch = batch_for_step(code, cfg, step)
            try:
                beta, breakdown = train_step(batch, beta, graph, cfg, optimizer, worker, step)
            except NumericalInstabilityError as err:
                logger.warning("Training diverged at step %d: %s", step, err)
                _emit(event_logger, event="diverged", step=step, epoch=epoch, reason=str(err))
                diverged = True
                break
            breakdowns.append(breakdown)
            _emit(event_logger, event="step", step=step, epoch=epoch, **breakdown.to_dict())
            step += 1
            if progress:
                progress(step)
            if should_stop and should_stop():
                interrupted = True
                break
        if diverged or interrupted:
            break

        ber = validation_ber(code, beta, cfg, worker)
        degraded = ber > previous_ber
        improved = ber < best_ber
        previous_ber = ber
        record = {
            "epoch": epoch,
            "step": step,
            "loss": _mean_breakdown(breakdowns, cfg.loss_cfg),
            "validation_ber": ber,
            "best": improved,
            "degraded": degraded,
        }
        history.append(record)
        _emit(event_logger, event="epoch", **record)
        logger.info("Epoch %d: validation BER %.4e%s", epoch, ber, " (best)" if improved else "")
        if improved:
            best_ber = ber
            best = snapshot(beta, step, history)
            epochs_without_improvement = 0
        else:
            epochs_without_improvement += 1
            if epochs_without_improvement >= cfg.early_stop_patience:
                logger.info("No improvement for %d epochs, stopping.", epochs_without_improvement)
                stopped_early = True
                break

    best.history = list(history)
    return TrainingResult(best, history, diverged, interrupted, stopped_early)


def p_study(code, cfg, p_values, worker=None, event_logger=None):
    """Trains once per norm order p and tabulates the resulting validation BER.

    Returns:
        pandas.DataFrame: columns ``p``, ``validation_ber``, ``epochs``, ``diverged``.
    """
    rows = []
    for p in p_values:
        loss_values = cfg.loss_cfg.to_dict()
        loss_values["p"] = p
        run_cfg = cfg.replace(loss_cfg=LossConfig.from_dict(loss_values))
        result = train(code, run_cfg, worker=worker, event_logger=event_logger)
        best_ber = min((h["validation_ber"] for h in result.history), default=float("nan"))
        rows.append(
            {
                "p": int(p),
                "validation_ber": best_ber,
                "epochs": max((h["epoch"] for h in result.history), default=0),
                "diverged": result.diverged,
            }
        )
    return DataFrame(rows, columns=["p", "validation_ber", "epochs", "diverged"])
