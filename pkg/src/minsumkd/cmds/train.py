import click

from minsumkd.checkpoint import save_checkpoint
from minsumkd.click_ext.types import EvenIntList
from minsumkd.click_ext.types import LossTerms
from minsumkd.click_ext.types import SnrList
from minsumkd.cmds.shared import echo_table
from minsumkd.cmds.shared import echo_written
from minsumkd.cmds.shared import load_code
from minsumkd.enums import LossTerm
from minsumkd.enums import OptimizerKind
from minsumkd.enums import SparseVariant
from minsumkd.errors import NumericalFailureError
from minsumkd.logger import close_training_logger
from minsumkd.logger import get_training_logger
from minsumkd.loss import LossConfig
from minsumkd.manifest import manifest_path
from minsumkd.manifest import RunRecorder
from minsumkd.options import code_options
from minsumkd.options import config_option
from minsumkd.options import debug_option
from minsumkd.options import format_option
from minsumkd.options import run_options
from minsumkd.trainer import p_study
from minsumkd.trainer import train as run_training
from minsumkd.trainer import TrainingConfig
from minsumkd.util import warn_interrupt
from minsumkd.worker import Worker


def loss_options(f):
    """Flags of the combined loss, shared with `gradcheck`."""
    f = click.option(
        "--kd-normalize",
        is_flag=True,
        default=False,
        help="Divide the distillation term by the number of edges.",
    )(f)
    f = click.option(
        "--sparse-variant",
        type=click.Choice(SparseVariant(), case_sensitive=False),
        default=SparseVariant.LITERAL,
        show_default=True,
        help="Penalize sigmoid(m)^p (literal) or (2·sigmoid(m) − 1)^p (symmetric).",
    )(f)
    f = click.option(
        "--loss",
        "loss_terms",
        type=LossTerms(),
        default="all",
        show_default=True,
        help=f"Loss terms to train with: all, or a comma list of {', '.join(LossTerm.choices())}.",
    )(f)
    return f


def build_loss_config(alpha, gamma, p, t_o, loss_terms, sparse_variant, kd_normalize):
    return LossConfig(
        alpha=alpha,
        gamma=gamma,
        p=p,
        t_o=t_o,
        terms=loss_terms,
        sparse_variant=sparse_variant,
        kd_normalize=kd_normalize,
    )


@click.command()
@config_option
@code_options
@run_options
@click.option(
    "--snr",
    "snr_grid",
    type=SnrList(),
    default="1:8:1",
    show_default=True,
    help="Training SNR grid in dB.",
)
@click.option("--examples-per-snr", type=click.IntRange(min=1), default=45, show_default=True)
@click.option(
    "--batch-size",
    type=click.IntRange(min=1),
    help="Must equal examples-per-snr times the grid size; derived when omitted.",
)
@click.option(
    "--learning-rate", "--lr", type=click.FloatRange(min=0), default=0.01, show_default=True
)
@click.option(
    "--optimizer",
    type=click.Choice(OptimizerKind(), case_sensitive=False),
    default=OptimizerKind.SGD,
    show_default=True,
)
@click.option("--epochs", type=click.IntRange(min=0), default=5, show_default=True)
@click.option("--batches-per-epoch", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--t-teacher", type=click.IntRange(min=1), default=30, show_default=True)
@click.option("--t-student", type=click.IntRange(min=1), default=5, show_default=True)
@click.option(
    "--t-o", type=click.IntRange(min=0), default=25, show_default=True, help="Look-ahead."
)
@click.option("--alpha", type=float, default=1.0, show_default=True, help="Distillation weight.")
@click.option("--gamma", type=float, default=0.01, show_default=True, help="Sparse loss weight.")
@click.option("--p", type=int, default=12, show_default=True, help="Even norm order.")
@loss_options
@click.option("--validation-snr", type=float, default=6.0, show_default=True)
@click.option("--validation-frames", type=click.IntRange(min=1), default=100_000, show_default=True)
@click.option("--patience", type=click.IntRange(min=1), default=3, show_default=True)
@click.option(
    "--teacher-offset",
    "--teacher-beta",
    type=click.FloatRange(min=0),
    default=0.0,
    show_default=True,
    help="Fixed offset of the teacher decoder.",
)
@click.option(
    "--p-sweep",
    type=EvenIntList(),
    help="Train once per listed norm order and write the validation BER table instead of a "
    "checkpoint.",
)
@click.option(
    "-o",
    "--output",
    required=True,
    type=click.Path(dir_okay=False, writable=True),
    help="Checkpoint file to write (the CSV table with --p-sweep).",
)
@click.option(
    "--log-file",
    type=click.Path(dir_okay=False, writable=True),
    help="Write one JSON line per training step and epoch to this file.",
)
@format_option
@debug_option(hidden=True)
@click.pass_context
def train(
    ctx,
    pcm,
    gen,
    seed,
    workers,
    snr_convention,
    llr_cap,
    snr_grid,
    examples_per_snr,
    batch_size,
    learning_rate,
    optimizer,
    epochs,
    batches_per_epoch,
    t_teacher,
    t_student,
    t_o,
    alpha,
    gamma,
    p,
    loss_terms,
    sparse_variant,
    kd_normalize,
    validation_snr,
    validation_frames,
    patience,
    teacher_offset,
    p_sweep,
    output,
    log_file,
    format,
    config,
):
    """Train the per-edge offsets of a student min-sum decoder."""
    recorder = RunRecorder(ctx, inputs=[pcm, gen])
    code = load_code(pcm, gen)
    cfg = TrainingConfig(
        snr_grid_db=snr_grid,
        examples_per_snr=examples_per_snr,
        batch_size=batch_size,
        learning_rate=learning_rate,
        optimizer=optimizer.lower(),
        epochs=epochs,
        batches_per_epoch=batches_per_epoch,
        t_teacher=t_teacher,
        t_student=t_student,
        seed=seed,
        loss_cfg=build_loss_config(
            alpha, gamma, p, t_o, loss_terms, sparse_variant.lower(), kd_normalize
        ),
        validation_snr_db=validation_snr,
        validation_frames=validation_frames,
        early_stop_patience=patience,
        teacher_offset=teacher_offset,
        llr_cap=llr_cap,
        snr_convention=snr_convention.lower(),
    )
    event_logger = get_training_logger(log_file) if log_file else None
    try:
        with Worker(workers) as worker:
            if p_sweep:
                _run_p_sweep(code, cfg, p_sweep, worker, event_logger, output, format)
            else:
                _run_training(code, cfg, worker, event_logger, output)
    finally:
        if event_logger:
            close_training_logger(event_logger)
        recorder.write(manifest_path(output))


def _run_p_sweep(code, cfg, p_values, worker, event_logger, output, format):
    table = p_study(code, cfg, p_values, worker=worker, event_logger=event_logger)
    table.to_csv(output, index=False, float_format="%.10g")
    echo_written([output])
    echo_table(table, format)


def _run_training(code, cfg, worker, event_logger, output):
    steps = cfg.epochs * cfg.batches_per_epoch
    with warn_interrupt() as interrupt:
        stderr = click.get_text_stream("stderr")
        with click.progressbar(length=steps, label="Training", file=stderr) as bar:
            result = run_training(
                code,
                cfg,
                worker=worker,
                event_logger=event_logger,
                should_stop=lambda: interrupt.interrupted,
                progress=lambda _: bar.update(1),
            )
        save_checkpoint(output, result.checkpoint)
    echo_written([output])
    checkpoint = result.checkpoint
    click.echo(
        f"Checkpoint {checkpoint.checkpoint_id}: {checkpoint.parameter_count} offsets "
        f"after {checkpoint.step} steps."
    )
    if result.stopped_early:
        click.echo("Stopped early: validation BER stopped improving.", err=True)
    if result.diverged:
        raise NumericalFailureError(
            "Training diverged (non-finite loss). The best checkpoint before the divergence "
            f"was written to {output}."
        )
