import json

import click
from pandas import DataFrame

from minsumkd import channel
from minsumkd.cmds.shared import echo_table
from minsumkd.cmds.shared import echo_written
from minsumkd.cmds.shared import load_code
from minsumkd.cmds.train import build_loss_config
from minsumkd.cmds.train import loss_options
from minsumkd.codebook import encode
from minsumkd.enums import StreamPurpose
from minsumkd.errors import NumericalFailureError
from minsumkd.grad import DEFAULT_TOLERANCE
from minsumkd.grad import finite_difference_check
from minsumkd.manifest import manifest_path
from minsumkd.manifest import RunRecorder
from minsumkd.options import config_option
from minsumkd.options import debug_option
from minsumkd.options import format_option
from minsumkd.options import gen_option
from minsumkd.options import llr_cap_option
from minsumkd.options import seed_option

DEFAULT_CODE = "hamming_7_4"
WORST_ENTRIES_SHOWN = 10


def _positive(ctx, param, value):
    if value is not None and not value > 0:
        raise click.BadParameter(f"must be positive, got {value}.")
    return value


def random_instance(code, frames, snr_db, t_student, beta_scale, seed):
    """A reproducible (LLRs, codewords, offsets) triple for the gradient check."""
    rng = channel.stream(seed, StreamPurpose.GRADCHECK)
    cfg = channel.ChannelConfig(snr_db, code.rate, seed=seed)
    messages = rng.integers(0, 2, size=(frames, code.k), dtype="uint8")
    codewords = encode(code.g, messages)
    llr = channel.llr(channel.transmit(channel.modulate(codewords), cfg, rng), cfg)
    beta = rng.uniform(0.0, beta_scale, size=(t_student, code.graph.edge_count))
    return llr, codewords, beta, rng


@click.command()
@config_option
@click.option(
    "--pcm",
    type=click.Path(exists=True, dir_okay=False),
    help=f"Parity-check matrix in alist format. Defaults to the bundled {DEFAULT_CODE}.",
)
@gen_option
@seed_option
@llr_cap_option
@click.option("--t-teacher", type=click.IntRange(min=1), default=7, show_default=True)
@click.option("--t-student", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--t-o", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--gamma", type=float, default=0.01, show_default=True)
@click.option("--p", type=int, default=12, show_default=True)
@loss_options
@click.option(
    "--epsilon",
    type=float,
    default=1e-4,
    show_default=True,
    callback=_positive,
    help="Finite-difference step.",
)
@click.option(
    "--samples",
    type=click.IntRange(min=1),
    default=200,
    show_default=True,
    help="Offsets to check, drawn without replacement.",
)
@click.option("--tolerance", type=float, default=DEFAULT_TOLERANCE, show_default=True)
@click.option("--frames", type=click.IntRange(min=1), default=4, show_default=True)
@click.option("--snr", type=float, default=2.0, show_default=True, help="SNR of the instance.")
@click.option(
    "--beta-scale",
    type=click.FloatRange(min=0),
    default=0.5,
    show_default=True,
    help="Offsets are drawn uniformly from [0, beta-scale).",
)
@click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False, writable=True),
    help="Write every checked entry to this JSON file.",
)
@format_option
@debug_option(hidden=True)
@click.pass_context
def gradcheck(
    ctx,
    pcm,
    gen,
    seed,
    llr_cap,
    t_teacher,
    t_student,
    t_o,
    alpha,
    gamma,
    p,
    loss_terms,
    sparse_variant,
    kd_normalize,
    epsilon,
    samples,
    tolerance,
    frames,
    snr,
    beta_scale,
    output,
    format,
    config,
):
    """Compare the analytic gradient of the training loss with finite differences.

    Exits with code 3 when the largest relative error reaches the tolerance.
    """
    recorder = RunRecorder(ctx, inputs=[pcm, gen])
    code = load_code(pcm, gen, default=DEFAULT_CODE)
    loss_cfg = build_loss_config(
        alpha, gamma, p, t_o, loss_terms, sparse_variant.lower(), kd_normalize
    )
    llr, codewords, beta, rng = random_instance(code, frames, snr, t_student, beta_scale, seed)
    report = finite_difference_check(
        llr,
        codewords,
        code.graph,
        beta,
        loss_cfg,
        t_teacher,
        epsilon=epsilon,
        sample_count=samples,
        rng=rng,
        llr_cap=llr_cap,
        tolerance=tolerance,
    )
    summary = report.summary()
    if output:
        with open(output, "w", encoding="utf-8") as file:
            json.dump({"summary": summary, "entries": report.entries}, file, indent=2)
        recorder.write(manifest_path(output))
        echo_written([output])

    worst = sorted(report.checked, key=lambda e: e["relative_error"], reverse=True)
    echo_table(DataFrame([summary]), format)
    if worst:
        echo_table(DataFrame(worst[:WORST_ENTRIES_SHOWN]), format)
    if not report.checked:
        click.echo("Every sampled entry sits on a kink; nothing was compared.", err=True)
    if not report.passed:
        raise NumericalFailureError(
            f"Gradient check failed: max relative error {report.max_relative_error:.3e} "
            f"≥ tolerance {tolerance:.1e}."
        )
