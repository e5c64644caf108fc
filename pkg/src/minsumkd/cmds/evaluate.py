import click

from minsumkd.checkpoint import load_checkpoint
from minsumkd.click_ext.options import incompatible_with
from minsumkd.click_ext.types import SnrList
from minsumkd.cmds.shared import echo_table
from minsumkd.cmds.shared import echo_written
from minsumkd.cmds.shared import load_code
from minsumkd.enums import DecoderKind
from minsumkd.evaluation import DEFAULT_CHUNK_FRAMES
from minsumkd.evaluation import DEFAULT_MAX_FRAMES
from minsumkd.evaluation import DEFAULT_MIN_FRAME_ERRORS
from minsumkd.evaluation import DecoderSpec
from minsumkd.evaluation import StopRule
from minsumkd.evaluation import sweep
from minsumkd.manifest import manifest_path
from minsumkd.manifest import RunRecorder
from minsumkd.options import code_options
from minsumkd.options import config_option
from minsumkd.options import debug_option
from minsumkd.options import format_option
from minsumkd.options import run_options
from minsumkd.worker import Worker


def build_decoder_spec(code, decoder, iters, offset, checkpoint, early_exit, llr_cap):
    """Checks the decoder flags against each other and returns the `DecoderSpec` they describe."""
    if decoder == DecoderKind.NEURAL:
        if not checkpoint:
            raise click.BadOptionUsage("checkpoint", "--decoder neural requires --checkpoint.")
        ckpt = load_checkpoint(checkpoint, code=code)
        return DecoderSpec(
            decoder,
            beta=ckpt.beta,
            checkpoint_id=ckpt.checkpoint_id,
            early_exit=early_exit,
            llr_cap=llr_cap,
        )
    if checkpoint:
        raise click.BadOptionUsage(
            "checkpoint", f"--checkpoint can't be used with --decoder {decoder}."
        )
    if decoder in (DecoderKind.MINSUM, DecoderKind.OFFSET) and iters is None:
        raise click.BadOptionUsage("iters", f"--decoder {decoder} requires --iters.")
    if decoder == DecoderKind.OFFSET and offset is None:
        raise click.BadOptionUsage("offset", "--decoder offset requires --offset.")
    return DecoderSpec(
        decoder, iterations=iters, offset=offset, early_exit=early_exit, llr_cap=llr_cap
    )


@click.command("eval")
@config_option
@code_options
@run_options
@click.option(
    "--decoder",
    type=click.Choice(DecoderKind(), case_sensitive=False),
    default=DecoderKind.MINSUM,
    show_default=True,
    help="Decoder to simulate. `uncoded` slices the channel LLRs, `ml` enumerates the codebook.",
)
@click.option("--iters", type=click.IntRange(min=1), help="Iterations of the min-sum decoders.")
@click.option(
    "--offset",
    type=click.FloatRange(min=0),
    cls=incompatible_with("checkpoint"),
    help="Fixed offset of the min-sum decoders.",
)
@click.option(
    "--checkpoint",
    type=click.Path(exists=True, dir_okay=False),
    cls=incompatible_with("offset"),
    help="Trained offsets for --decoder neural.",
)
@click.option("--snr", "snr_list", type=SnrList(), required=True, help="SNR values in dB.")
@click.option(
    "--min-frame-errors",
    type=click.IntRange(min=1),
    default=DEFAULT_MIN_FRAME_ERRORS,
    show_default=True,
    help="Stop a point once this many frames are in error.",
)
@click.option(
    "--max-frames",
    type=click.IntRange(min=1),
    default=DEFAULT_MAX_FRAMES,
    show_default=True,
    help="Stop a point after this many frames.",
)
@click.option(
    "--chunk-frames",
    type=click.IntRange(min=1),
    default=DEFAULT_CHUNK_FRAMES,
    show_default=True,
    help="Frames per work unit. Results depend on it, unlike on --workers.",
)
@click.option(
    "--all-zero",
    is_flag=True,
    default=False,
    help="Transmit the all-zero codeword instead of random codewords.",
)
@click.option(
    "--early-exit/--no-early-exit",
    default=True,
    show_default=True,
    help="Stop decoding a frame once its syndrome is zero.",
)
@click.option("--no-plot", is_flag=True, default=False, help="Skip the SVG plot.")
@click.option(
    "-o",
    "--output",
    required=True,
    help="Prefix of the report files: <prefix>.csv, <prefix>.json and <prefix>.svg.",
)
@format_option
@debug_option(hidden=True)
@click.pass_context
def evaluate(
    ctx,
    pcm,
    gen,
    seed,
    workers,
    snr_convention,
    llr_cap,
    decoder,
    iters,
    offset,
    checkpoint,
    snr_list,
    min_frame_errors,
    max_frames,
    chunk_frames,
    all_zero,
    early_exit,
    no_plot,
    output,
    format,
    config,
):
    """Simulate the BER and FER of a decoder over a range of SNR values."""
    recorder = RunRecorder(ctx, inputs=[pcm, gen, checkpoint])
    code = load_code(pcm, gen)
    spec = build_decoder_spec(code, decoder.lower(), iters, offset, checkpoint, early_exit, llr_cap)
    stop = StopRule(min_frame_errors=min_frame_errors, max_frames=max_frames)
    stderr = click.get_text_stream("stderr")
    with Worker(workers) as worker:
        with click.progressbar(length=len(set(snr_list)), label="Simulating", file=stderr) as bar:
            report = sweep(
                code,
                spec,
                snr_list,
                stop=stop,
                seed=seed,
                worker=worker,
                chunk_frames=chunk_frames,
                convention=snr_convention.lower(),
                all_zero=all_zero,
                progress=lambda _: bar.update(1),
            )
    paths = report.write(output, plot=not no_plot)
    recorder.write(manifest_path(output))
    echo_written(paths)
    echo_table(report.to_dataframe(), format)
