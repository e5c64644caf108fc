import click
import numpy as np
from pandas import concat
from pandas import DataFrame

from minsumkd.checkpoint import load_checkpoint
from minsumkd.click_ext.options import incompatible_with
from minsumkd.cmds.shared import echo_table
from minsumkd.cmds.shared import echo_written
from minsumkd.cmds.shared import load_code
from minsumkd.decoder import decode as run_decoder
from minsumkd.decoder import minsum_decode
from minsumkd.errors import MinSumCLIError
from minsumkd.file_readers import read_llr_frames
from minsumkd.logger import get_main_cli_logger
from minsumkd.manifest import RunRecorder
from minsumkd.options import code_options
from minsumkd.options import config_option
from minsumkd.options import debug_option
from minsumkd.options import format_option
from minsumkd.options import input_file_option
from minsumkd.options import llr_cap_option

TRACE_COLUMNS = [
    "frame",
    "iteration",
    "kind",
    "index",
    "check",
    "variable",
    "value",
    "argmin_edge",
    "offset_active",
]


def _edge_rows(kind, values, graph, argmin=None, active=None):
    frames, iterations, edges = values.shape
    frame, iteration, edge = np.meshgrid(
        np.arange(frames), np.arange(1, iterations + 1), np.arange(edges), indexing="ij"
    )
    edge = edge.ravel()
    return DataFrame(
        {
            "frame": frame.ravel(),
            "iteration": iteration.ravel(),
            "kind": kind,
            "index": edge,
            "check": graph.edge_check[edge],
            "variable": graph.edge_var[edge],
            "value": values.ravel(),
            "argmin_edge": argmin.ravel() if argmin is not None else None,
            "offset_active": active.ravel() if active is not None else None,
        },
        columns=TRACE_COLUMNS,
    )


def _soft_rows(values):
    frames, iterations, n = values.shape
    frame, iteration, var = np.meshgrid(
        np.arange(frames), np.arange(1, iterations + 1), np.arange(n), indexing="ij"
    )
    return DataFrame(
        {
            "frame": frame.ravel(),
            "iteration": iteration.ravel(),
            "kind": "soft_output",
            "index": var.ravel(),
            "check": None,
            "variable": var.ravel(),
            "value": values.ravel(),
            "argmin_edge": None,
            "offset_active": None,
        },
        columns=TRACE_COLUMNS,
    )


def trace_to_dataframe(trace, graph):
    """Long-format table of every message of a `MessageTrace`, one row per edge (or variable for
    soft outputs) per iteration per frame."""
    table = concat(
        [
            _edge_rows("var_to_check", trace.var_to_check, graph),
            _edge_rows(
                "check_to_var",
                trace.check_to_var,
                graph,
                argmin=trace.argmin_index,
                active=trace.offset_active,
            ),
            _soft_rows(trace.soft_output),
        ],
        ignore_index=True,
    )
    return table.sort_values(["frame", "iteration"], kind="stable", ignore_index=True)


@click.command()
@config_option
@code_options
@llr_cap_option
@click.option(
    "--checkpoint",
    type=click.Path(exists=True, dir_okay=False),
    cls=incompatible_with(["iters", "offset"]),
    help="Decode with trained offsets instead of a fixed offset.",
)
@click.option(
    "--iters",
    type=click.IntRange(min=1),
    default=5,
    show_default=True,
    help="Min-sum iterations when no checkpoint is given.",
)
@click.option(
    "--offset",
    type=click.FloatRange(min=0),
    default=0.0,
    show_default=True,
    help="Fixed offset when no checkpoint is given.",
)
@input_file_option(
    "--input",
    "llr_file",
    help="File with one frame of whitespace-separated LLRs per line. Defaults to stdin.",
)
@click.option(
    "--early-exit/--no-early-exit",
    default=False,
    show_default=True,
    help="Stop decoding a frame once its syndrome is zero.",
)
@click.option(
    "--trace",
    "trace_path",
    type=click.Path(dir_okay=False, writable=True),
    help="Write every decoder message to this CSV file.",
)
@click.option(
    "--manifest",
    "manifest_file",
    type=click.Path(dir_okay=False, writable=True),
    help="Record the run in this manifest file.",
)
@format_option
@debug_option(hidden=True)
@click.pass_context
def decode(
    ctx,
    pcm,
    gen,
    llr_cap,
    checkpoint,
    iters,
    offset,
    llr_file,
    early_exit,
    trace_path,
    manifest_file,
    format,
    config,
):
    """Decode LLR frames and print the hard decisions with their syndrome check.

    A positive LLR favors bit 0.
    """
    recorder = RunRecorder(ctx, inputs=[pcm, gen, checkpoint, getattr(llr_file, "name", None)])
    code = load_code(pcm, gen)
    graph = code.graph
    logger = get_main_cli_logger()

    frames, line_numbers, malformed = [], [], 0
    for line in read_llr_frames(llr_file, code.n):
        if line.ok:
            frames.append(line.llr)
            line_numbers.append(line.line_number)
        else:
            malformed += 1
            message = f"Line {line.line_number}: {line.error}"
            logger.log_error(message)
            click.secho(message, err=True, fg="red")

    if frames:
        llr = np.vstack(frames)
        record_trace = trace_path is not None
        if checkpoint:
            beta = load_checkpoint(checkpoint, code=code).beta
            result = run_decoder(
                llr,
                graph,
                beta,
                record_trace=record_trace,
                early_exit=early_exit,
                llr_cap=llr_cap,
            )
        else:
            result = minsum_decode(
                llr,
                graph,
                iters,
                offset=offset,
                record_trace=record_trace,
                early_exit=early_exit,
                llr_cap=llr_cap,
            )
        table = DataFrame(
            {
                "line": line_numbers,
                "bits": ["".join(str(b) for b in row) for row in result.bits],
                "valid": result.valid_codeword,
                "iterations": result.iterations_run,
            }
        )
        echo_table(table, format)
        if record_trace:
            trace_to_dataframe(result.trace, graph).to_csv(
                trace_path, index=False, float_format="%.10g"
            )
            echo_written([trace_path])
    if manifest_file:
        recorder.write(manifest_file)
    if malformed:
        raise MinSumCLIError(f"{malformed} malformed line(s) were skipped.")
    if not frames:
        raise MinSumCLIError("No LLR frames to decode.")
