import click

from minsumkd.cmds.shared import echo_table
from minsumkd.cmds.shared import echo_written
from minsumkd.evaluation import compare
from minsumkd.evaluation import load_report
from minsumkd.manifest import manifest_path
from minsumkd.manifest import RunRecorder
from minsumkd.options import debug_option
from minsumkd.options import format_option


@click.command("sweep-compare")
@click.argument(
    "reports", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False)
)
@click.option(
    "--reference",
    type=click.IntRange(min=0),
    default=0,
    show_default=True,
    help="Position of the reference report among REPORTS.",
)
@click.option(
    "-o",
    "--output",
    help="Prefix of the files to write: <prefix>_ratios.csv, <prefix>_gains.csv and "
    "<prefix>.svg.",
)
@format_option
@debug_option(hidden=True)
@click.pass_context
def sweep_compare(ctx, reports, reference, output, format):
    """Compare BER reports written by `eval` (their .json files).

    Prints the BER ratio of every report to the reference at each SNR and the SNR gain in dB at
    matched BER levels. A positive gain means the report needs less SNR than the reference.
    """
    if reference >= len(reports):
        raise click.BadParameter(
            f"there are only {len(reports)} reports.", param_hint="'--reference'"
        )
    recorder = RunRecorder(ctx, inputs=list(reports))
    loaded = [load_report(path) for path in reports]
    comparison = compare(loaded, reference=reference)
    if output:
        # imported here so matplotlib loads only when a plot is drawn
        from minsumkd.plot import plot_ber

        paths = [f"{output}_ratios.csv", f"{output}_gains.csv"]
        comparison.table.to_csv(paths[0], index=False, float_format="%.10g")
        comparison.gains.to_csv(paths[1], index=False, float_format="%.10g")
        paths.append(plot_ber(loaded, f"{output}.svg"))
        recorder.write(manifest_path(output))
        echo_written(paths)
    echo_table(comparison.table, format)
    if comparison.gains.empty:
        click.echo("The curves share no BER level; no gain can be estimated.", err=True)
    else:
        echo_table(comparison.gains, format)
