import click

from minsumkd.manifest import load_manifest
from minsumkd.options import debug_option


@click.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@debug_option(hidden=True)
@click.pass_context
def replay(ctx, manifest):
    """Re-run the subcommand recorded in a run manifest with the recorded parameters.

    The recorded input files must still hash to the recorded digests.
    """
    recorded = load_manifest(manifest)
    recorded.verify_inputs()
    root = ctx.find_root()
    command = root.command.get_command(root, recorded.subcommand)
    if command is None or command is ctx.command:
        raise click.BadParameter(
            f"'{recorded.subcommand}' is not a command that can be replayed.",
            param_hint="'MANIFEST'",
        )
    params = {p.name: p for p in command.params}
    unknown = sorted(set(recorded.params) - set(params))
    if unknown:
        raise click.BadParameter(
            f"'{recorded.subcommand}' has no parameter(s) {', '.join(unknown)}.",
            param_hint="'MANIFEST'",
        )
    # converting file parameters opens them; closing the context closes them
    with command.make_context(
        recorded.subcommand, [], parent=root, resilient_parsing=True
    ) as sub_ctx:
        kwargs = {
            name: params[name].type_cast_value(sub_ctx, value)
            for name, value in recorded.params.items()
        }
        click.echo(f"Replaying {recorded.subcommand} recorded {recorded.started_at}.", err=True)
        ctx.invoke(command, **kwargs)
