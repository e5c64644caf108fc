import click

from minsumkd.click_ext.types import AutoDecodedFile
from minsumkd.config import RunConfigAccessor
from minsumkd.config import normalize_key
from minsumkd.decoder import DEFAULT_LLR_CAP
from minsumkd.enums import OutputFormat
from minsumkd.enums import SnrConvention
from minsumkd.exceptions import ConfigError
from minsumkd.logger import configure_console_logger
from minsumkd.util import default_worker_count

SEED_ENVVAR = "MINSUMKD_SEED"
WORKERS_ENVVAR = "MINSUMKD_WORKERS"


class CLIState:
    def __init__(self):
        self.debug = False

    def set_debug(self, value):
        self.debug = value
        configure_console_logger(value)


pass_state = click.make_pass_decorator(CLIState, ensure=True)


def set_debug(ctx, param, value):
    """Turns on DEBUG console logging when --debug/-d is passed."""
    if value:
        ctx.ensure_object(CLIState).set_debug(value)


def debug_option(hidden=False):
    return click.option(
        "-d",
        "--debug",
        is_flag=True,
        expose_value=False,
        callback=set_debug,
        hidden=hidden,
        help="Turn on debug logging.",
    )


format_option = click.option(
    "-f",
    "--format",
    type=click.Choice(OutputFormat(), case_sensitive=False),
    help="The output format of the result. Defaults to table format.",
    default=OutputFormat.TABLE,
)


def config_keys(command, exclude=None):
    """Maps every long flag spelling of `command`, and every parameter name, to the parameter
    it sets. Negative boolean flags (`--no-...`) are not keys."""
    keys = {}
    for param in command.params:
        if param.name == exclude or param.name is None:
            continue
        keys[normalize_key(param.name)] = param.name
        for opt in param.opts:
            if opt.startswith("--"):
                keys[normalize_key(opt)] = param.name
    return keys


def load_config_defaults(ctx, param, value):
    """Installs the `[<subcommand>]` section of the given INI file as click's default map."""
    if not value:
        return value
    try:
        defaults = RunConfigAccessor(value).defaults_for(
            ctx.info_name, keys=config_keys(ctx.command, exclude=param.name)
        )
    except ConfigError as err:
        raise click.BadParameter(str(err), ctx=ctx, param=param)
    ctx.default_map = {**(ctx.default_map or {}), **defaults}
    return value


config_option = click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    is_eager=True,
    callback=load_config_defaults,
    help="INI file whose section named after this command supplies default flag values.",
)

pcm_option = click.option(
    "--pcm",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Parity-check matrix of the code in alist format.",
)

gen_option = click.option(
    "--gen",
    type=click.Path(exists=True, dir_okay=False),
    help="Generator matrix in alist format. Derived from the parity-check matrix when omitted.",
)

seed_option = click.option(
    "--seed",
    type=int,
    default=0,
    show_default=True,
    envvar=SEED_ENVVAR,
    help=f"Seed of every random stream. Can also be set with {SEED_ENVVAR}.",
)

workers_option = click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=default_worker_count,
    envvar=WORKERS_ENVVAR,
    help=f"Worker threads. Defaults to the number of cores. Results do not depend on it. "
    f"Can also be set with {WORKERS_ENVVAR}.",
)

snr_convention_option = click.option(
    "--snr-convention",
    type=click.Choice(SnrConvention(), case_sensitive=False),
    default=SnrConvention.EBNO,
    show_default=True,
    help="Read SNR values as Eb/N0 (rate normalized) or Es/N0.",
)

llr_cap_option = click.option(
    "--llr-cap",
    type=click.FloatRange(min=0, min_open=True),
    default=DEFAULT_LLR_CAP,
    show_default=True,
    help="Magnitude at which decoder messages are clipped.",
)


def code_options(f):
    f = gen_option(f)
    f = pcm_option(f)
    return f


def run_options(f):
    """Options shared by the subcommands that simulate: seed, workers, SNR convention and the
    message clipping level."""
    f = llr_cap_option(f)
    f = snr_convention_option(f)
    f = workers_option(f)
    f = seed_option(f)
    return f


def input_file_option(name, dest, help):
    return click.option(name, dest, type=AutoDecodedFile("r"), default="-", help=help)
