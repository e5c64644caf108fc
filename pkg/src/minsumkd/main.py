import signal
import sys
import warnings
from importlib.metadata import entry_points

import click
from click_plugins import with_plugins

from minsumkd import BANNER
from minsumkd.click_ext.groups import ExceptionHandlingGroup
from minsumkd.cmds.compare import sweep_compare
from minsumkd.cmds.decode import decode
from minsumkd.cmds.evaluate import evaluate
from minsumkd.cmds.gradcheck import gradcheck
from minsumkd.cmds.replay import replay
from minsumkd.cmds.train import train
from minsumkd.logger import configure_console_logger
from minsumkd.options import debug_option
from minsumkd.options import pass_state

PLUGIN_GROUP = "minsumkd.plugins"

warnings.simplefilter("ignore", DeprecationWarning)


# Handle KeyboardInterrupts by just exiting instead of printing out a stack
def exit_on_interrupt(signal, frame):
    click.echo(err=True)
    sys.exit(1)


signal.signal(signal.SIGINT, exit_on_interrupt)

CONTEXT_SETTINGS = {
    "help_option_names": ["-h", "--help"],
    "max_content_width": 200,
}


def _plugin_entry_points():
    found = entry_points()
    if hasattr(found, "select"):
        return found.select(group=PLUGIN_GROUP)
    return found.get(PLUGIN_GROUP, [])


@with_plugins(_plugin_entry_points())
@click.group(
    cls=ExceptionHandlingGroup,
    context_settings=CONTEXT_SETTINGS,
    help=BANNER,
    invoke_without_command=True,
    no_args_is_help=True,
)
@debug_option()
@pass_state
def cli(state):
    if not state.debug:
        configure_console_logger(False)


cli.add_command(train)
cli.add_command(evaluate)
cli.add_command(decode)
cli.add_command(gradcheck)
cli.add_command(sweep_compare)
cli.add_command(replay)
