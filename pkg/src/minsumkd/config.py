"""Run configurations read from INI files.

Each subcommand reads the section named after it::

    [train]
    epochs = 10
    snr = 1:8:1
    loss = ce,kd

Keys are long flag spellings without the leading dashes, with dashes or underscores. The values
become click defaults, so flags given on the command line still win.
"""
import os
from configparser import ConfigParser
from configparser import Error as ConfigParserError

from minsumkd.exceptions import ConfigError


class RunConfigAccessor:
    def __init__(self, path, parser=None):
        self.path = path
        self.parser = parser or ConfigParser(interpolation=None)
        if not os.path.exists(path):
            raise ConfigError(f"Config file '{path}' does not exist.")
        try:
            self.parser.read(path, encoding="utf-8")
        except ConfigParserError as err:
            raise ConfigError(f"Config file '{path}' is malformed: {err}")

    @property
    def sections(self):
        return self.parser.sections()

    def defaults_for(self, command_name, keys=None):
        """Returns the `{param_name: raw_value}` mapping for `command_name`.

        Args:
            command_name (str): The section to read.
            keys (dict): Maps the normalized keys the command accepts to their parameter names.
                Other keys raise.
        """
        if not self.parser.has_section(command_name):
            return {}
        values = {
            normalize_key(key): value for key, value in self.parser.items(command_name)
        }
        if keys is None:
            return values
        unknown = sorted(set(values) - set(keys))
        if unknown:
            raise ConfigError(
                f"Unknown key(s) in section [{command_name}] of '{self.path}': "
                f"{', '.join(unknown)}."
            )
        return {keys[key]: value for key, value in values.items()}


def normalize_key(key):
    return key.lstrip("-").replace("-", "_").lower()
