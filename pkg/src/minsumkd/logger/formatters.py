import json
import math
from logging import Formatter

import numpy as np


def _to_builtin(value):
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


class TrainingEventJSONFormatter(Formatter):
    """Formats training event dicts into JSON lines. Attach to a logger via `setFormatter` to use.
    Items in the dictionary whose values are `None`, empty string, or empty lists will be excluded
    from the JSON conversion. Non-finite floats are written as strings.
    """

    def format(self, record):
        """
        Args:
            record (LogRecord): `record.msg` must be a `dict`.
        """
        event = record.msg
        event = {
            key: _to_builtin(event[key])
            for key in event
            if event[key] or event[key] == 0
        }
        return json.dumps(event)
