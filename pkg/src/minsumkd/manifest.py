"""Run manifests: what a subcommand was run with, so the run can be repeated.

A manifest records the subcommand, every resolved parameter (defaults included), the SHA-256 of
each input file, the seed, the tool version and the wall-clock timing. It is written next to the
primary output as ``<output>.manifest.json``.
"""
import io
import json
import os
import time
from datetime import datetime
from datetime import timezone

from minsumkd.__version__ import __version__
from minsumkd.exceptions import InputChangedError
from minsumkd.util import hash_file

MANIFEST_SUFFIX = ".manifest.json"
STDIN = "-"
# never replayed: already folded into the recorded values
_SKIPPED_PARAMS = ("config",)


def manifest_path(output):
    return f"{output}{MANIFEST_SUFFIX}"


def _jsonable(value):
    if isinstance(value, io.IOBase) or hasattr(value, "read"):
        name = getattr(value, "name", STDIN)
        return STDIN if name in ("<stdin>", "<stdout>") else name
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


class RunManifest:
    def __init__(
        self,
        subcommand,
        params,
        input_hashes,
        seed=None,
        tool_version=__version__,
        started_at=None,
        finished_at=None,
        elapsed_seconds=None,
    ):
        self.subcommand = subcommand
        self.params = params
        self.input_hashes = input_hashes
        self.seed = seed
        self.tool_version = tool_version
        self.started_at = started_at
        self.finished_at = finished_at
        self.elapsed_seconds = elapsed_seconds

    def to_dict(self):
        return {
            "subcommand": self.subcommand,
            "params": self.params,
            "input_hashes": self.input_hashes,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "elapsed_seconds": self.elapsed_seconds,
        }

    @classmethod
    def from_dict(cls, values):
        return cls(**values)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as file:
            json.dump(self.to_dict(), file, indent=2, sort_keys=True)
            file.write("\n")
        return path

    def verify_inputs(self):
        """Raises `InputChangedError` when a recorded input is missing or its content changed."""
        for path, digest in sorted(self.input_hashes.items()):
            if not os.path.isfile(path):
                raise InputChangedError(path, "no longer exists")
            if hash_file(path) != digest:
                raise InputChangedError(path, "changed since the run was recorded")


def load_manifest(path):
    with open(path, encoding="utf-8") as file:
        return RunManifest.from_dict(json.load(file))


class RunRecorder:
    """Collects the manifest of the running subcommand.

    Usage:

        recorder = RunRecorder(ctx, inputs=[pcm])
        ...
        recorder.write(manifest_path(output))
    """

    def __init__(self, ctx, inputs=()):
        self.subcommand = ctx.info_name
        self.params = {
            name: _jsonable(value)
            for name, value in ctx.params.items()
            if name not in _SKIPPED_PARAMS
        }
        self.inputs = [p for p in inputs if p and p != STDIN]
        self.seed = ctx.params.get("seed")
        self._started_at = datetime.now(timezone.utc)
        self._started = time.perf_counter()

    def manifest(self):
        return RunManifest(
            self.subcommand,
            self.params,
            {path: hash_file(path) for path in self.inputs},
            seed=self.seed,
            started_at=self._started_at.isoformat(),
            finished_at=datetime.now(timezone.utc).isoformat(),
            elapsed_seconds=time.perf_counter() - self._started,
        )

    def write(self, path):
        return self.manifest().write(path)
