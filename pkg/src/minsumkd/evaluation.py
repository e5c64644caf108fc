"""Monte-Carlo BER/FER simulation, the brute-force ML oracle and curve comparison.

Frames are simulated in fixed-size chunks. Chunk c of SNR point i draws from the random stream
(seed, EVAL, i, c). Chunks are merged in chunk order and the stop rule is tested after each
merge, so error counts never depend on how many workers computed the chunks.
"""
import json
import logging
import math
import time

import numpy as np
from pandas import DataFrame
from scipy.stats import norm

from minsumkd import channel
from minsumkd.codebook import encode
from minsumkd.codebook import enumerate_codewords
from minsumkd.codebook import ML_ENUMERATION_LIMIT
from minsumkd.decoder import decode
from minsumkd.decoder import DEFAULT_LLR_CAP
from minsumkd.decoder import minsum_decode
from minsumkd.decoder import OffsetParameters
from minsumkd.enums import DecoderKind
from minsumkd.enums import SnrConvention
from minsumkd.enums import StreamPurpose
from minsumkd.exceptions import ConfigError
from minsumkd.exceptions import GridMismatchError
from minsumkd.exceptions import OracleLimitError

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["snr_db", "bits", "bit_errors", "ber", "ci95", "frames", "frame_errors", "fer"]
DEFAULT_MIN_FRAME_ERRORS = 100
DEFAULT_MAX_FRAMES = 10_000_000
DEFAULT_CHUNK_FRAMES = 1000
RELIABLE_BIT_ERRORS = 20
Z_95 = norm.ppf(0.975)


class DecoderSpec:
    """What to decode with.

    Args:
        kind (str): One of :class:`~minsumkd.enums.DecoderKind`.
        iterations (int): T for the min-sum kinds.
        offset (float): Fixed offset of ``minsum`` / ``offset``.
        beta (OffsetParameters): Learned offsets of ``neural``.
        checkpoint_id (str): Identity of the checkpoint the offsets came from.
        early_exit (bool): Stop decoding a frame once its syndrome is zero.
    """

    def __init__(
        self,
        kind,
        iterations=None,
        offset=0.0,
        beta=None,
        checkpoint_id=None,
        early_exit=True,
        llr_cap=DEFAULT_LLR_CAP,
    ):
        self.kind = kind
        self.offset = float(offset or 0.0)
        self.beta = beta
        self.checkpoint_id = checkpoint_id
        self.early_exit = early_exit
        self.llr_cap = llr_cap
        if kind == DecoderKind.NEURAL:
            if not isinstance(beta, OffsetParameters):
                raise ConfigError("The neural decoder needs trained offsets.")
            iterations = beta.t_student
        elif kind in (DecoderKind.MINSUM, DecoderKind.OFFSET):
            if not iterations or iterations < 1:
                raise ConfigError("Min-sum decoding needs at least one iteration.")
        elif kind not in (DecoderKind.UNCODED, DecoderKind.ML):
            raise ConfigError(f"Unknown decoder kind '{kind}'.")
        self.iterations = iterations

    @property
    def channel_rate_is_unity(self):
        return self.kind == DecoderKind.UNCODED

    def describe(self):
        described = {"kind": self.kind, "iterations": self.iterations}
        if self.kind in (DecoderKind.MINSUM, DecoderKind.OFFSET):
            described["offset"] = self.offset
        if self.checkpoint_id:
            described["checkpoint_id"] = self.checkpoint_id
        return described

    def bind(self, code):
        """Returns a function mapping an LLR batch to hard decisions for ``code``."""
        if self.kind == DecoderKind.UNCODED:
            return channel.hard_decision
        if self.kind == DecoderKind.ML:
            codebook = enumerate_codewords(code.g)
            return lambda llr: ml_decode_bruteforce(code, llr, codebook=codebook)
        graph = code.graph
        if self.kind == DecoderKind.NEURAL:
            self.beta.check_graph(graph)
            return lambda llr: decode(
                llr, graph, self.beta, early_exit=self.early_exit, llr_cap=self.llr_cap
            ).bits
        return lambda llr: minsum_decode(
            llr,
            graph,
            self.iterations,
            offset=self.offset,
            early_exit=self.early_exit,
            llr_cap=self.llr_cap,
        ).bits


def ml_decode_bruteforce(code, llr, codebook=None):
    """Maximum-likelihood decisions by enumerating all 2^k codewords.

    The winner maximizes Σ_v (1 − 2b_v)·l_v; ties go to the lowest message index.
    """
    if code.k > ML_ENUMERATION_LIMIT:
        raise OracleLimitError(code.k, ML_ENUMERATION_LIMIT)
    codebook = enumerate_codewords(code.g) if codebook is None else codebook
    llr = np.atleast_2d(np.asarray(llr, dtype=np.float64))
    correlation = llr @ (1.0 - 2.0 * codebook.astype(np.float64)).T
    return codebook[np.argmax(correlation, axis=1)]


class BerPoint:
    def __init__(self, snr_db, bits_sent=0, bit_errors=0, frames_sent=0, frame_errors=0):
        self.snr_db = float(snr_db)
        self.bits_sent = int(bits_sent)
        self.bit_errors = int(bit_errors)
        self.frames_sent = int(frames_sent)
        self.frame_errors = int(frame_errors)

    @property
    def ber(self):
        return self.bit_errors / self.bits_sent if self.bits_sent else math.nan

    @property
    def fer(self):
        return self.frame_errors / self.frames_sent if self.frames_sent else math.nan

    @property
    def ci95_halfwidth(self):
        """Normal-approximation half-width of the 95% interval on the BER."""
        if not self.bits_sent:
            return math.nan
        ber = self.ber
        return Z_95 * math.sqrt(ber * (1.0 - ber) / self.bits_sent)

    @property
    def reliable(self):
        return self.bit_errors >= RELIABLE_BIT_ERRORS

    def merge(self, bits, bit_errors, frames, frame_errors):
        self.bits_sent += int(bits)
        self.bit_errors += int(bit_errors)
        self.frames_sent += int(frames)
        self.frame_errors += int(frame_errors)

    def to_dict(self):
        return {
            "snr_db": self.snr_db,
            "bits": self.bits_sent,
            "bit_errors": self.bit_errors,
            "ber": self.ber,
            "ci95": self.ci95_halfwidth,
            "frames": self.frames_sent,
            "frame_errors": self.frame_errors,
            "fer": self.fer,
        }

    @classmethod
    def from_dict(cls, values):
        return cls(
            values["snr_db"],
            values["bits"],
            values["bit_errors"],
            values["frames"],
            values["frame_errors"],
        )

    def __repr__(self):
        return f"BerPoint(snr_db={self.snr_db}, ber={self.ber:.3e}, frames={self.frames_sent})"


class BerSweepReport:
    def __init__(self, decoder, code, points, elapsed_seconds=0.0, metadata=None):
        self.decoder = dict(decoder)
        self.code = dict(code)
        self.points = sorted(points, key=lambda p: p.snr_db)
        snrs = [p.snr_db for p in self.points]
        if len(set(snrs)) != len(snrs):
            raise ConfigError("A sweep report holds one point per SNR.")
        self.elapsed_seconds = float(elapsed_seconds)
        self.metadata = dict(metadata or {})

    @property
    def snr_grid(self):
        return [p.snr_db for p in self.points]

    @property
    def frames_per_second(self):
        frames = sum(p.frames_sent for p in self.points)
        return frames / self.elapsed_seconds if self.elapsed_seconds > 0 else math.nan

    @property
    def label(self):
        label = self.decoder.get("kind", "decoder")
        if self.decoder.get("iterations"):
            label += f" T={self.decoder['iterations']}"
        if self.decoder.get("checkpoint_id"):
            label += f" ({self.decoder['checkpoint_id']})"
        return label

    def to_dataframe(self):
        return DataFrame([p.to_dict() for p in self.points], columns=CSV_COLUMNS)

    def to_dict(self):
        return {
            "decoder": self.decoder,
            "code": self.code,
            "points": [p.to_dict() for p in self.points],
            "elapsed_seconds": self.elapsed_seconds,
            "frames_per_second": self.frames_per_second,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, values):
        return cls(
            values["decoder"],
            values["code"],
            [BerPoint.from_dict(p) for p in values["points"]],
            values.get("elapsed_seconds", 0.0),
            values.get("metadata"),
        )

    def write(self, prefix, plot=True):
        """Writes ``<prefix>.csv``, ``<prefix>.json`` and, with ``plot``, ``<prefix>.svg``.

        Returns:
            list: The paths written.
        """
        paths = [f"{prefix}.csv", f"{prefix}.json"]
        self.to_dataframe().to_csv(paths[0], index=False, float_format="%.10g")
        with open(paths[1], "w", encoding="utf-8") as file:
            json.dump(self.to_dict(), file, indent=2, sort_keys=True)
        if plot:
            # imported here so matplotlib loads only when a plot is drawn
            from minsumkd.plot import plot_ber

            paths.append(plot_ber([self], f"{prefix}.svg"))
        return paths


def load_report(path):
    with open(path, encoding="utf-8") as file:
        return BerSweepReport.from_dict(json.load(file))


class StopRule:
    """A point ends once it has ``min_frame_errors`` frame errors or ``max_frames`` frames."""

    def __init__(self, min_frame_errors=DEFAULT_MIN_FRAME_ERRORS, max_frames=DEFAULT_MAX_FRAMES):
        if max_frames is None or max_frames < 1:
            raise ConfigError("The frame budget of a point must be at least one frame.")
        self.min_frame_errors = min_frame_errors
        self.max_frames = int(max_frames)

    def done(self, point):
        if self.min_frame_errors and point.frame_errors >= self.min_frame_errors:
            return True
        return point.frames_sent >= self.max_frames


def _chunk_sizes(max_frames, chunk_frames):
    chunks = []
    sent = 0
    while sent < max_frames:
        size = min(chunk_frames, max_frames - sent)
        chunks.append(size)
        sent += size
    return chunks


def _simulate_chunk(code, decoder_fn, cfg, key, frames, all_zero):
    rng = channel.stream(cfg.seed, *key)
    if all_zero or code.k == 0:
        codewords = np.zeros((frames, code.n), dtype=np.uint8)
    else:
        messages = rng.integers(0, 2, size=(frames, code.k), dtype=np.uint8)
        codewords = encode(code.g, messages)
    received = channel.transmit(channel.modulate(codewords), cfg, rng)
    decisions = decoder_fn(channel.llr(received, cfg))
    errors = decisions != codewords
    return codewords.size, int(errors.sum()), frames, int(errors.any(axis=1).sum())


def _simulate_point(code, decoder_fn, cfg, key_prefix, stop, chunk_frames, worker, all_zero):
    point = BerPoint(cfg.snr_db)
    sizes = _chunk_sizes(stop.max_frames, chunk_frames)
    round_size = worker._thread_count if worker else 1
    next_chunk = 0
    while next_chunk < len(sizes) and not stop.done(point):
        batch = list(range(next_chunk, min(next_chunk + round_size, len(sizes))))
        tasks = [(c, key_prefix + (c,), sizes[c]) for c in batch]

        def run(task):
            _, key, frames = task
            return _simulate_chunk(code, decoder_fn, cfg, key, frames, all_zero)

        results = worker.map(run, tasks) if worker else [run(t) for t in tasks]
        for counts in results:
            point.merge(*counts)
            next_chunk += 1
            if stop.done(point):
                break
    return point


def _channel_config(code, spec, snr_db, seed, convention):
    rate = 1.0 if spec.channel_rate_is_unity else code.rate
    return channel.ChannelConfig(snr_db, rate, seed=seed, convention=convention)


def sweep(
    code,
    spec,
    snr_list,
    stop=None,
    seed=0,
    worker=None,
    chunk_frames=DEFAULT_CHUNK_FRAMES,
    convention=SnrConvention.EBNO,
    all_zero=False,
    progress=None,
):
    """Simulates ``spec`` on ``code`` at every SNR of ``snr_list``.

    Returns:
        BerSweepReport: One point per distinct SNR, sorted.
    """
    stop = stop or StopRule()
    grid = sorted(set(float(s) for s in snr_list))
    if len(grid) != len(snr_list):
        logger.warning("Duplicate SNR values dropped from the sweep grid.")
    decoder_fn = spec.bind(code)
    started = time.perf_counter()
    points = []
    for i, snr_db in enumerate(grid):
        cfg = _channel_config(code, spec, snr_db, seed, convention)
        point = _simulate_point(
            code, decoder_fn, cfg, (StreamPurpose.EVAL, i), stop, chunk_frames, worker, all_zero
        )
        logger.info("%s at %.2f dB: %s", spec.kind, snr_db, point)
        points.append(point)
        if progress:
            progress(point)
    elapsed = time.perf_counter() - started
    return BerSweepReport(
        spec.describe(),
        code.describe(),
        points,
        elapsed,
        metadata={
            "seed": seed,
            "convention": convention,
            "min_frame_errors": stop.min_frame_errors,
            "max_frames": stop.max_frames,
            "chunk_frames": chunk_frames,
            "all_zero": all_zero,
        },
    )


def measure_ber(
    code,
    spec,
    snr_db,
    frames,
    seed=0,
    worker=None,
    chunk_frames=DEFAULT_CHUNK_FRAMES,
    convention=SnrConvention.EBNO,
    purpose=StreamPurpose.VALIDATION,
):
    """BER over a fixed budget of ``frames`` frames (no early stop on frame errors)."""
    cfg = _channel_config(code, spec, snr_db, seed, convention)
    stop = StopRule(min_frame_errors=None, max_frames=frames)
    return _simulate_point(
        code, spec.bind(code), cfg, (purpose, 0), stop, chunk_frames, worker, False
    )


def _check_comparable(reports):
    if len(reports) < 2:
        raise GridMismatchError("At least two reports are needed for a comparison.")
    first = reports[0]
    for report in reports[1:]:
        if report.code.get("matrix_hash") != first.code.get("matrix_hash"):
            raise GridMismatchError("Reports were simulated on different codes.")
        if report.snr_grid != first.snr_grid:
            raise GridMismatchError(
                f"Reports use different SNR grids: {first.snr_grid} vs {report.snr_grid}."
            )


def _snr_at_ber(report, level):
    """SNR at which the curve crosses ``level``, interpolating SNR linearly in log10(BER)."""
    usable = [p for p in report.points if p.bit_errors > 0]
    if len(usable) < 2:
        return math.nan
    snr = np.array([p.snr_db for p in usable])
    log_ber = np.minimum.accumulate(np.log10([p.ber for p in usable]))
    target = math.log10(level)
    if target > log_ber[0] or target < log_ber[-1]:
        return math.nan
    return float(np.interp(target, log_ber[::-1], snr[::-1]))


def _ber_levels(reports):
    lows, highs = [], []
    for report in reports:
        bers = [p.ber for p in report.points if p.bit_errors > 0]
        if not bers:
            return []
        lows.append(min(bers))
        highs.append(max(bers))
    low, high = max(lows), min(highs)
    if low > high:
        return []
    levels = [10.0 ** k for k in range(math.ceil(math.log10(low)), math.floor(math.log10(high)) + 1)]
    return levels or [math.sqrt(low * high)]


class Comparison:
    def __init__(self, table, gains):
        self.table = table
        self.gains = gains


def compare(reports, reference=0):
    """Compares BER curves against ``reports[reference]``.

    Returns:
        Comparison: ``table`` holds per-SNR BER ratios to the reference with a propagated 95%
        half-width; ``gains`` holds the SNR saving in dB (reference SNR minus curve SNR) at
        matched BER levels.
    """
    _check_comparable(reports)
    base = reports[reference]
    rows = []
    for index, report in enumerate(reports):
        for point, ref in zip(report.points, base.points):
            ratio = point.ber / ref.ber if ref.ber else math.nan
            if point.ber and ref.ber:
                spread = math.hypot(point.ci95_halfwidth / point.ber, ref.ci95_halfwidth / ref.ber)
                ratio_ci = ratio * spread
            else:
                ratio_ci = math.nan
            rows.append(
                {
                    "report": index,
                    "decoder": report.label,
                    "snr_db": point.snr_db,
                    "ber": point.ber,
                    "ci95": point.ci95_halfwidth,
                    "ratio": ratio,
                    "ratio_ci95": ratio_ci,
                    "reliable": point.reliable,
                }
            )
    gains = []
    for level in _ber_levels(reports):
        ref_snr = _snr_at_ber(base, level)
        for index, report in enumerate(reports):
            if index == reference:
                continue
            snr = _snr_at_ber(report, level)
            gains.append(
                {
                    "report": index,
                    "decoder": report.label,
                    "ber_level": level,
                    "reference_snr_db": ref_snr,
                    "snr_db": snr,
                    "gain_db": ref_snr - snr,
                }
            )
    return Comparison(
        DataFrame(rows),
        DataFrame(
            gains,
            columns=["report", "decoder", "ber_level", "reference_snr_db", "snr_db", "gain_db"],
        ),
    )
