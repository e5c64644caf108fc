"""BPSK over AWGN.

Bit 0 maps to +1 and bit 1 to −1, so a positive LLR favors bit 0. Noise levels are given in dB
and interpreted as Eb/N0 (rate normalized) unless the ``esno`` convention is chosen.
"""
import math

import numpy as np

from minsumkd.enums import SnrConvention
from minsumkd.exceptions import ChannelConfigError


def snr_to_sigma(snr_db, rate, convention=SnrConvention.EBNO):
    """Noise standard deviation for a given SNR.

    ``ebno``: σ² = 1 / (2·R·10^(snr/10)). ``esno``: σ² = 1 / (2·10^(snr/10)).
    """
    if not 0 < rate <= 1:
        raise ChannelConfigError(f"Code rate must be in (0, 1], got {rate}.")
    if convention == SnrConvention.ESNO:
        rate = 1.0
    elif convention != SnrConvention.EBNO:
        raise ChannelConfigError(f"Unknown SNR convention '{convention}'.")
    if snr_db == math.inf:
        return 0.0
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (snr_db / 10.0)))


def stream(seed, *key):
    """An independent random stream for ``(seed, *key)``. Equal arguments always give the same
    sequence; distinct keys never overlap."""
    return np.random.default_rng(
        np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    )


class ChannelConfig:
    """Noise level of one AWGN channel use.

    Args:
        snr_db (float): SNR in dB.
        rate (float): Code rate k/n; use 1 for uncoded transmission.
        seed (int): Identity of the random stream.
        convention (str): ``ebno`` or ``esno``.
    """

    def __init__(self, snr_db, rate, seed=0, convention=SnrConvention.EBNO):
        self.snr_db = float(snr_db)
        self.rate = float(rate)
        self.seed = int(seed)
        self.convention = convention
        self.sigma = snr_to_sigma(self.snr_db, self.rate, convention)
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ChannelConfigError(
                f"SNR {snr_db} dB gives noise deviation {self.sigma}; it must be finite and positive."
            )

    @property
    def variance(self):
        return self.sigma ** 2

    def rng(self, *key):
        return stream(self.seed, *key)

    def __repr__(self):
        return (
            f"ChannelConfig(snr_db={self.snr_db}, rate={self.rate:.4f}, "
            f"sigma={self.sigma:.6g}, convention={self.convention})"
        )


def modulate(bits):
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def demodulate(x):
    """Hard mapping (1 − x)/2 of ±1 symbols back to bits."""
    return ((1.0 - np.asarray(x)) / 2.0).astype(np.uint8)


def transmit(x, cfg, rng):
    """Adds i.i.d. Gaussian noise with deviation ``cfg.sigma``."""
    x = np.asarray(x, dtype=np.float64)
    return x + cfg.sigma * rng.standard_normal(x.shape)


def llr(y, cfg):
    """Channel LLRs 2y/σ²."""
    return 2.0 * np.asarray(y, dtype=np.float64) / cfg.variance


def hard_decision(llrs):
    """Bit 1 where the LLR is not positive."""
    return (np.asarray(llrs) <= 0).astype(np.uint8)
