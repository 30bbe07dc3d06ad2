"""Power-law clock-noise synthesis.

Five canonical oscillator noise processes, identified by the exponent
``beta`` of the one-sided fractional-frequency PSD ``S_y(f) = A * f**beta``:

    white PM          beta = +2
    flicker PM        beta = +1
    white FM          beta =  0
    flicker FM        beta = -1
    random-walk FM    beta = -2

The amplitude ``A`` is the PSD coefficient at f = 1 Hz.  FM kinds are
shaped directly in the frequency (y) domain.  PM kinds are shaped as
phase (x) noise with exponent ``beta - 2`` and PSD coefficient
``A / (2*pi)**2``, then differenced to fractional frequency, which keeps
the PM/FM distinction explicit at the synthesis level.

Long-memory shaping uses the recursive fractional-difference filter
(exact power-law tail, well conditioned); spectral-FFT synthesis exists
only as a test oracle in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InsufficientData, InvalidArgument
from .series import TimeSeriesY, _validate_tau0

_TWO_PI = 2.0 * math.pi
_MAX_SEED = 2**64


class NoiseKind(Enum):
    """The five canonical power-law processes."""

    WHITE_PM = "white_pm"
    FLICKER_PM = "flicker_pm"
    WHITE_FM = "white_fm"
    FLICKER_FM = "flicker_fm"
    RANDOM_WALK_FM = "random_walk_fm"

    @property
    def beta(self) -> int:
        """Exponent of the fractional-frequency PSD, S_y ~ f**beta."""
        return _BETA[self]

    @property
    def is_pm(self) -> bool:
        return self in (NoiseKind.WHITE_PM, NoiseKind.FLICKER_PM)


_BETA = {
    NoiseKind.WHITE_PM: 2,
    NoiseKind.FLICKER_PM: 1,
    NoiseKind.WHITE_FM: 0,
    NoiseKind.FLICKER_FM: -1,
    NoiseKind.RANDOM_WALK_FM: -2,
}


@dataclass(frozen=True)
class NoiseSpec:
    """One power-law noise process.

    amplitude is the one-sided S_y PSD coefficient at 1 Hz
    (dimensionless^2/Hz); seed selects the deterministic sample path.
    """

    kind: NoiseKind
    amplitude: float
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.kind, NoiseKind):
            raise InvalidArgument(f"kind must be a NoiseKind, got {self.kind!r}")
        amp = float(self.amplitude)
        if not math.isfinite(amp) or amp < 0.0:
            raise InvalidArgument(f"amplitude must be finite and >= 0, got {self.amplitude}")
        object.__setattr__(self, "amplitude", amp)
        if not (0 <= int(self.seed) < _MAX_SEED):
            raise InvalidArgument(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))


def fractional_filter_coeffs(beta_exponent: float, count: int) -> np.ndarray:
    """First ``count`` impulse-response taps of the 1/f^|beta| shaping filter.

    Recursion: h_0 = 1, h_k = h_{k-1} * (k - 1 + |beta|/2) / k.
    """
    if count < 1:
        raise InvalidArgument(f"count must be >= 1, got {count}")
    half = abs(float(beta_exponent)) / 2.0
    if count == 1:
        return np.ones(1)
    k = np.arange(1, count, dtype=float)
    return np.concatenate(([1.0], np.cumprod((k - 1.0 + half) / k)))


def _shaped_gaussian(rng, exponent: int, coefficient: float, count: int, tau0: float) -> np.ndarray:
    """Gaussian sequence with one-sided PSD ``coefficient * f**exponent``.

    exponent <= 0.  The first ``count`` filtered samples are warm-up and
    discarded, leaving ``count`` emitted samples.
    """
    # Discrete innovation variance for a 1 Hz PSD coefficient at sample
    # period tau0: S(f) = 2 * qd * (2*pi)**b * tau0**(b+1) * f**b.
    qd = coefficient / (2.0 * _TWO_PI**exponent * tau0 ** (exponent + 1))
    total = 2 * count
    white = rng.standard_normal(total) * math.sqrt(qd)
    if exponent == 0:
        return white[count:]
    h = fractional_filter_coeffs(exponent, total)
    size = 1 << (2 * total - 1).bit_length()
    shaped = np.fft.irfft(np.fft.rfft(white, size) * np.fft.rfft(h, size), size)[:total]
    return shaped[count:]


def generate_noise(spec: NoiseSpec, count: int, tau0: float) -> TimeSeriesY:
    """Synthesize ``count`` fractional-frequency samples of the given process.

    Deterministic for a fixed (spec, count, tau0); zero amplitude yields
    an identically-zero series.
    """
    if count < 2:
        raise InvalidArgument(f"count must be >= 2, got {count}")
    tau0 = _validate_tau0(tau0)
    if spec.amplitude == 0.0:
        return TimeSeriesY(tau0, np.zeros(count))
    rng = np.random.default_rng(spec.seed)
    beta = spec.kind.beta
    if spec.kind.is_pm:
        x = _shaped_gaussian(rng, beta - 2, spec.amplitude / _TWO_PI**2, count + 1, tau0)
        return TimeSeriesY(tau0, np.diff(x) / tau0)
    return TimeSeriesY(tau0, _shaped_gaussian(rng, beta, spec.amplitude, count, tau0))


def psd_estimate(series: TimeSeriesY) -> tuple[np.ndarray, np.ndarray]:
    """One-sided periodogram of a series; returns (frequencies Hz, density).

    Normalized so that sum(density) * df equals the series variance
    (rectangular window, mean removed).
    """
    y = series.samples
    n = y.size
    if n < 16:
        raise InsufficientData(f"psd_estimate needs at least 16 samples, got {n}")
    spectrum = np.fft.rfft(y - y.mean())
    freqs = np.fft.rfftfreq(n, d=series.tau0)
    density = (2.0 * series.tau0 / n) * np.abs(spectrum) ** 2
    density[0] = 0.0
    if n % 2 == 0:
        density[-1] /= 2.0  # Nyquist bin appears once
    return freqs, density
