"""Oscillator and mode-locked-laser comb models.

A ``ClockModel`` turns a nominal oscillator (frequency offset, linear
drift, power-law noise) into sampled phase-deviation series for the
stability estimators.  ``CombParams`` carries the frequency-domain comb
descriptor (repetition rate, carrier-envelope offset) and derives its
time-domain partners; the carrier waveform itself is never synthesized
because every consumer works on x/y data.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidArgument
from .noisegen import NoiseSpec, generate_noise
from .seeding import derive_seed
from .series import TimeSeriesX, _validate_tau0

#: Photodetector-friendly repetition-rate band for comb sampling schemes.
REP_RATE_BAND_HZ = (10e6, 1e9)


@dataclass(frozen=True)
class ClockModel:
    """An oscillator: nominal frequency plus deterministic and noise terms.

    frac_freq_offset is a constant fractional-frequency bias; drift is
    its linear rate of change per second.  s0 is the carrier peak
    amplitude, carried for documentation only.
    """

    nu0: float
    phi0: float = 0.0
    frac_freq_offset: float = 0.0
    drift: float = 0.0
    noise: tuple[NoiseSpec, ...] = ()
    s0: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.nu0) or self.nu0 <= 0.0:
            raise InvalidArgument(f"nu0 must be finite and positive, got {self.nu0}")
        for name in ("phi0", "frac_freq_offset", "drift"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgument(f"{name} must be finite")
        object.__setattr__(self, "noise", tuple(self.noise))


@dataclass(frozen=True)
class CombParams:
    """Frequency-comb descriptor: mode_N = N*f_r + f_0.

    t_0 is the pulse duration; t_r = 1/f_r and the carrier-envelope
    phase slip are derived, never stored.
    """

    f_r: float
    f_0: float
    t_0: float
    n_range: tuple[int, int]

    def __post_init__(self):
        if not math.isfinite(self.f_r) or self.f_r <= 0.0:
            raise InvalidArgument(f"repetition rate f_r must be positive, got {self.f_r}")
        if not (0.0 <= self.f_0 < self.f_r):
            raise InvalidArgument(f"offset frequency must satisfy 0 <= f_0 < f_r, got {self.f_0}")
        if not math.isfinite(self.t_0) or self.t_0 <= 0.0:
            raise InvalidArgument(f"pulse duration t_0 must be positive, got {self.t_0}")
        lo, hi = self.n_range
        if int(lo) != lo or int(hi) != hi or lo < 1 or hi < lo:
            raise InvalidArgument(f"n_range must be an integer interval with 1 <= lo <= hi, got {self.n_range}")
        object.__setattr__(self, "n_range", (int(lo), int(hi)))
        if not (REP_RATE_BAND_HZ[0] <= self.f_r <= REP_RATE_BAND_HZ[1]):
            warnings.warn(
                f"repetition rate {self.f_r:g} Hz is outside the "
                f"{REP_RATE_BAND_HZ[0]:g}-{REP_RATE_BAND_HZ[1]:g} Hz band of "
                "off-the-shelf photodetection",
                stacklevel=2,
            )


def sample_clock(clock: ClockModel, count: int, tau0: float, seed: int = 0) -> TimeSeriesX:
    """Sample the clock's phase deviation at count points spaced tau0 apart.

    The deterministic part (offset + drift ramp) is integrated exactly;
    each noise source contributes its fractional-frequency samples
    accumulated stepwise, one rectangle per sample period.
    """
    if count < 2:
        raise InvalidArgument(f"count must be >= 2, got {count}")
    tau0 = _validate_tau0(tau0)
    t = np.arange(count) * tau0
    x = clock.frac_freq_offset * t + 0.5 * clock.drift * t * t
    for i, spec in enumerate(clock.noise):
        if spec.amplitude == 0.0:
            continue
        derived = replace(spec, seed=derive_seed(seed, i, spec.seed))
        y = generate_noise(derived, max(2, count - 1), tau0).samples[: count - 1]
        x[1:] += np.cumsum(y) * tau0
    return TimeSeriesX(tau0, x)


def comb_mode_freq(comb: CombParams, n: int) -> float:
    """Optical frequency of mode index n (Hz)."""
    lo, hi = comb.n_range
    if int(n) != n or not (lo <= n <= hi):
        raise InvalidArgument(f"mode index {n} outside comb range [{lo}, {hi}]")
    return n * comb.f_r + comb.f_0


def comb_time_params(comb: CombParams) -> tuple[float, float]:
    """Pulse period t_r = 1/f_r and carrier-envelope phase slip 2*pi*f_0/f_r."""
    return 1.0 / comb.f_r, 2.0 * math.pi * comb.f_0 / comb.f_r


def pulse_train_times(comb: CombParams, count: int, jitter: NoiseSpec | None = None, seed: int = 0) -> np.ndarray:
    """Emission times of count pulses: k*t_r plus accumulated timing jitter.

    The jitter spec describes fractional fluctuations of the pulse
    period, integrated into emission-time offsets; None (or zero
    amplitude) gives the exact nominal train.
    """
    if count < 1:
        raise InvalidArgument(f"count must be >= 1, got {count}")
    t_r = 1.0 / comb.f_r
    times = np.arange(count) * t_r
    if jitter is not None and jitter.amplitude > 0.0 and count > 1:
        derived = replace(jitter, seed=derive_seed(seed, jitter.seed))
        y = generate_noise(derived, max(2, count - 1), t_r).samples[: count - 1]
        times[1:] += np.cumsum(y) * t_r
    return times
