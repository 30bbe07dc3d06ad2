"""Fractional-frequency instability estimators and the sigma-tau machinery.

Three deviation statistics over averaged fractional-frequency samples,
plus the time deviation derived from the third:

    ffi0  -- two-sample deviation of adjacent samples
    ffi1  -- overlapping form with averaging factor m
    ffi2  -- modified form (double-averaged differences), the only one
             that separates white PM from flicker PM
    tdev  -- (tau / sqrt(3)) * ffi2

The module evaluates the overlapping sums through cumulative windows of
the raw sample differences, which is algebraically the phase-domain
(second/third difference) form evaluated without building large phase
partial sums; the literal nested sums remain the test oracle.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import DegenerateInput, InsufficientData, InvalidArgument
from .noisegen import NoiseKind
from .series import TimeSeriesX, TimeSeriesY


class Variant(Enum):
    """Which statistic a stability point or curve was computed with."""

    FFI0 = "ffi0"
    FFI1 = "ffi1"
    FFI2 = "ffi2"
    TDEV = "tdev"


@dataclass(frozen=True)
class StabilityPoint:
    """One (tau, value) sample of a sigma-tau curve."""

    tau: float
    value: float
    m: int
    variant: Variant

    def __post_init__(self):
        if self.m < 1:
            raise InvalidArgument(f"averaging factor m must be >= 1, got {self.m}")
        if not math.isfinite(self.value) or self.value < 0.0:
            raise InvalidArgument(f"stability value must be finite and >= 0, got {self.value}")
        if not math.isfinite(self.tau) or self.tau <= 0.0:
            raise InvalidArgument(f"tau must be finite and positive, got {self.tau}")


@dataclass(frozen=True)
class StabilityCurve:
    """Stability points at distinct averaging factors, ordered by tau.

    ``warnings`` records averaging factors that were skipped because the
    source series was too short for them.
    """

    points: tuple[StabilityPoint, ...]
    source_length: Optional[int] = None
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        points = tuple(self.points)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "warnings", tuple(self.warnings))
        variants = {p.variant for p in points}
        if len(variants) > 1:
            raise InvalidArgument(f"curve mixes variants {sorted(v.value for v in variants)}")
        ms = [p.m for p in points]
        if len(set(ms)) != len(ms):
            raise InvalidArgument("curve has duplicate averaging factors")
        taus = [p.tau for p in points]
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise InvalidArgument("curve points must be strictly increasing in tau")

    @property
    def variant(self) -> Optional[Variant]:
        return self.points[0].variant if self.points else None

    def taus(self) -> np.ndarray:
        return np.array([p.tau for p in self.points])

    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])


# ---------------------------------------------------------------------------
# x <-> y conversion


def y_from_x(series: TimeSeriesX) -> TimeSeriesY:
    """First difference of phase deviations: ybar_k = (xbar_{k+1} - xbar_k)/tau0."""
    x = series.samples
    if x.size < 2:
        raise InvalidArgument(f"y_from_x needs at least 2 samples, got {x.size}")
    return TimeSeriesY(series.tau0, np.diff(x) / series.tau0)


def x_from_y(series: TimeSeriesY, x0: float = 0.0) -> TimeSeriesX:
    """Cumulative inverse of :func:`y_from_x`, starting at phase deviation x0."""
    y = series.samples
    if y.size < 1:
        raise InvalidArgument("x_from_y needs at least 1 sample")
    x = np.empty(y.size + 1)
    x[0] = x0
    x[1:] = x0 + np.cumsum(y) * series.tau0
    return TimeSeriesX(series.tau0, x)


# ---------------------------------------------------------------------------
# Estimators


def _window_sums(a: np.ndarray, m: int) -> np.ndarray:
    """Sums of every m consecutive entries of a (len(a) - m + 1 windows)."""
    if m == 1:
        return a
    cs = np.cumsum(a)
    out = np.empty(a.size - m + 1)
    out[0] = cs[m - 1]
    out[1:] = cs[m:] - cs[:-m]
    return out


def _validate_m(m: int) -> int:
    if int(m) != m or m < 1:
        raise InvalidArgument(f"averaging factor m must be a positive integer, got {m}")
    return int(m)


def ffi0(series: TimeSeriesY) -> float:
    """Two-sample deviation of adjacent samples (tau = tau0)."""
    y = series.samples
    if y.size < 2:
        raise InsufficientData(f"ffi0 needs at least 2 samples, got {y.size}")
    d = np.diff(y)
    return float(np.sqrt(np.sum(d * d) / (2.0 * d.size)))


def ffi1(series: TimeSeriesY, m: int) -> float:
    """Overlapping two-sample deviation at averaging factor m (tau = m*tau0)."""
    m = _validate_m(m)
    y = series.samples
    if y.size - 2 * m + 1 < 1:
        raise InsufficientData(f"ffi1 with m={m} needs at least {2 * m} samples, got {y.size}")
    d = y[m:] - y[:-m]
    w = _window_sums(d, m)
    return float(np.sqrt(np.sum(w * w) / (2.0 * m * m * w.size)))


def ffi2(series: TimeSeriesY, m: int) -> float:
    """Modified (double-averaged) deviation at averaging factor m."""
    m = _validate_m(m)
    y = series.samples
    if y.size - 3 * m + 2 < 1:
        raise InsufficientData(f"ffi2 with m={m} needs at least {3 * m - 1} samples, got {y.size}")
    d = y[m:] - y[:-m]
    w = _window_sums(d, m)
    s = _window_sums(w, m)
    return float(np.sqrt(np.sum(s * s) / (2.0 * m**4 * s.size)))


def tdev_from_ffi2(ffi2_value: float, tau: float) -> float:
    """Time deviation in seconds from a modified deviation at integration time tau."""
    return tau / math.sqrt(3.0) * ffi2_value


def tdev(series: TimeSeriesY, m: int) -> float:
    """Time deviation (seconds) at averaging factor m."""
    return tdev_from_ffi2(ffi2(series, m), m * series.tau0)


# ---------------------------------------------------------------------------
# Curves


def decimate(series: TimeSeriesY, m: int) -> TimeSeriesY:
    """Block-average m consecutive samples; the trailing remainder is dropped."""
    m = _validate_m(m)
    n_blocks = series.samples.size // m
    if n_blocks < 1:
        raise InsufficientData(f"cannot decimate {series.samples.size} samples by m={m}")
    blocks = series.samples[: n_blocks * m].reshape(n_blocks, m)
    return TimeSeriesY(series.tau0 * m, blocks.mean(axis=1))


def _point_value(series: TimeSeriesY, m: int, variant: Variant) -> float:
    if variant is Variant.FFI0:
        return ffi0(decimate(series, m))
    if variant is Variant.FFI1:
        return ffi1(series, m)
    if variant is Variant.FFI2:
        return ffi2(series, m)
    if variant is Variant.TDEV:
        return tdev(series, m)
    raise InvalidArgument(f"unknown variant {variant!r}")


def stability_curve(series: TimeSeriesY, m_values: Iterable[int], variant: Variant) -> StabilityCurve:
    """Evaluate one statistic over several averaging factors.

    Averaging factors the series is too short for are skipped and noted
    in the returned curve's ``warnings`` instead of failing the curve.
    """
    points = []
    warnings = []
    for m in sorted({_validate_m(m) for m in m_values}):
        try:
            value = _point_value(series, m, variant)
        except InsufficientData as exc:
            warnings.append(f"m={m}: {exc}")
            continue
        points.append(StabilityPoint(tau=m * series.tau0, value=value, m=m, variant=variant))
    return StabilityCurve(points=tuple(points), source_length=len(series), warnings=tuple(warnings))


def octave_m_values(length: int, variant: Variant = Variant.FFI2) -> list[int]:
    """Octave-spaced averaging factors valid for a series of the given length."""
    need = (lambda m: 3 * m - 1) if variant in (Variant.FFI2, Variant.TDEV) else (lambda m: 2 * m)
    ms = []
    m = 1
    while need(m) <= length:
        ms.append(m)
        m *= 2
    return ms


def fit_slope(curve: StabilityCurve, tau_range: Optional[tuple[float, float]] = None) -> float:
    """Least-squares slope of log10(value) against log10(tau).

    tau_range restricts the fit to points with tau in [lo, hi] inclusive;
    None uses every point.
    """
    pts = curve.points
    if tau_range is not None:
        lo, hi = tau_range
        pts = tuple(p for p in pts if lo <= p.tau <= hi)
    if len(pts) < 3:
        raise InsufficientData(f"fit_slope needs at least 3 points in range, got {len(pts)}")
    values = np.array([p.value for p in pts])
    if np.any(values <= 0.0):
        raise DegenerateInput("fit_slope requires strictly positive stability values")
    taus = np.log10([p.tau for p in pts])
    return float(np.polyfit(taus, np.log10(values), 1)[0])


# ---------------------------------------------------------------------------
# Noise identification

# Slope of FFI vs tau on a log-log plot for each dominant noise process.
_SLOPE_TABLE_FFI01 = {
    NoiseKind.WHITE_PM: -1.0,
    NoiseKind.FLICKER_PM: -1.0,
    NoiseKind.WHITE_FM: -0.5,
    NoiseKind.FLICKER_FM: 0.0,
    NoiseKind.RANDOM_WALK_FM: 0.5,
}
_SLOPE_TABLE_FFI2 = {**_SLOPE_TABLE_FFI01, NoiseKind.WHITE_PM: -1.5}

# Half the minimum separation between distinct table rows (0.5), so the
# acceptance bands of different slopes never overlap.
CLASSIFY_TOLERANCE = 0.25


def classify_noise(slope: float, variant: Variant) -> set[NoiseKind]:
    """All noise kinds whose table slope lies within 0.25 of the fitted slope.

    Under ffi0/ffi1 a slope near -1 is intrinsically ambiguous between
    white PM and flicker PM; only ffi2 separates them.
    """
    if variant in (Variant.FFI0, Variant.FFI1):
        table = _SLOPE_TABLE_FFI01
    elif variant is Variant.FFI2:
        table = _SLOPE_TABLE_FFI2
    else:
        raise InvalidArgument(f"classify_noise accepts FFI0/FFI1/FFI2 curves, got {variant!r}")
    return {kind for kind, alpha in table.items() if abs(slope - alpha) <= CLASSIFY_TOLERANCE}


def max_trusted_tau(curve: StabilityCurve) -> Optional[float]:
    """Integration time where the local ffi2 slope first rises above -1.25.

    This marks the white-PM-to-flicker-PM handover beyond which stability
    readings are not trusted; None when no such transition exists.
    """
    if curve.variant is not Variant.FFI2:
        raise InvalidArgument("max_trusted_tau requires an FFI2 curve")
    if len(curve.points) < 3:
        return None
    values = curve.values()
    if np.any(values <= 0.0):
        raise DegenerateInput("max_trusted_tau requires strictly positive values")
    taus = curve.taus()
    slopes = np.diff(np.log10(values)) / np.diff(np.log10(taus))
    for i in range(1, slopes.size):
        if slopes[i - 1] <= -1.25 < slopes[i]:
            return float(taus[i])
    return None


# ---------------------------------------------------------------------------
# Serialization

CURVE_CSV_FIELDS = ("tau_s", "value", "m", "variant")


def curve_to_csv(curve: StabilityCurve, stream: io.TextIOBase, metadata: Optional[Mapping[str, object]] = None) -> None:
    """Write a curve as CSV with ``tau_s,value,m,variant`` columns.

    Metadata key/value pairs (and the curve's source length) go into
    leading ``#`` comment lines so the data round-trips exactly.
    """
    for key, value in (metadata or {}).items():
        stream.write(f"# {key}={value}\n")
    if curve.source_length is not None:
        stream.write(f"# source_length={curve.source_length}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CURVE_CSV_FIELDS)
    for p in sorted(curve.points, key=lambda p: p.tau):
        writer.writerow([repr(p.tau), repr(p.value), p.m, p.variant.value])


def curve_from_csv(stream: io.TextIOBase) -> StabilityCurve:
    """Read a curve previously written by :func:`curve_to_csv`."""
    source_length = None
    rows = []
    header_seen = False
    for line in stream:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("source_length="):
                source_length = int(body.split("=", 1)[1])
            continue
        cells = next(csv.reader([line]))
        if not header_seen:
            if tuple(cells) != CURVE_CSV_FIELDS:
                raise InvalidArgument(f"unexpected curve CSV header {cells!r}")
            header_seen = True
            continue
        rows.append(cells)
    points = tuple(
        StabilityPoint(tau=float(tau), value=float(value), m=int(m), variant=Variant(variant))
        for tau, value, m, variant in rows
    )
    return StabilityCurve(points=points, source_length=source_length)
