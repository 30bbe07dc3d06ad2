"""One-way and two-way time transfer over a free-space link.

One exchange produces the classic timestamp quartet: A transmits (t1),
B receives (t2), B replies after a turnaround (t3), A receives (t4),
each timestamp read in the owning clock's own timescale.  The two-way
combination ((t2 - t1) - (t4 - t3))/2 cancels any reciprocal path delay
exactly; asymmetry delta between the directions biases it by delta/2.

A campaign repeats exchanges on a fixed schedule, feeds the residuals
to the stability estimators, and reports sigma_dt as the configured
excess bias plus the sample deviation of the residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .clockmodel import ClockModel, sample_clock
from .errors import InvalidArgument
from .quantum import EstimatorModel, model_sigma, required_squeezing
from .seeding import derive_seed
from .series import TimeSeriesX
from .stability import StabilityCurve, Variant, octave_m_values, stability_curve, y_from_x

#: Near-surface troposphere lengthens the effective path by 1 ns per km.
TROPOSPHERE_DELAY_S_PER_KM = 1e-9


@dataclass(frozen=True)
class GeometricParams:
    """Gaussian-beam geometry of a free-space link (all lengths in meters)."""

    wavelength: float
    waist: float
    aperture_radius: float

    def __post_init__(self):
        for name in ("wavelength", "waist", "aperture_radius"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0.0:
                raise InvalidArgument(f"{name} must be finite and positive, got {v}")


@dataclass(frozen=True)
class LinkModel:
    """Free-space link between two terminals.

    Per-direction delays may differ; enabling the troposphere adds
    1 ns/km to each direction.  sigma_excess is the additive
    synchronization bias folded into the reported timing error.
    """

    distance_km: float
    delay_ab: float
    delay_ba: float
    troposphere_enabled: bool = False
    geometric: Optional[GeometricParams] = None
    pointing_sigma: float = 0.0
    eta_detector: float = 1.0
    sigma_excess: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.distance_km) or self.distance_km <= 0.0:
            raise InvalidArgument(f"distance_km must be positive, got {self.distance_km}")
        for name in ("delay_ab", "delay_ba", "pointing_sigma", "sigma_excess"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0.0:
                raise InvalidArgument(f"{name} must be finite and >= 0, got {v}")
        if not (0.0 <= self.eta_detector <= 1.0):
            raise InvalidArgument(f"eta_detector must lie in [0, 1], got {self.eta_detector}")

    def effective_delays(self) -> tuple[float, float]:
        """Per-direction delays including the troposphere contribution."""
        extra = TROPOSPHERE_DELAY_S_PER_KM * self.distance_km if self.troposphere_enabled else 0.0
        return self.delay_ab + extra, self.delay_ba + extra


@dataclass(frozen=True)
class ExchangeRecord:
    """Timestamp quartet of one two-way exchange, in each clock's own timescale."""

    t1: float  # A transmits
    t2: float  # B receives
    t3: float  # B transmits
    t4: float  # A receives

    def __post_init__(self):
        for name in ("t1", "t2", "t3", "t4"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgument(f"timestamp {name} must be finite")
        if self.t4 < self.t1:
            raise InvalidArgument("A must receive after transmitting (t4 >= t1)")
        if self.t3 < self.t2:
            raise InvalidArgument("B must reply after receiving (t3 >= t2)")


def default_leo_geometry(wavelength: float = 1.56e-6, aperture_radius: float = 0.3,
                         match_distance_km: float = 100.0) -> GeometricParams:
    """Telescope geometry preset for a typical LEO inter-satellite link.

    The waist is chosen so the diffraction-limited divergence spreads the
    beam to the aperture radius at the matching distance.  This preset is
    adjustable bookkeeping, not a calibrated reproduction of any reported
    link budget.
    """
    divergence = aperture_radius / (match_distance_km * 1e3)
    return GeometricParams(
        wavelength=wavelength,
        waist=wavelength / (math.pi * divergence),
        aperture_radius=aperture_radius,
    )


def _clock_error(clock: ClockModel, tau0: float, seed: int) -> float:
    """Phase deviation accumulated by the clock over one tau0 window."""
    return float(sample_clock(clock, 2, tau0, seed).samples[1])


def simulate_exchange(
    clock_a: ClockModel,
    clock_b: ClockModel,
    link: LinkModel,
    true_offset: float,
    seed: int = 0,
    *,
    tau0: float = 1.0,
    measurement_sigma: float = 0.0,
    turnaround: float = 1e-3,
    start_time: float = 0.0,
) -> ExchangeRecord:
    """One two-way exchange; B's clock leads A's by true_offset seconds.

    Each clock's timestamps carry its own sampled phase error (one noise
    draw per clock, constant over the sub-second exchange) and every
    timestamp is perturbed by the measurement deviation.  turnaround is
    B's receive-to-reply processing time.
    """
    if not math.isfinite(true_offset):
        raise InvalidArgument("true_offset must be finite")
    if turnaround < 0.0:
        raise InvalidArgument(f"turnaround must be >= 0, got {turnaround}")
    d_ab, d_ba = link.effective_delays()
    xa = _clock_error(clock_a, tau0, derive_seed(seed, 1))
    xb = _clock_error(clock_b, tau0, derive_seed(seed, 2))
    if measurement_sigma > 0.0:
        eps = np.random.default_rng(derive_seed(seed, 3)).normal(0.0, measurement_sigma, 4)
    else:
        eps = np.zeros(4)
    time_b_rx = start_time + d_ab
    time_b_tx = time_b_rx + turnaround
    return ExchangeRecord(
        t1=start_time + xa + eps[0],
        t2=time_b_rx + true_offset + xb + eps[1],
        t3=time_b_tx + true_offset + xb + eps[2],
        t4=time_b_tx + d_ba + xa + eps[3],
    )


def two_way_offset(record: ExchangeRecord) -> float:
    """Clock offset estimate ((t2 - t1) - (t4 - t3)) / 2.

    Exact for reciprocal delays; a directional asymmetry delta biases the
    estimate by delta/2 regardless of the common delay.
    """
    return ((record.t2 - record.t1) - (record.t4 - record.t3)) / 2.0


def one_way_offset(record: ExchangeRecord, assumed_delay: float) -> float:
    """Clock offset from the forward leg alone, (t2 - t1) - assumed_delay.

    Any unmodeled path delay (e.g. the troposphere) lands directly in the
    estimate.
    """
    if not math.isfinite(assumed_delay):
        raise InvalidArgument("assumed_delay must be finite")
    return (record.t2 - record.t1) - assumed_delay


def link_efficiency(link: LinkModel, seed: int = 0) -> float:
    """Sample the composite transmissivity (geometry x pointing x detector).

    Geometric collection is the encircled power of the diffracted
    Gaussian beam on the receive aperture; pointing jitter tilts the
    beam by a Gaussian angle and attenuates by exp(-2 theta^2/theta_div^2).
    Deterministic when pointing_sigma is zero.
    """
    g = link.geometric
    if g is None:
        raise InvalidArgument("link_efficiency requires the link's geometric parameters")
    distance_m = link.distance_km * 1e3
    rayleigh = math.pi * g.waist**2 / g.wavelength
    beam_radius = g.waist * math.sqrt(1.0 + (distance_m / rayleigh) ** 2)
    eta_geo = 1.0 - math.exp(-2.0 * g.aperture_radius**2 / beam_radius**2)
    pointing = 1.0
    if link.pointing_sigma > 0.0:
        divergence = g.wavelength / (math.pi * g.waist)
        theta = np.random.default_rng(seed).normal(0.0, link.pointing_sigma)
        pointing = math.exp(-2.0 * theta**2 / divergence**2)
    return eta_geo * pointing * link.eta_detector


@dataclass(frozen=True)
class SyncCampaign:
    """Configuration of a repeated-exchange synchronization run."""

    clock_a: ClockModel
    clock_b: ClockModel
    link: LinkModel
    interval: float = 1.0
    true_offset: float = 0.0
    estimator: Optional[EstimatorModel] = None
    turnaround: float = 1e-3

    def __post_init__(self):
        if not math.isfinite(self.interval) or self.interval <= 0.0:
            raise InvalidArgument(f"interval must be positive, got {self.interval}")
        if not math.isfinite(self.true_offset):
            raise InvalidArgument("true_offset must be finite")
        if self.turnaround < 0.0:
            raise InvalidArgument(f"turnaround must be >= 0, got {self.turnaround}")


@dataclass(frozen=True)
class CampaignResult:
    """Per-exchange estimates plus summary statistics of one campaign."""

    estimates: np.ndarray
    truth: float
    residuals: np.ndarray
    mean_offset: float
    sigma_delta_t: float
    tdev_curve: StabilityCurve


def run_sync_campaign(config: SyncCampaign, trials: int, seed: int = 0) -> CampaignResult:
    """Run trials exchanges spaced config.interval apart and analyze residuals.

    Each clock's phase error evolves along one continuous sampled path;
    both timestamps a clock contributes within an exchange share its
    error at that epoch.  sigma_delta_t is the link's sigma_excess plus
    the sample deviation of (estimate - true_offset).
    """
    if trials < 100:
        raise InvalidArgument(f"trials must be >= 100, got {trials}")
    xa = sample_clock(config.clock_a, trials, config.interval, derive_seed(seed, 1)).samples
    xb = sample_clock(config.clock_b, trials, config.interval, derive_seed(seed, 2)).samples
    sigma_m = model_sigma(config.estimator) if config.estimator is not None else 0.0
    if sigma_m > 0.0:
        eps = np.random.default_rng(derive_seed(seed, 3)).normal(0.0, sigma_m, (trials, 4))
    else:
        eps = np.zeros((trials, 4))
    d_ab, d_ba = config.link.effective_delays()
    # Timestamps are taken relative to each exchange's start; the common
    # epoch cancels in both estimators and would otherwise quantize away
    # sub-femtosecond noise against coordinates of order 1e3 s.
    t1 = xa + eps[:, 0]
    t2 = d_ab + config.true_offset + xb + eps[:, 1]
    t3 = d_ab + config.turnaround + config.true_offset + xb + eps[:, 2]
    t4 = d_ab + config.turnaround + d_ba + xa + eps[:, 3]
    estimates = ((t2 - t1) - (t4 - t3)) / 2.0
    residuals = estimates - config.true_offset
    residual_series = TimeSeriesX(config.interval, residuals)
    curve = stability_curve(
        y_from_x(residual_series),
        octave_m_values(trials - 1, Variant.TDEV),
        Variant.TDEV,
    )
    return CampaignResult(
        estimates=estimates,
        truth=config.true_offset,
        residuals=residuals,
        mean_offset=float(estimates.mean()),
        sigma_delta_t=config.link.sigma_excess + float(residuals.std(ddof=1)),
        tdev_curve=curve,
    )


@dataclass(frozen=True)
class AdvantageReport:
    """Classical-vs-squeezed comparison over one link."""

    eta_total: float
    sigma_classical: float
    sigma_quantum: float
    advantage_ratio: float
    required_db_for_2x: Optional[float]

    @property
    def two_x_attainable(self) -> bool:
        return self.required_db_for_2x is not None


def advantage_report(link: LinkModel, model: EstimatorModel) -> AdvantageReport:
    """Deterministic link-budget summary of the squeezing advantage.

    eta_total combines geometric collection (1 when no geometry is
    configured) with detector efficiency; pointing jitter is a sampling
    effect and enters only :func:`link_efficiency`.  The squeezed
    deviation is the classical one scaled by the loss-degraded variance
    sqrt(eta*exp(-2r) + 1 - eta).
    """
    if link.geometric is not None:
        zero_pointing = LinkModel(
            distance_km=link.distance_km,
            delay_ab=link.delay_ab,
            delay_ba=link.delay_ba,
            troposphere_enabled=link.troposphere_enabled,
            geometric=link.geometric,
            pointing_sigma=0.0,
            eta_detector=1.0,
        )
        eta_total = link_efficiency(zero_pointing) * link.eta_detector
    else:
        eta_total = link.eta_detector
    sigma_classical = model_sigma(replace(model, r=0.0))
    effective_variance = eta_total * math.exp(-2.0 * model.r) + (1.0 - eta_total)
    sigma_quantum = math.sqrt(effective_variance) * sigma_classical
    return AdvantageReport(
        eta_total=eta_total,
        sigma_classical=sigma_classical,
        sigma_quantum=sigma_quantum,
        advantage_ratio=sigma_classical / sigma_quantum,
        required_db_for_2x=required_squeezing(eta_total, 2.0),
    )
