import math

import numpy as np
import pytest

from combsync.clockmodel import ClockModel
from combsync.errors import InvalidArgument
from combsync.noisegen import NoiseKind, NoiseSpec
from combsync.quantum import EstimatorMethod, EstimatorModel, r_from_db
from combsync.stability import fit_slope
from combsync.synclink import (
    AdvantageReport,
    ExchangeRecord,
    GeometricParams,
    LinkModel,
    SyncCampaign,
    advantage_report,
    default_leo_geometry,
    link_efficiency,
    one_way_offset,
    run_sync_campaign,
    simulate_exchange,
    two_way_offset,
)

C_KM_PER_S = 299792.458


def quiet_clock():
    return ClockModel(nu0=1.94e14)


def symmetric_link(delay, **kwargs):
    return LinkModel(distance_km=100.0, delay_ab=delay, delay_ba=delay, **kwargs)


def tm_estimator(n=100.0, r=0.0):
    return EstimatorModel(EstimatorMethod.TEMPORAL_MODE, n=n, nu0=1.92e14, t0=1e-14, r=r)


class TestSimulateExchange:
    def test_symmetric_noiseless_bookkeeping(self):
        d, offset = 100.0 / C_KM_PER_S, 4.2e-6
        rec = simulate_exchange(quiet_clock(), quiet_clock(), symmetric_link(d), offset, seed=1)
        assert rec.t2 - rec.t1 == pytest.approx(d + offset, rel=1e-15)
        assert rec.t4 - rec.t3 == pytest.approx(d - offset, rel=1e-15)

    def test_zero_delay_zero_offset(self):
        rec = simulate_exchange(quiet_clock(), quiet_clock(), symmetric_link(0.0), 0.0, seed=2)
        assert rec.t1 == rec.t2
        assert rec.t3 == rec.t4

    def test_troposphere_adds_one_ns_per_km_each_way(self):
        link_dry = symmetric_link(0.0)
        link_wet = symmetric_link(0.0, troposphere_enabled=True)
        dry = simulate_exchange(quiet_clock(), quiet_clock(), link_dry, 0.0, seed=3)
        wet = simulate_exchange(quiet_clock(), quiet_clock(), link_wet, 0.0, seed=3)
        assert (wet.t2 - wet.t1) - (dry.t2 - dry.t1) == pytest.approx(100e-9, abs=1e-18)
        assert (wet.t4 - wet.t3) - (dry.t4 - dry.t3) == pytest.approx(100e-9, abs=1e-18)

    def test_deterministic_per_seed(self):
        clock = ClockModel(nu0=1e14, noise=(NoiseSpec(NoiseKind.WHITE_FM, 1e-24, seed=3),))
        recs = [
            simulate_exchange(clock, quiet_clock(), symmetric_link(1e-3), 1e-6, seed=12,
                              measurement_sigma=1e-15)
            for _ in range(2)
        ]
        assert recs[0] == recs[1]

    def test_record_ordering_enforced(self):
        with pytest.raises(InvalidArgument):
            ExchangeRecord(t1=1.0, t2=0.5, t3=0.4, t4=2.0)
        with pytest.raises(InvalidArgument):
            ExchangeRecord(t1=1.0, t2=1.1, t3=1.2, t4=0.9)


class TestTwoWayOffset:
    def test_symmetric_recovery_random_batch(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            d = float(rng.uniform(1e-5, 1e-2))
            offset = float(rng.uniform(-1e-3, 1e-3))
            rec = simulate_exchange(quiet_clock(), quiet_clock(), symmetric_link(d), offset, seed=5)
            assert abs(two_way_offset(rec) - offset) < 1e-15

    def test_asymmetry_bias_is_half_delta(self):
        delta = 1e-9
        link = LinkModel(distance_km=10.0, delay_ab=1e-3 + delta, delay_ba=1e-3)
        rec = simulate_exchange(quiet_clock(), quiet_clock(), link, 0.0, seed=6)
        assert two_way_offset(rec) == pytest.approx(delta / 2.0, abs=1e-17)

    def test_bias_independent_of_common_delay(self):
        delta = 2e-9
        biases = []
        for common in (1e-5, 1e-3, 1e-1):
            link = LinkModel(distance_km=10.0, delay_ab=common + delta, delay_ba=common)
            rec = simulate_exchange(quiet_clock(), quiet_clock(), link, 3e-7, seed=7)
            biases.append(two_way_offset(rec) - 3e-7)
        assert max(biases) - min(biases) < 1e-17
        assert biases[0] == pytest.approx(delta / 2.0, abs=1e-17)

    def test_zero_everything(self):
        rec = simulate_exchange(quiet_clock(), quiet_clock(), symmetric_link(0.0), 0.0, seed=8)
        assert two_way_offset(rec) == 0.0


class TestOneWayOffset:
    def test_known_delay_recovers_offset(self):
        d, offset = 2.5e-3, -7e-7
        rec = simulate_exchange(quiet_clock(), quiet_clock(), symmetric_link(d), offset, seed=9)
        assert one_way_offset(rec, d) == pytest.approx(offset, abs=1e-18)

    def test_unmodeled_troposphere_error(self):
        d = 100.0 / C_KM_PER_S
        link = symmetric_link(d, troposphere_enabled=True)
        rec = simulate_exchange(quiet_clock(), quiet_clock(), link, 0.0, seed=10)
        assert one_way_offset(rec, d) == pytest.approx(100e-9, rel=1e-9)

    def test_zero_assumed_zero_true_delay(self):
        offset = 5.5e-8
        rec = simulate_exchange(quiet_clock(), quiet_clock(), symmetric_link(0.0), offset, seed=11)
        assert one_way_offset(rec, 0.0) == pytest.approx(offset, abs=1e-18)

    def test_agrees_with_two_way_when_delays_known(self):
        d, offset = 3.3e-4, 1.1e-6
        rec = simulate_exchange(quiet_clock(), quiet_clock(), symmetric_link(d), offset, seed=12)
        assert one_way_offset(rec, d) == pytest.approx(two_way_offset(rec), abs=1e-17)


class TestLinkEfficiency:
    def test_full_collection_limit(self):
        geometry = GeometricParams(wavelength=1.56e-6, waist=0.05, aperture_radius=100.0)
        link = LinkModel(distance_km=1.0, delay_ab=0.0, delay_ba=0.0, geometric=geometry)
        assert link_efficiency(link, seed=0) == 1.0

    def test_deterministic_without_pointing(self):
        link = symmetric_link(0.0, geometric=default_leo_geometry())
        assert link_efficiency(link, seed=1) == link_efficiency(link, seed=2)

    def test_requires_geometry(self):
        with pytest.raises(InvalidArgument):
            link_efficiency(symmetric_link(0.0), seed=0)

    def test_mean_decreases_with_pointing_jitter(self):
        divergence = 1.56e-6 / (math.pi * default_leo_geometry().waist)
        means = []
        for sigma in (0.2 * divergence, 0.5 * divergence, 1.0 * divergence):
            link = symmetric_link(0.0, geometric=default_leo_geometry(), pointing_sigma=sigma)
            samples = [link_efficiency(link, seed=s) for s in range(10_000)]
            means.append(np.mean(samples))
        assert means[0] > means[1] > means[2]

    def test_monotone_in_distance(self):
        geometry = default_leo_geometry()
        etas = []
        for km in (10.0, 50.0, 100.0, 300.0, 1000.0):
            link = LinkModel(distance_km=km, delay_ab=0.0, delay_ba=0.0, geometric=geometry)
            eta = link_efficiency(link)
            assert 0.0 <= eta <= 1.0
            etas.append(eta)
        assert all(b <= a for a, b in zip(etas, etas[1:]))

    def test_detector_efficiency_multiplies(self):
        geometry = default_leo_geometry()
        base = LinkModel(distance_km=100.0, delay_ab=0.0, delay_ba=0.0, geometric=geometry)
        scaled = LinkModel(distance_km=100.0, delay_ab=0.0, delay_ba=0.0, geometric=geometry,
                           eta_detector=0.9)
        assert link_efficiency(scaled) == pytest.approx(0.9 * link_efficiency(base), rel=1e-12)


class TestRunSyncCampaign:
    def test_noiseless_symmetric_sigma_is_excess_exactly(self):
        link = symmetric_link(1e-3, sigma_excess=3.5e-12)
        campaign = SyncCampaign(clock_a=quiet_clock(), clock_b=quiet_clock(), link=link,
                                true_offset=1e-6)
        result = run_sync_campaign(campaign, 500, seed=1)
        assert result.sigma_delta_t == 3.5e-12
        assert result.mean_offset == pytest.approx(1e-6, abs=1e-18)
        assert all(p.value == 0.0 for p in result.tdev_curve.points)

    def test_white_pm_clocks_give_white_noise_floor(self):
        clocks = [
            ClockModel(nu0=1.94e14, noise=(NoiseSpec(NoiseKind.WHITE_PM, 1e-24, seed=s),))
            for s in (1, 2)
        ]
        campaign = SyncCampaign(clock_a=clocks[0], clock_b=clocks[1],
                                link=symmetric_link(1e-3), estimator=tm_estimator())
        result = run_sync_campaign(campaign, 4096, seed=3)
        assert fit_slope(result.tdev_curve, (1.0, 128.0)) == pytest.approx(-0.5, abs=0.15)

    def test_doubling_photons_shrinks_sigma_by_sqrt2(self):
        link = symmetric_link(1e-3)
        base = SyncCampaign(clock_a=quiet_clock(), clock_b=quiet_clock(), link=link,
                            estimator=tm_estimator(n=100.0))
        double = SyncCampaign(clock_a=quiet_clock(), clock_b=quiet_clock(), link=link,
                              estimator=tm_estimator(n=200.0))
        r1 = run_sync_campaign(base, 2000, seed=4)
        r2 = run_sync_campaign(double, 2000, seed=4)
        assert r1.sigma_delta_t / r2.sigma_delta_t == pytest.approx(math.sqrt(2.0), rel=0.1)

    def test_squeezing_never_hurts(self):
        link = symmetric_link(1e-3)
        classical = SyncCampaign(clock_a=quiet_clock(), clock_b=quiet_clock(), link=link,
                                 estimator=tm_estimator(n=50.0))
        squeezed = SyncCampaign(clock_a=quiet_clock(), clock_b=quiet_clock(), link=link,
                                estimator=tm_estimator(n=50.0, r=1.0))
        r0 = run_sync_campaign(classical, 1000, seed=5)
        r1 = run_sync_campaign(squeezed, 1000, seed=5)
        assert r1.sigma_delta_t <= r0.sigma_delta_t

    def test_rejects_too_few_trials(self):
        campaign = SyncCampaign(clock_a=quiet_clock(), clock_b=quiet_clock(),
                                link=symmetric_link(1e-3))
        with pytest.raises(InvalidArgument):
            run_sync_campaign(campaign, 99)

    def test_residuals_shape_and_truth(self):
        campaign = SyncCampaign(clock_a=quiet_clock(), clock_b=quiet_clock(),
                                link=symmetric_link(1e-3), true_offset=2e-6,
                                estimator=tm_estimator())
        result = run_sync_campaign(campaign, 256, seed=6)
        assert result.truth == 2e-6
        assert result.estimates.shape == result.residuals.shape == (256,)
        np.testing.assert_allclose(result.residuals, result.estimates - 2e-6, atol=0.0)


class TestAdvantageReport:
    def test_unit_efficiency_two_x(self):
        link = LinkModel(distance_km=100.0, delay_ab=1e-3, delay_ba=1e-3, eta_detector=1.0)
        report = advantage_report(link, tm_estimator(r=r_from_db(10.0 * math.log10(4.0))))
        assert report.eta_total == 1.0
        assert report.advantage_ratio == pytest.approx(2.0, rel=1e-12)
        assert report.required_db_for_2x == pytest.approx(10.0 * math.log10(4.0), rel=1e-12)

    def test_half_efficiency_caps_at_sqrt2(self):
        link = LinkModel(distance_km=100.0, delay_ab=1e-3, delay_ba=1e-3, eta_detector=0.5)
        report = advantage_report(link, tm_estimator(r=20.0))
        assert report.advantage_ratio == pytest.approx(math.sqrt(2.0), rel=1e-8)
        assert report.required_db_for_2x is None
        assert not report.two_x_attainable

    def test_classical_baseline_ratio_is_one(self):
        link = LinkModel(distance_km=100.0, delay_ab=1e-3, delay_ba=1e-3)
        report = advantage_report(link, tm_estimator(r=0.0))
        assert report.advantage_ratio == 1.0
        assert report.sigma_quantum == report.sigma_classical

    def test_geometry_feeds_eta_total(self):
        geometry = default_leo_geometry()
        link = LinkModel(distance_km=100.0, delay_ab=1e-3, delay_ba=1e-3,
                         geometric=geometry, eta_detector=0.9, pointing_sigma=1e-6)
        report = advantage_report(link, tm_estimator(r=1.0))
        bare = LinkModel(distance_km=100.0, delay_ab=1e-3, delay_ba=1e-3, geometric=geometry)
        assert report.eta_total == pytest.approx(0.9 * link_efficiency(bare), rel=1e-12)
        assert isinstance(report, AdvantageReport)
