import math

import numpy as np
import pytest

from spinmux import (
    HyperfineManifold,
    WireDrive,
    crosstalk_landscape,
    simulate_odmr,
    simulate_rabi,
    simulate_ramsey,
)
from spinmux import field_sample

from test_fields import demo_environment


class TestSimulateRabi:
    def test_resonant_pi_time(self):
        rabi = 7.5e6
        [p] = simulate_rabi(rabi, 0.0, [1.0 / (2 * rabi)])
        assert p == pytest.approx(1.0, abs=1e-12)

    def test_resonant_half_time(self):
        rabi = 7.5e6
        [p] = simulate_rabi(rabi, 0.0, [1.0 / (4 * rabi)])
        assert p == pytest.approx(0.5, abs=1e-12)

    def test_detuned_contrast_is_half_at_delta_equal_rabi(self):
        rabi = 4e6
        peak_time = 1.0 / (2.0 * math.sqrt(2.0) * rabi)
        times = np.linspace(0.0, 1e-6, 400)
        pops = simulate_rabi(rabi, rabi, list(times) + [peak_time])
        assert np.max(pops) == pytest.approx(0.5, abs=1e-12)

    def test_matches_closed_form_on_resonance(self):
        rabi = 3e6
        times = np.linspace(0.0, 5e-7, 101)
        pops = simulate_rabi(rabi, 0.0, times)
        expected = np.sin(math.pi * rabi * times) ** 2
        assert np.max(np.abs(pops - expected)) <= 1e-10


class TestSimulateRamsey:
    def test_starts_at_unity(self):
        [s] = simulate_ramsey(3e6, HyperfineManifold.triplet(), 1.7e-6, [0.0])
        assert s == 1.0

    def test_pure_cosine_when_manifold_disabled(self):
        taus = np.linspace(0.0, 4e-6, 101)
        sig = simulate_ramsey(1e6, HyperfineManifold.disabled(), math.inf, taus)
        assert np.max(np.abs(sig - np.cos(2 * math.pi * 1e6 * taus))) <= 1e-12

    def test_triplet_beat_spectrum(self):
        # oracle: DFT of the generated signal; peaks at |3 -+ 2.2| and 3+2.2 MHz
        taus = np.linspace(0.0, 8e-6, 800, endpoint=False)
        sig = simulate_ramsey(3e6, HyperfineManifold.triplet(), 1.7e-6, taus)
        spectrum = np.abs(np.fft.rfft(sig))
        freqs = np.fft.rfftfreq(len(taus), d=taus[1] - taus[0])
        bin_width = freqs[1] - freqs[0]
        local_max = [k for k in range(1, len(spectrum) - 1)
                     if spectrum[k] > spectrum[k - 1]
                     and spectrum[k] >= spectrum[k + 1]]
        top = sorted(sorted(local_max, key=lambda k: spectrum[k])[-3:])
        found = [freqs[k] for k in top]
        for expect, got in zip([0.8e6, 3.0e6, 5.2e6], found):
            assert abs(got - expect) <= bin_width

    def test_envelope_decay_constant(self):
        from scipy.optimize import curve_fit

        taus = np.linspace(0.0, 8e-6, 800)
        sig = simulate_ramsey(3e6, HyperfineManifold.triplet(), 1.7e-6, taus)

        def model(tau, amp, t2s):
            beat = np.mean(np.cos(2 * math.pi * np.outer(tau, [0.8e6, 3e6, 5.2e6])),
                           axis=1)
            return amp * beat * np.exp(-tau / t2s)

        popt, _ = curve_fit(model, taus, sig, p0=[0.9, 1.0e-6])
        assert popt[1] == pytest.approx(1.7e-6, rel=0.05)

    def test_rejects_nonpositive_t2star(self):
        with pytest.raises(ValueError):
            simulate_ramsey(1e6, HyperfineManifold.triplet(), 0.0, [1e-6])


class TestSimulateOdmr:
    def setup_method(self):
        self.env = demo_environment()
        self.drive = WireDrive(i_dc=0.0, i_ac=1e-3)
        from spinmux import SpinSite

        self.site = SpinSite(id="s", position=np.array([0.5e-6, 0.0, 0.0]))
        self.omega = field_sample(self.env, self.drive, self.site).omega_plus

    def scan(self, halfwidth=6e6, points=241):
        return self.omega + np.linspace(-halfwidth, halfwidth, points)

    def test_contrast_peaks_on_resonance(self):
        scan = self.scan()
        contrast = simulate_odmr(self.env, self.drive, [self.site], 2e5, scan,
                                 linewidth_floor=0.0)
        assert np.argmax(contrast) == len(scan) // 2

    def _count_peaks(self, contrast):
        threshold = 0.5 * contrast.max()
        return sum(
            1 for k in range(1, len(contrast) - 1)
            if contrast[k] >= threshold
            and contrast[k] > contrast[k - 1] and contrast[k] >= contrast[k + 1]
        )

    def test_weak_probe_resolves_triplet(self):
        contrast = simulate_odmr(self.env, self.drive, [self.site], 2e5,
                                 self.scan(), linewidth_floor=0.0)
        assert self._count_peaks(contrast) == 3

    def test_strong_probe_merges_triplet(self):
        contrast = simulate_odmr(self.env, self.drive, [self.site], 1e7,
                                 self.scan(), linewidth_floor=0.0)
        assert self._count_peaks(contrast) == 1

    def test_matches_explicit_triplet_sum(self):
        # oracle: rebuild the spectrum by averaging the three detuned line
        # responses (and the far lower transition) by hand
        from spinmux.experiments import _flip_population

        scan = self.scan(points=61)
        contrast = simulate_odmr(self.env, self.drive, [self.site], 2e5, scan,
                                 linewidth_floor=0.0)
        omega_minus = 2 * self.env.constants.d_zfs - self.omega
        duration = 1.0 / (2 * 2e5)
        expected = []
        for omega_mw in scan:
            acc = []
            for center in (self.omega, omega_minus):
                for off in (-2.2e6, 0.0, 2.2e6):
                    acc.append(_flip_population(2e5, center + off - omega_mw,
                                                duration))
            expected.append(np.mean(acc))
        assert np.max(np.abs(contrast - np.asarray(expected))) <= 1e-12

    def test_linewidth_floor_smooths(self):
        scan = self.scan()
        sharp = simulate_odmr(self.env, self.drive, [self.site], 2e5, scan, 0.0)
        smooth = simulate_odmr(self.env, self.drive, [self.site], 2e5, scan, 2e5)
        assert smooth.max() < sharp.max()
        assert self._count_peaks(smooth) == 3  # 0.2 MHz floor keeps the triplet

    def test_empty_scan_rejected(self):
        with pytest.raises(ValueError):
            simulate_odmr(self.env, self.drive, [self.site], 2e5, [], 0.0)


class TestCrosstalkLandscape:
    def grid(self):
        return [np.array([u, 0.0, 0.0]) for u in np.linspace(-4e-6, 4e-6, 33)]

    def test_target_point_is_fully_flipped(self):
        env = demo_environment()
        report = crosstalk_landscape(env, 0.15, 1.5e-6, 1e7, self.grid())
        by_u = {round(p[0] * 1e6, 2): e
                for p, e in zip(self.grid(), report.entries)}
        assert by_u[1.5].epsilon == pytest.approx(1.0, abs=1e-10)
        assert by_u[1.5].detuning == pytest.approx(0.0, abs=1e-6)

    def test_without_gradient_error_stays_large_far_away(self):
        env = demo_environment()
        report = crosstalk_landscape(env, 0.0, 1.5e-6, 1e7, self.grid())
        by_u = {round(p[0] * 1e6, 2): e
                for p, e in zip(self.grid(), report.entries)}
        assert by_u[-3.5].epsilon > 0.5

    def test_with_gradient_error_collapses_within_microns(self):
        env = demo_environment()
        report = crosstalk_landscape(env, 0.15, 1.5e-6, 1e7, self.grid())
        for pos, entry in zip(self.grid(), report.entries):
            if abs(pos[0] - 1.5e-6) >= 3e-6:
                assert entry.epsilon < 0.01

    def test_simulated_error_never_beats_the_bound(self):
        env = demo_environment()
        report = crosstalk_landscape(env, 0.15, 1.5e-6, 1e7, self.grid())
        for entry in report.entries:
            assert entry.epsilon <= entry.bound + 1e-12
