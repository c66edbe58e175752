"""Charge analyzers and the hypothesis classifier."""

import numpy as np
import pytest

import vortexmix as vm
from vortexmix.errors import DegenerateImageError, NoSignalError, UnsignedVerdictError

from conftest import stripe_cal_field, stripe_cal_lens


GRID = vm.make_grid(512, 16.0)
W0 = 0.5


def lg(ell, wavelength=780.0):
    if ell == 0:
        return vm.gaussian(GRID, vm.BeamSpec(W0, wavelength))
    return vm.lg_mode(GRID, vm.BeamSpec(W0, wavelength, ell=ell))


class TestOamSpectrum:
    def test_pure_modes(self):
        assert vm.oam_spectrum(lg(1)).weight(1) >= 0.999
        assert vm.oam_spectrum(lg(0)).weight(0) >= 0.9999

    def test_masked_gaussian_staircase(self):
        grid = vm.make_grid(1024, 16.0)
        f = vm.apply_spiral_mask(vm.gaussian(grid, vm.BeamSpec(1.0, 780.0)),
                                 vm.MaskModel.octants(1))
        assert vm.oam_spectrum(f).weight(1) == pytest.approx(0.95, abs=0.01)

    def test_weights_bounded(self):
        spectrum = vm.oam_spectrum(lg(2))
        assert all(w >= 0 for w in spectrum.weights.values())
        assert spectrum.captured <= 1.0 + 1e-9

    def test_off_centre_rejected(self):
        amp = np.roll(lg(1).amp, GRID.n // 3, axis=1)
        shifted = vm.ComplexField(GRID, 780.0, amp)
        with pytest.raises(ValueError):
            vm.oam_spectrum(shifted)

    def test_small_shift_tolerated(self):
        amp = np.roll(lg(1).amp, 3, axis=0)
        shifted = vm.ComplexField(GRID, 780.0, amp)
        assert vm.oam_spectrum(shifted).weight(1) >= 0.99

    def test_max_order_validated(self):
        with pytest.raises(ValueError):
            vm.oam_spectrum(lg(1), max_order=0)


class TestDominantCharge:
    @pytest.mark.parametrize("ell", [-2, -1, 0, 1, 3])
    def test_pure_modes(self, ell):
        assert vm.dominant_charge(lg(ell)) == ell

    def test_tie_break_prefers_small_positive(self):
        # equal +1/-1 superposition has symmetric weights
        f = vm.ComplexField(GRID, 780.0, lg(1).amp + lg(-1).amp)
        assert vm.dominant_charge(f) == 1


class TestCentralDip:
    def test_vortex_core(self):
        # needs pitch << waist: the centre sample reads e*(pitch/w)^2 of peak
        grid = vm.make_grid(512, 8.0)
        f = vm.lg_mode(grid, vm.BeamSpec(1.0, 780.0, ell=1))
        assert vm.central_dip(vm.to_intensity(f)) < 1e-3

    def test_gaussian_peak(self):
        assert vm.central_dip(vm.to_intensity(lg(0))) >= 0.99

    def test_empty_image_rejected(self):
        img = vm.IntensityImage(GRID, np.zeros((GRID.n, GRID.n)))
        with pytest.raises(DegenerateImageError):
            vm.central_dip(img)

    def test_scale_invariance(self):
        img = vm.to_intensity(lg(1))
        scaled = vm.IntensityImage(GRID, img.vals * 137.0)
        assert vm.central_dip(scaled) == pytest.approx(vm.central_dip(img), rel=1e-12)


class TestSelfInterference:
    def test_spiral_counts(self):
        grid = vm.make_grid(1024, 16.0)
        for ell in (1, 2):
            f = vm.lg_mode(grid, vm.BeamSpec(W0, 780.0, ell=ell))
            verdict = vm.spiral_count(vm.self_interference(f))
            assert verdict.magnitude == ell

    def test_gaussian_gives_zero_arms(self):
        grid = vm.make_grid(1024, 16.0)
        f = vm.gaussian(grid, vm.BeamSpec(W0, 780.0))
        verdict = vm.spiral_count(vm.self_interference(f))
        assert verdict.magnitude == 0
        assert verdict.sign is None

    def test_opposite_charges_opposite_handedness(self):
        grid = vm.make_grid(1024, 16.0)
        plus = vm.spiral_count(vm.self_interference(
            vm.lg_mode(grid, vm.BeamSpec(W0, 780.0, ell=1))))
        minus = vm.spiral_count(vm.self_interference(
            vm.lg_mode(grid, vm.BeamSpec(W0, 780.0, ell=-1))))
        assert plus.sign == -minus.sign
        assert plus.sign == 1  # frozen calibration: +1 winds with the slope

    def test_visibility_at_defaults(self):
        grid = vm.make_grid(1024, 16.0)
        f = vm.lg_mode(grid, vm.BeamSpec(W0, 780.0, ell=1))
        img = vm.self_interference(f)
        # fringe modulation in the analysis band must be strong
        verdict = vm.spiral_count(img)
        assert verdict.confidence >= 0.8

    def test_parameter_validation(self):
        f = lg(1)
        with pytest.raises(ValueError):
            vm.self_interference(f, magnification=1.0)
        with pytest.raises(ValueError):
            vm.self_interference(f, ratio=0.0)
        with pytest.raises(ValueError):
            vm.self_interference(f, defocus_m=-1.0)

    def test_scale_invariance_of_count(self):
        grid = vm.make_grid(1024, 16.0)
        f = vm.lg_mode(grid, vm.BeamSpec(W0, 780.0, ell=2))
        img = vm.self_interference(f)
        scaled = vm.IntensityImage(grid, img.vals * 42.0)
        a = vm.spiral_count(img)
        b = vm.spiral_count(scaled)
        assert (a.magnitude, a.sign) == (b.magnitude, b.sign)
        assert a.confidence == pytest.approx(b.confidence, rel=1e-9)


class TestStripeCount:
    def test_counts_match_charge(self, stripe_battery):
        lens = stripe_battery["lens"]
        for ell in range(-3, 4):
            verdict = vm.stripe_count(stripe_battery["images"][ell], lens)
            assert verdict.magnitude == abs(ell)

    def test_signs_follow_charge(self, stripe_battery):
        lens = stripe_battery["lens"]
        for ell in (-3, -2, -1, 1, 2, 3):
            verdict = vm.stripe_count(stripe_battery["images"][ell], lens)
            assert verdict.sign == int(np.sign(ell))

    def test_zero_charge_sign_unknown(self, stripe_battery):
        verdict = vm.stripe_count(stripe_battery["images"][0], stripe_battery["lens"])
        assert verdict.magnitude == 0
        assert verdict.sign is None

    def test_noise_and_shift_invariance(self, stripe_battery):
        lens = stripe_battery["lens"]
        for ell in (-2, 1, 3):
            img = stripe_battery["images"][ell]
            noisy = vm.add_intensity_noise(img, 0.02, seed=99)
            rolled = vm.IntensityImage(img.grid,
                                       np.roll(noisy.vals, (3, -3), axis=(0, 1)))
            verdict = vm.stripe_count(rolled, lens)
            assert verdict.magnitude == abs(ell)
            assert verdict.sign == int(np.sign(ell))

    def test_scale_invariance(self, stripe_battery):
        lens = stripe_battery["lens"]
        img = stripe_battery["images"][2]
        scaled = vm.IntensityImage(img.grid, img.vals * 1e6)
        a = vm.stripe_count(img, lens)
        b = vm.stripe_count(scaled, lens)
        assert (a.magnitude, a.sign) == (b.magnitude, b.sign)
        assert a.confidence == pytest.approx(b.confidence, rel=1e-9)

    def test_needs_tilt(self, stripe_battery):
        with pytest.raises(ValueError):
            vm.stripe_count(stripe_battery["images"][1], vm.LensSpec(1.0, 0.0))

    def test_empty_image(self):
        img = vm.IntensityImage(GRID, np.zeros((GRID.n, GRID.n)))
        with pytest.raises(NoSignalError):
            vm.stripe_count(img, vm.LensSpec(1.0, 30.0))


class TestChargeVerdict:
    def test_signed_value(self):
        v = vm.ChargeVerdict(2, -1, 0.9, "spectrum")
        assert v.signed() == -2

    def test_zero_magnitude_signed(self):
        assert vm.ChargeVerdict(0, None, 1.0, "spectrum").signed() == 0

    def test_unsigned_nonzero_raises(self):
        v = vm.ChargeVerdict(1, None, 0.9, "tilted_lens")
        with pytest.raises(UnsignedVerdictError):
            v.signed()


def verdict(ell, method="spectrum", confidence=1.0):
    sign = None if ell == 0 else (1 if ell > 0 else -1)
    return vm.ChargeVerdict(abs(ell), sign, confidence, method)


class TestClassifyProcess:
    def test_known_cases(self):
        assert vm.classify_process({780: 0, 776: -1},
                                   verdict(-1), verdict(-1)).verdict == "fwm"
        assert vm.classify_process({780: 1, 776: 1},
                                   verdict(2), verdict(1)).verdict == "fwm"
        assert vm.classify_process({780: 1, 776: 1},
                                   verdict(2), verdict(0)).verdict == "swm"
        # hypotheses coincide when the 776 pump is plane
        assert vm.classify_process({780: 1, 776: 0},
                                   verdict(1), verdict(0)).verdict == "inconclusive"

    def test_neither_hypothesis_fits(self):
        out = vm.classify_process({780: 0, 776: 1}, verdict(2), verdict(1))
        assert out.verdict == "inconclusive"

    def test_global_sign_flip_symmetry(self):
        for l780 in range(-2, 3):
            for l776 in range(-2, 3):
                for ir_value in (l776, 0):
                    a = vm.classify_process(
                        {780: l780, 776: l776},
                        verdict(l780 + l776), verdict(ir_value))
                    b = vm.classify_process(
                        {780: -l780, 776: -l776},
                        verdict(-(l780 + l776)), verdict(-ir_value))
                    assert a.verdict == b.verdict

    def test_zero_confidence_rejected(self):
        with pytest.raises(ValueError):
            vm.classify_process({780: 0, 776: 1}, verdict(1, confidence=0.0),
                                verdict(1))

    def test_unsigned_measurement_rejected(self):
        bad = vm.ChargeVerdict(1, None, 0.9, "tilted_lens")
        with pytest.raises(UnsignedVerdictError):
            vm.classify_process({780: 0, 776: 1}, bad, verdict(1))

    def test_supporting_rows(self):
        out = vm.classify_process({780: 1, 776: 1}, verdict(2), verdict(1))
        names = [row[0] for row in out.supporting]
        assert names == ["blue", "ir"]


class TestNoiseHelper:
    def test_deterministic(self):
        img = vm.to_intensity(lg(1))
        a = vm.add_intensity_noise(img, 0.02, seed=5)
        b = vm.add_intensity_noise(img, 0.02, seed=5)
        assert np.array_equal(a.vals, b.vals)

    def test_bounded(self):
        img = vm.to_intensity(lg(1))
        noisy = vm.add_intensity_noise(img, 0.02, seed=5)
        delta = noisy.vals - img.vals
        assert delta.min() >= 0.0
        assert delta.max() <= 0.02 * img.vals.max()

    def test_zero_amplitude_is_identity(self):
        img = vm.to_intensity(lg(1))
        assert vm.add_intensity_noise(img, 0.0, seed=5) is img
