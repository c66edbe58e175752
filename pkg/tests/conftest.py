"""Shared fixtures.

The expensive pieces (the 25-pair charge-transfer table, the tilted-lens
battery, the full fig5 preset run) are session-scoped and shared between
the module tests and the acceptance suite.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import pytest

import vortexmix as vm

# geometry for the tilted-lens oracle-equivalence battery: a collimated
# waist at the lens, one wavelength, conversion parameter near 1
STRIPE_CAL = dict(n=1024, extent_mm=16.0, waist_mm=1.0, wavelength_nm=780.0,
                  focal_m=0.5, tilt_deg=28.65)


def stripe_cal_field(ell: int) -> vm.ComplexField:
    grid = vm.make_grid(STRIPE_CAL["n"], STRIPE_CAL["extent_mm"])
    spec = vm.BeamSpec(STRIPE_CAL["waist_mm"], STRIPE_CAL["wavelength_nm"], ell=ell)
    if ell == 0:
        return vm.gaussian(grid, vm.BeamSpec(STRIPE_CAL["waist_mm"],
                                             STRIPE_CAL["wavelength_nm"]))
    return vm.lg_mode(grid, spec)


def stripe_cal_lens() -> vm.LensSpec:
    return vm.LensSpec(STRIPE_CAL["focal_m"], STRIPE_CAL["tilt_deg"])


@pytest.fixture(scope="session")
def stripe_battery():
    """Astigmatic-focus images for LG charges -3..3 plus timings."""
    lens = stripe_cal_lens()
    images = {}
    timings = {}
    for ell in range(-3, 4):
        start = time.perf_counter()
        field = stripe_cal_field(ell)
        images[ell] = vm.astigmatic_focus_image(field, lens)
        timings[ell] = time.perf_counter() - start
    return {"images": images, "timings": timings, "lens": lens}


@dataclass
class ChargeTableEntry:
    blue_charge: int
    ir_fwm_charge: int
    ir_swm_charge: int


@pytest.fixture(scope="session")
def charge_table():
    """Generated-field charges for every pump pair in {-2..2}^2.

    Pumps are gaussians converted by eight-octant staircase masks (the
    hardware model), with the 776 nm mask rotated half an octant.
    ``blue_seconds`` times the blue-field generation and measurement only.
    """
    grid = vm.make_grid(512, 16.0)
    base780 = vm.gaussian(grid, vm.BeamSpec(2.0, 780.0))
    base776 = vm.gaussian(grid, vm.BeamSpec(1.0, 776.0))

    def pump(base, ell, rotation):
        if ell == 0:
            return base
        mask = vm.MaskModel.octants(ell, rotation_deg=rotation)
        return vm.apply_spiral_mask(base, mask)

    table = {}
    blue_seconds = 0.0
    for l780 in range(-2, 3):
        for l776 in range(-2, 3):
            p780 = pump(base780, l780, 0.0)
            p776 = pump(base776, l776, 22.5)
            start = time.perf_counter()
            fwm = vm.MixingScenario(p780, p776, hypothesis="fwm")
            blue = vm.generate_blue(fwm)
            blue_charge = vm.dominant_charge(blue)
            blue_seconds += time.perf_counter() - start
            ir_fwm = vm.dominant_charge(vm.generate_ir(fwm))
            swm = vm.MixingScenario(p780, p776, hypothesis="swm")
            ir_swm = vm.dominant_charge(vm.generate_ir(swm))
            table[(l780, l776)] = ChargeTableEntry(blue_charge, ir_fwm, ir_swm)
    return {"table": table, "blue_seconds": blue_seconds, "grid": grid}


@pytest.fixture(scope="session")
def fig5_run(tmp_path_factory):
    """Full fig5 preset executed once, with artifacts on disk."""
    out = tmp_path_factory.mktemp("fig5")
    report = vm.run_scenario(vm.preset("fig5"), out)
    return report, out
