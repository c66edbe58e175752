"""Pump-beam synthesis and phase-element transforms.

Gaussian and Laguerre-Gaussian modes at their waist plane, spiral phase
masks (continuous ramp or N-step staircase), conical (axicon) phase, and
magnified reference copies.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.special import eval_genlaguerre

from .field import ComplexField, GridSpec, normalize_power

__all__ = [
    "BeamSpec",
    "MaskModel",
    "gaussian",
    "lg_mode",
    "apply_spiral_mask",
    "apply_axicon",
    "magnify",
]


@dataclass(frozen=True)
class BeamSpec:
    """Beam at its waist: 1/e amplitude radius ``waist_mm``, charge ``ell``."""

    waist_mm: float
    wavelength_nm: float
    ell: int = 0
    radial_index: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.waist_mm) and self.waist_mm > 0):
            raise ValueError(f"waist_mm must be positive, got {self.waist_mm}")
        if self.radial_index < 0:
            raise ValueError(f"radial_index must be >= 0, got {self.radial_index}")
        if self.ell != int(self.ell):
            raise ValueError(f"ell must be an integer, got {self.ell!r}")


@dataclass(frozen=True)
class MaskModel:
    """Spiral phase mask of charge ``charge``.

    ``steps=None`` is the continuous azimuthal ramp; ``steps=N`` is the
    N-step staircase (the physical device is an eight-octant plate).
    ``rotation_deg`` rotates the mask about the beam axis.
    """

    charge: int
    steps: int | None = None
    rotation_deg: float = 0.0

    def __post_init__(self):
        if self.charge == 0:
            raise ValueError("mask charge must be nonzero")
        if self.steps is not None and self.steps < 2:
            raise ValueError(f"staircase mask needs >= 2 steps, got {self.steps}")

    @classmethod
    def ideal(cls, charge: int, rotation_deg: float = 0.0) -> "MaskModel":
        return cls(charge=charge, steps=None, rotation_deg=rotation_deg)

    @classmethod
    def octants(cls, charge: int, steps: int = 8, rotation_deg: float = 0.0) -> "MaskModel":
        return cls(charge=charge, steps=steps, rotation_deg=rotation_deg)


def _check_window(grid: GridSpec, waist_mm: float) -> None:
    if grid.extent_mm < 6.0 * waist_mm:
        warnings.warn(
            f"grid extent {grid.extent_mm} mm is below 6 waists "
            f"({6.0 * waist_mm} mm); expect truncation artifacts",
            stacklevel=3,
        )


def gaussian(grid: GridSpec, spec: BeamSpec) -> ComplexField:
    """Unit-power fundamental Gaussian exp(-r^2/w^2) with flat phase."""
    if spec.ell != 0:
        raise ValueError(f"gaussian requires ell=0, got {spec.ell}; use lg_mode")
    _check_window(grid, spec.waist_mm)
    r2 = grid.radius_mm() ** 2
    amp = np.exp(-r2 / spec.waist_mm**2).astype(np.complex128)
    return normalize_power(ComplexField(grid, spec.wavelength_nm, amp), 1.0)


def lg_mode(grid: GridSpec, spec: BeamSpec) -> ComplexField:
    """Unit-power Laguerre-Gaussian mode LG(p, ell) at its waist plane."""
    _check_window(grid, spec.waist_mm)
    w = spec.waist_mm
    ell = int(spec.ell)
    p = int(spec.radial_index)
    r = grid.radius_mm()
    rho2 = 2.0 * r**2 / w**2
    radial = (np.sqrt(rho2)) ** abs(ell) * eval_genlaguerre(p, abs(ell), rho2)
    amp = radial * np.exp(-(r**2) / w**2) * np.exp(1j * ell * grid.azimuth())
    return normalize_power(ComplexField(grid, spec.wavelength_nm, amp), 1.0)


def apply_spiral_mask(f: ComplexField, mask: MaskModel) -> ComplexField:
    """Multiply by the mask's pure phase; |amp| unchanged everywhere."""
    phi = np.mod(f.grid.azimuth() - np.deg2rad(mask.rotation_deg), 2.0 * np.pi)
    if mask.steps is None:
        phase = mask.charge * phi
    else:
        n_steps = mask.steps
        sector = np.floor(n_steps * phi / (2.0 * np.pi))
        # guard the float edge where phi rounds up to exactly 2*pi
        np.clip(sector, 0, n_steps - 1, out=sector)
        phase = mask.charge * (2.0 * np.pi / n_steps) * sector
    return ComplexField(f.grid, f.wavelength_nm, f.amp * np.exp(1j * phase))


def apply_axicon(f: ComplexField, cone_phase_per_mm: float) -> ComplexField:
    """Conical phase exp(i * cone_phase_per_mm * r): ring far field, zero OAM."""
    if cone_phase_per_mm < 0:
        raise ValueError(f"cone_phase_per_mm must be >= 0, got {cone_phase_per_mm}")
    if cone_phase_per_mm == 0:
        return f
    phase = cone_phase_per_mm * f.grid.radius_mm()
    return ComplexField(f.grid, f.wavelength_nm, f.amp * np.exp(1j * phase))


def magnify(f: ComplexField, magnification: float) -> ComplexField:
    """Rescale transverse coordinates by M >= 1 on the same grid.

    Amplitude scales by 1/M so power is conserved up to bilinear
    interpolation error; points mapping outside the source window are zero.
    """
    m = float(magnification)
    if m < 1.0:
        raise ValueError(f"magnification must be >= 1, got {magnification}")
    if m == 1.0:
        return f
    n = f.grid.n
    # output sample i sits at x_i = (i - n/2 + 0.5) * pitch and reads the
    # source at x_i / M, i.e. fractional index (i - n/2 + 0.5)/M + n/2 - 0.5
    idx = (np.arange(n) - n / 2 + 0.5) / m + n / 2 - 0.5
    iy, ix = np.meshgrid(idx, idx, indexing="ij")
    coords = np.stack([iy.ravel(), ix.ravel()])
    re = map_coordinates(f.amp.real, coords, order=1, mode="constant", cval=0.0)
    im = map_coordinates(f.amp.imag, coords, order=1, mode="constant", cval=0.0)
    amp = (re + 1j * im).reshape(n, n) / m
    return ComplexField(f.grid, f.wavelength_nm, amp)
