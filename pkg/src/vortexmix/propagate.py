"""Paraxial propagation and lens transforms.

Angular-spectrum free-space propagation with the exact transfer function
(evanescent components zeroed), thin lenses, and the tilted lens whose
astigmatism splits a vortex into countable dark stripes.

Sampling guards
---------------
Both the propagator and the lens multiply the field by a quadratic-phase
chirp.  A chirp sampled coarser than pi per sample aliases, so both
operations reject parameters that would undersample it instead of
propagating silently:

* lens: the phase step between adjacent samples at the spatial grid edge
  must stay below pi, which bounds the focal length from below,
* propagation: the transfer-function phase step between adjacent frequency
  samples must stay below pi over the band a well-formed field may occupy
  (the central quarter of the Nyquist band, matching the power-conservation
  contract), which bounds the distance from above by
  ``4 * extent * pitch / wavelength``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AliasingRiskError
from .field import ComplexField, IntensityImage, to_intensity

__all__ = [
    "LensSpec",
    "max_propagation_distance_m",
    "min_focal_length_m",
    "angular_spectrum",
    "thin_lens",
    "tilted_lens",
    "astigmatic_focus_image",
]


@dataclass(frozen=True)
class LensSpec:
    """Thin lens of focal length ``focal_m``, tilted by ``tilt_deg`` about +y.

    Tilting makes the lens astigmatic to first order: the tangential (x)
    focal length shortens to f*cos(t) while the sagittal (y) one grows to
    f/cos(t).
    """

    focal_m: float
    tilt_deg: float = 0.0

    def __post_init__(self):
        if self.focal_m == 0 or not np.isfinite(self.focal_m):
            raise ValueError(f"focal_m must be finite and nonzero, got {self.focal_m}")
        if not (0.0 <= self.tilt_deg < 90.0):
            raise ValueError(f"tilt_deg must be in [0, 90), got {self.tilt_deg}")

    @property
    def tangential_focal_m(self) -> float:
        return self.focal_m * np.cos(np.deg2rad(self.tilt_deg))

    @property
    def sagittal_focal_m(self) -> float:
        return self.focal_m / np.cos(np.deg2rad(self.tilt_deg))


def max_propagation_distance_m(grid, wavelength_nm: float) -> float:
    """Largest |distance| the sampled transfer function supports."""
    extent_m = grid.extent_mm * 1e-3
    pitch_m = grid.pitch_mm * 1e-3
    return 4.0 * extent_m * pitch_m / (wavelength_nm * 1e-9)


def min_focal_length_m(grid, wavelength_nm: float) -> float:
    """Smallest |focal length| whose chirp stays sampled at the grid edge."""
    extent_m = grid.extent_mm * 1e-3
    pitch_m = grid.pitch_mm * 1e-3
    return extent_m * pitch_m / (wavelength_nm * 1e-9)


def angular_spectrum(f: ComplexField, distance_m: float) -> ComplexField:
    """Propagate ``f`` by ``distance_m`` (either sign) in free space."""
    d = float(distance_m)
    if d == 0.0:
        return f
    d_max = max_propagation_distance_m(f.grid, f.wavelength_nm)
    if abs(d) > d_max:
        raise AliasingRiskError(
            f"|distance| {abs(d):.6g} m exceeds the sampling bound {d_max:.6g} m "
            f"for this grid at {f.wavelength_nm} nm"
        )
    n = f.grid.n
    pitch_m = f.grid.pitch_mm * 1e-3
    nu = np.fft.fftfreq(n, d=pitch_m)
    nu_y, nu_x = np.meshgrid(nu, nu, indexing="ij")
    kz2 = (1.0 / f.wavelength_m) ** 2 - nu_x**2 - nu_y**2
    propagating = kz2 > 0.0
    kz = np.sqrt(np.where(propagating, kz2, 0.0))
    transfer = np.where(propagating, np.exp(2j * np.pi * d * kz), 0.0)
    amp = np.fft.ifft2(np.fft.fft2(f.amp) * transfer)
    return ComplexField(f.grid, f.wavelength_nm, amp)


def _quadratic_phase(f: ComplexField, fx_m: float, fy_m: float) -> ComplexField:
    f_min = min_focal_length_m(f.grid, f.wavelength_nm)
    weakest = min(abs(fx_m), abs(fy_m))
    if weakest < f_min:
        raise AliasingRiskError(
            f"|focal length| {weakest:.6g} m is below the sampling bound "
            f"{f_min:.6g} m for this grid at {f.wavelength_nm} nm"
        )
    y, x = f.grid.mesh_mm()
    x_m = x * 1e-3
    y_m = y * 1e-3
    phase = -np.pi * (x_m**2 / fx_m + y_m**2 / fy_m) / f.wavelength_m
    return ComplexField(f.grid, f.wavelength_nm, f.amp * np.exp(1j * phase))


def thin_lens(f: ComplexField, lens: LensSpec) -> ComplexField:
    """Untilted thin-lens phase exp(-i*pi*(x^2+y^2)/(lambda*f))."""
    if lens.tilt_deg != 0.0:
        raise ValueError("thin_lens requires tilt_deg=0; use tilted_lens")
    return _quadratic_phase(f, lens.focal_m, lens.focal_m)


def tilted_lens(f: ComplexField, lens: LensSpec) -> ComplexField:
    """Astigmatic lens phase with focal lengths f*cos(t) along x, f/cos(t) along y."""
    return _quadratic_phase(f, lens.tangential_focal_m, lens.sagittal_focal_m)


def astigmatic_focus_image(
    f: ComplexField, lens: LensSpec, distance_m: float | None = None
) -> IntensityImage:
    """Intensity after the tilted lens, imaged at the mixed focus.

    The default observation plane is the geometric mean of the two focal
    distances, where mode conversion is strongest; pass ``distance_m`` to
    override it.
    """
    if distance_m is None:
        fx = lens.tangential_focal_m
        fy = lens.sagittal_focal_m
        distance_m = float(np.sign(lens.focal_m)) * np.sqrt(abs(fx * fy))
    return to_intensity(angular_spectrum(tilted_lens(f, lens), distance_m))
