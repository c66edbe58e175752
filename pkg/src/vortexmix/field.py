"""Square-grid complex field primitives: grids, power accounting, overlaps.

Conventions fixed here and relied on everywhere else:

* arrays are indexed ``amp[iy, ix]`` with +x rightward (columns) and
  +y upward (rows),
* the grid is centred with a half-pixel offset, so no sample falls on
  the beam axis,
* azimuth is measured from +x, counter-clockwise positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateFieldError, GridMismatchError

__all__ = [
    "GridSpec",
    "ComplexField",
    "IntensityImage",
    "make_grid",
    "power",
    "normalize_power",
    "overlap",
    "to_intensity",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform square sampling grid of ``n`` x ``n`` points over ``extent_mm``."""

    n: int
    extent_mm: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ValueError(f"n must be an integer, got {self.n!r}")
        if self.n < 16:
            raise ValueError(f"n must be >= 16, got {self.n}")
        if self.n % 2 != 0:
            raise ValueError(f"n must be even, got {self.n}")
        if not (np.isfinite(self.extent_mm) and self.extent_mm > 0):
            raise ValueError(f"extent_mm must be positive, got {self.extent_mm}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "extent_mm", float(self.extent_mm))

    @property
    def pitch_mm(self) -> float:
        return self.extent_mm / self.n

    def axis_mm(self) -> np.ndarray:
        """Sample coordinates along one axis, in mm (half-pixel centred)."""
        return (np.arange(self.n) - self.n / 2 + 0.5) * self.pitch_mm

    def mesh_mm(self) -> tuple[np.ndarray, np.ndarray]:
        """(Y, X) coordinate arrays in mm, shape (n, n)."""
        return _mesh_mm(self)

    def radius_mm(self) -> np.ndarray:
        return _radius_mm(self)

    def azimuth(self) -> np.ndarray:
        """Azimuth in [0, 2pi), measured from +x, counter-clockwise."""
        return _azimuth(self)


@lru_cache(maxsize=8)
def _mesh_mm(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    ax = grid.axis_mm()
    Y, X = np.meshgrid(ax, ax, indexing="ij")
    Y.setflags(write=False)
    X.setflags(write=False)
    return Y, X


@lru_cache(maxsize=8)
def _radius_mm(grid: GridSpec) -> np.ndarray:
    Y, X = _mesh_mm(grid)
    r = np.hypot(X, Y)
    r.setflags(write=False)
    return r


@lru_cache(maxsize=8)
def _azimuth(grid: GridSpec) -> np.ndarray:
    Y, X = _mesh_mm(grid)
    phi = np.mod(np.arctan2(Y, X), 2.0 * np.pi)
    phi.setflags(write=False)
    return phi


def make_grid(n: int, extent_mm: float) -> GridSpec:
    """Build a validated grid; pitch is ``extent_mm / n``."""
    return GridSpec(n, extent_mm)


@dataclass(frozen=True)
class ComplexField:
    """Sampled transverse complex amplitude of a monochromatic beam."""

    grid: GridSpec
    wavelength_nm: float
    amp: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.wavelength_nm) and self.wavelength_nm > 0):
            raise ValueError(f"wavelength_nm must be positive, got {self.wavelength_nm}")
        amp = np.ascontiguousarray(self.amp, dtype=np.complex128)
        if amp.shape != (self.grid.n, self.grid.n):
            raise ValueError(
                f"amplitude shape {amp.shape} does not match grid n={self.grid.n}"
            )
        if not np.isfinite(amp.view(np.float64)).all():
            raise ValueError("amplitude contains non-finite samples")
        amp.setflags(write=False)
        object.__setattr__(self, "amp", amp)
        object.__setattr__(self, "wavelength_nm", float(self.wavelength_nm))

    @property
    def wavelength_m(self) -> float:
        return self.wavelength_nm * 1e-9


@dataclass(frozen=True)
class IntensityImage:
    """Non-negative intensity samples on a grid (what a camera records)."""

    grid: GridSpec
    vals: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.vals, dtype=np.float64)
        if vals.shape != (self.grid.n, self.grid.n):
            raise ValueError(
                f"intensity shape {vals.shape} does not match grid n={self.grid.n}"
            )
        if not np.isfinite(vals).all():
            raise ValueError("intensity contains non-finite samples")
        if (vals < 0).any():
            raise ValueError("intensity contains negative samples")
        vals.setflags(write=False)
        object.__setattr__(self, "vals", vals)


def power(f: ComplexField) -> float:
    """Discrete beam power: sum |amp|^2 * pitch^2 (mm^2 units)."""
    return float(np.vdot(f.amp, f.amp).real) * f.grid.pitch_mm**2


def normalize_power(f: ComplexField, target: float = 1.0) -> ComplexField:
    """Rescale so that ``power(result) == target``; phase untouched."""
    if target < 0:
        raise ValueError(f"target power must be >= 0, got {target}")
    p = power(f)
    if p == 0.0:
        if target == 0.0:
            return f
        raise DegenerateFieldError("cannot normalize a zero field to nonzero power")
    return ComplexField(f.grid, f.wavelength_nm, f.amp * np.sqrt(target / p))


def overlap(f: ComplexField, g: ComplexField) -> complex:
    """Mode projection sum conj(f) * g * pitch^2; conjugate-linear in ``f``."""
    if f.grid != g.grid:
        raise GridMismatchError(f"grids differ: {f.grid} vs {g.grid}")
    if f.wavelength_nm != g.wavelength_nm:
        raise GridMismatchError(
            f"wavelengths differ: {f.wavelength_nm} vs {g.wavelength_nm}"
        )
    return complex(np.vdot(f.amp, g.amp)) * f.grid.pitch_mm**2


def to_intensity(f: ComplexField) -> IntensityImage:
    """|amp|^2 samplewise."""
    return IntensityImage(f.grid, f.amp.real**2 + f.amp.imag**2)
