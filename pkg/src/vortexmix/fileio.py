"""Deterministic binary formats for fields and images.

Field files ("OAMF1"): an ASCII header of ``key = value`` lines for n,
extent_mm and wavelength_nm, a blank line, then n*n complex samples as
little-endian float64 pairs (real, imaginary), row-major.  Round trips
are bit-exact.

Intensity files ("OAMI1"): same header, float64 payload.

Images are written as binary 16-bit PGM (big-endian per the format),
linearly scaled to [0, 65535] with the scale factor recorded in a comment.
Rows are written top-down, so the +y-up array convention is flipped on
output.
"""

from __future__ import annotations

import numpy as np

from .errors import FieldFormatError
from .field import ComplexField, GridSpec, IntensityImage

__all__ = ["write_field", "read_field", "write_intensity", "read_intensity", "write_pgm"]

FIELD_MAGIC = b"OAMF1\n"
INTENSITY_MAGIC = b"OAMI1\n"


def _header_bytes(grid: GridSpec, wavelength_nm: float | None) -> bytes:
    lines = [f"n = {grid.n}", f"extent_mm = {grid.extent_mm!r}"]
    if wavelength_nm is not None:
        lines.append(f"wavelength_nm = {wavelength_nm!r}")
    return ("\n".join(lines) + "\n\n").encode("ascii")


def write_field(f: ComplexField, path) -> None:
    payload = np.ascontiguousarray(f.amp, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(FIELD_MAGIC)
        fh.write(_header_bytes(f.grid, f.wavelength_nm))
        fh.write(payload)


def write_intensity(img: IntensityImage, path) -> None:
    payload = np.ascontiguousarray(img.vals, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(INTENSITY_MAGIC)
        fh.write(_header_bytes(img.grid, None))
        fh.write(payload)


def _parse_header(data: bytes, magic: bytes, path) -> tuple[dict, int]:
    if not data.startswith(magic):
        raise FieldFormatError(f"{path}: bad magic, expected {magic!r}", 0)
    pos = len(magic)
    header: dict[str, str] = {}
    while True:
        end = data.find(b"\n", pos)
        if end < 0:
            raise FieldFormatError(f"{path}: header is not terminated", pos)
        line = data[pos:end]
        if line == b"":
            pos = end + 1
            break
        try:
            text = line.decode("ascii")
        except UnicodeDecodeError:
            raise FieldFormatError(f"{path}: non-ascii header line", pos) from None
        if "=" not in text:
            raise FieldFormatError(f"{path}: malformed header line {text!r}", pos)
        key, _, value = text.partition("=")
        header[key.strip()] = value.strip()
        pos = end + 1
    return header, pos


def _header_grid(header: dict, pos: int, path) -> GridSpec:
    try:
        n = int(header["n"])
        extent = float(header["extent_mm"])
    except KeyError as exc:
        raise FieldFormatError(f"{path}: missing header key {exc}", pos) from None
    except ValueError as exc:
        raise FieldFormatError(f"{path}: {exc}", pos) from None
    try:
        return GridSpec(n, extent)
    except ValueError as exc:
        raise FieldFormatError(f"{path}: {exc}", pos) from None


def read_field(path) -> ComplexField:
    with open(path, "rb") as fh:
        data = fh.read()
    header, pos = _parse_header(data, FIELD_MAGIC, path)
    grid = _header_grid(header, pos, path)
    try:
        wavelength = float(header["wavelength_nm"])
    except KeyError:
        raise FieldFormatError(f"{path}: missing header key 'wavelength_nm'", pos) from None
    except ValueError as exc:
        raise FieldFormatError(f"{path}: {exc}", pos) from None
    expected = grid.n * grid.n * 16
    available = len(data) - pos
    if available != expected:
        raise FieldFormatError(
            f"{path}: payload holds {available} bytes, header n={grid.n} "
            f"needs {expected}",
            pos + min(available, expected),
        )
    amp = np.frombuffer(data, dtype="<c16", offset=pos).reshape(grid.n, grid.n)
    return ComplexField(grid, wavelength, amp)


def read_intensity(path) -> IntensityImage:
    with open(path, "rb") as fh:
        data = fh.read()
    header, pos = _parse_header(data, INTENSITY_MAGIC, path)
    grid = _header_grid(header, pos, path)
    expected = grid.n * grid.n * 8
    available = len(data) - pos
    if available != expected:
        raise FieldFormatError(
            f"{path}: payload holds {available} bytes, header n={grid.n} "
            f"needs {expected}",
            pos + min(available, expected),
        )
    vals = np.frombuffer(data, dtype="<f8", offset=pos).reshape(grid.n, grid.n)
    return IntensityImage(grid, vals)


def write_pgm(img: IntensityImage, path) -> None:
    """16-bit binary PGM, linearly scaled so the maximum maps to 65535."""
    vals = img.vals
    peak = float(vals.max())
    if peak > 0.0:
        scale = peak / 65535.0
        pixels = np.rint(vals / scale).astype(">u2")
    else:
        scale = 0
        pixels = np.zeros_like(vals, dtype=">u2")
    n = img.grid.n
    header = (
        f"P5\n"
        f"# scale = {scale!r}\n"
        f"# row 0 is +y (top); intensity = pixel * scale\n"
        f"{n} {n}\n65535\n"
    ).encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(pixels[::-1].tobytes())
