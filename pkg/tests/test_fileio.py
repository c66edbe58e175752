"""Field files, intensity files, and PGM output."""

import numpy as np
import pytest

import vortexmix as vm
from vortexmix.errors import FieldFormatError


def sample_field():
    grid = vm.make_grid(64, 2.0)
    rng = np.random.default_rng(3)
    amp = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    return vm.ComplexField(grid, 780.0, amp)


class TestFieldRoundTrip:
    def test_bitwise_exact(self, tmp_path):
        f = sample_field()
        path = tmp_path / "f.oamf"
        vm.write_field(f, path)
        back = vm.read_field(path)
        assert back.grid == f.grid
        assert back.wavelength_nm == f.wavelength_nm
        assert back.amp.tobytes() == f.amp.tobytes()

    def test_rewrite_is_byte_identical(self, tmp_path):
        f = sample_field()
        a = tmp_path / "a.oamf"
        b = tmp_path / "b.oamf"
        vm.write_field(f, a)
        vm.write_field(vm.read_field(a), b)
        assert a.read_bytes() == b.read_bytes()

    def test_truncated_payload(self, tmp_path):
        f = sample_field()
        path = tmp_path / "f.oamf"
        vm.write_field(f, path)
        data = path.read_bytes()
        path.write_bytes(data[:-17])
        with pytest.raises(FieldFormatError) as info:
            vm.read_field(path)
        assert info.value.byte_offset > 0

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "f.oamf"
        path.write_bytes(b"NOPE1\nn = 64\n\n")
        with pytest.raises(FieldFormatError) as info:
            vm.read_field(path)
        assert info.value.byte_offset == 0

    def test_header_payload_mismatch(self, tmp_path):
        f = sample_field()
        path = tmp_path / "f.oamf"
        vm.write_field(f, path)
        data = path.read_bytes()
        # claim a larger grid than the payload holds
        path.write_bytes(data.replace(b"n = 64", b"n = 128", 1))
        with pytest.raises(FieldFormatError):
            vm.read_field(path)

    def test_missing_wavelength(self, tmp_path):
        path = tmp_path / "f.oamf"
        payload = np.zeros(64 * 64, dtype="<c16").tobytes()
        path.write_bytes(b"OAMF1\nn = 64\nextent_mm = 2.0\n\n" + payload)
        with pytest.raises(FieldFormatError):
            vm.read_field(path)


class TestIntensityRoundTrip:
    def test_bitwise_exact(self, tmp_path):
        img = vm.to_intensity(sample_field())
        path = tmp_path / "i.oami"
        vm.write_intensity(img, path)
        back = vm.read_intensity(path)
        assert back.grid == img.grid
        assert back.vals.tobytes() == img.vals.tobytes()


def read_pgm_reference(path):
    """Minimal independent PGM reader used as the round-trip oracle."""
    data = path.read_bytes()
    parts = []
    pos = 0
    while len(parts) < 4:
        end = data.find(b"\n", pos)
        line = data[pos:end]
        pos = end + 1
        if line.startswith(b"#"):
            continue
        parts.extend(line.split())
    magic, width, height, maxval = parts[0], int(parts[1]), int(parts[2]), int(parts[3])
    assert magic == b"P5"
    assert maxval == 65535
    pixels = np.frombuffer(data[pos:], dtype=">u2").reshape(height, width)
    return pixels


class TestPgm:
    def test_zero_image(self, tmp_path):
        grid = vm.make_grid(32, 1.0)
        img = vm.IntensityImage(grid, np.zeros((32, 32)))
        path = tmp_path / "z.pgm"
        vm.write_pgm(img, path)
        pixels = read_pgm_reference(path)
        assert not pixels.any()
        assert b"scale = 0" in path.read_bytes()

    def test_max_maps_to_full_scale(self, tmp_path):
        grid = vm.make_grid(32, 1.0)
        vals = np.zeros((32, 32))
        vals[4, 9] = 2.0
        path = tmp_path / "m.pgm"
        vm.write_pgm(vm.IntensityImage(grid, vals), path)
        pixels = read_pgm_reference(path)
        assert pixels.max() == 65535

    def test_quantization_error_bounded(self, tmp_path):
        img = vm.to_intensity(sample_field())
        path = tmp_path / "q.pgm"
        vm.write_pgm(img, path)
        pixels = read_pgm_reference(path)[::-1]  # undo the top-down flip
        recovered = pixels.astype(float) / 65535.0
        reference = img.vals / img.vals.max()
        assert np.abs(recovered - reference).max() <= 1.0 / 65535.0

    def test_y_axis_flipped_on_output(self, tmp_path):
        grid = vm.make_grid(32, 1.0)
        vals = np.zeros((32, 32))
        vals[-1, 0] = 1.0  # largest y, smallest x
        path = tmp_path / "o.pgm"
        vm.write_pgm(vm.IntensityImage(grid, vals), path)
        pixels = read_pgm_reference(path)
        assert pixels[0, 0] == 65535  # first raster row is the top of the image

    def test_deterministic_bytes(self, tmp_path):
        img = vm.to_intensity(sample_field())
        a = tmp_path / "a.pgm"
        b = tmp_path / "b.pgm"
        vm.write_pgm(img, a)
        vm.write_pgm(img, b)
        assert a.read_bytes() == b.read_bytes()
