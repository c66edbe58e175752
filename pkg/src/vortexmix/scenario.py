"""Experiment configuration, preset scenarios, and the full pipeline.

A scenario builds the two pump beams (optionally vortex-converted by a
spiral phase mask), generates the blue and infrared fields under the
chosen hypothesis, renders camera images, runs the enabled diagnostics,
and classifies the process from the measured charges.  Every step is
deterministic for a fixed configuration, including the seeded image
noise, so repeated runs produce byte-identical artifacts.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import warnings
from dataclasses import dataclass, replace

from . import __version__
from .errors import UnknownPresetError
from .field import ComplexField, IntensityImage, make_grid, normalize_power, to_intensity
from .fileio import write_field, write_intensity, write_pgm
from .diagnostics import (
    ChargeVerdict,
    ProcessVerdict,
    add_intensity_noise,
    central_dip,
    classify_process,
    dominant_charge,
    self_interference,
    spiral_count,
    stripe_count,
)
from .mixing import MixingScenario, generate_all
from .process import predict_oam, builtin_loop
from .propagate import LensSpec, angular_spectrum, astigmatic_focus_image
from .sources import BeamSpec, MaskModel, apply_axicon, apply_spiral_mask, gaussian

__all__ = [
    "ScenarioConfig",
    "FieldReport",
    "RunReport",
    "preset",
    "PRESET_NAMES",
    "run_scenario",
    "parse_config",
    "render_config",
    "render_report",
]

DENSITY_RANGE_CM3 = (3.0e11, 1.5e12)


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one simulated experiment."""

    # grid
    n: int = 2048
    extent_mm: float = 27.0
    # pumps
    waist_780_mm: float = 4.0
    waist_776_mm: float = 2.0
    ell_780: int = 0
    ell_776: int = 0
    power_780_mw: float = 5.0
    power_776_mw: float = 3.0
    # mask
    mask_model: str = "octants"  # "ideal_ramp" | "octants"
    mask_steps: int = 8
    mask_rotation_780_deg: float = 0.0
    mask_rotation_776_deg: float = 22.5
    # process
    hypothesis: str = "fwm"
    # conical stand-in for the blue field
    conical_blue: bool = False
    conical_waist_mm: float = 0.5
    conical_phase_per_mm: float = 16.0
    conical_travel_m: float = 1.5
    # tilted-lens diagnostic
    focal_m: float = 1.0
    tilt_deg: float = 30.0
    observation_distance_m: float | None = None
    # camera
    camera_distance_m: float = 0.5
    # self-interference arm
    si_magnification: float = 8.0
    si_ratio: float = 1.0
    si_defocus_m: float | None = None
    # diagnostics toggles
    enable_tilted_lens: bool = True
    enable_self_interference: bool = False
    enable_spectrum: bool = True
    # image noise
    noise_amplitude: float = 0.0
    noise_seed: int = 12345
    # medium (metadata only: scales reported intensities, never spatial structure)
    atom_density_cm3: float = 1.0e12

    def __post_init__(self):
        if self.mask_model not in ("ideal_ramp", "octants"):
            raise ValueError(f"mask_model must be ideal_ramp or octants, got {self.mask_model!r}")
        if self.hypothesis not in ("fwm", "swm"):
            raise ValueError(f"hypothesis must be fwm or swm, got {self.hypothesis!r}")
        if self.noise_amplitude < 0:
            raise ValueError("noise_amplitude must be >= 0")
        if self.power_780_mw <= 0 or self.power_776_mw <= 0:
            raise ValueError("pump powers must be positive")

    def lens(self) -> LensSpec:
        return LensSpec(self.focal_m, self.tilt_deg)


@dataclass(frozen=True)
class FieldReport:
    """Measurements and predictions for one detected field."""

    name: str
    wavelength_nm: float
    oracle_charge: int
    predicted_fwm: int
    predicted_swm: int
    camera_dip: float
    relative_intensity: float
    verdicts: tuple[ChargeVerdict, ...]

    def verdict(self, method: str) -> ChargeVerdict:
        for v in self.verdicts:
            if v.method == method:
                return v
        raise KeyError(f"no {method!r} verdict for field {self.name!r}")


@dataclass(frozen=True)
class RunReport:
    """Everything a scenario run measured, plus provenance."""

    version: str
    config_hash: str
    fields: tuple[FieldReport, ...]
    process: ProcessVerdict | None

    def field(self, name: str) -> FieldReport:
        for f in self.fields:
            if f.name == name:
                return f
        raise KeyError(f"no field {name!r} in report")


# ---------------------------------------------------------------------------
# config text round trip

_CONFIG_LAYOUT = {
    "grid": ["n", "extent_mm"],
    "pumps": ["waist_780_mm", "waist_776_mm", "ell_780", "ell_776",
              "power_780_mw", "power_776_mw"],
    "mask": ["mask_model", "mask_steps", "mask_rotation_780_deg",
             "mask_rotation_776_deg"],
    "process": ["hypothesis"],
    "conical": ["conical_blue", "conical_waist_mm", "conical_phase_per_mm",
                "conical_travel_m"],
    "lens": ["focal_m", "tilt_deg", "observation_distance_m"],
    "camera": ["camera_distance_m"],
    "interference": ["si_magnification", "si_ratio", "si_defocus_m"],
    "diagnostics": ["enable_tilted_lens", "enable_self_interference",
                    "enable_spectrum"],
    "noise": ["noise_amplitude", "noise_seed"],
    "medium": ["atom_density_cm3"],
}

_INT_KEYS = {"n", "ell_780", "ell_776", "mask_steps", "noise_seed"}
_BOOL_KEYS = {"conical_blue", "enable_tilted_lens", "enable_self_interference",
              "enable_spectrum"}
_STR_KEYS = {"mask_model", "hypothesis"}
_OPTIONAL_KEYS = {"observation_distance_m", "si_defocus_m"}


def render_config(cfg: ScenarioConfig) -> str:
    """Canonical text form (sections and keys in fixed order)."""
    out = io.StringIO()
    for section, keys in _CONFIG_LAYOUT.items():
        out.write(f"[{section}]\n")
        for key in keys:
            value = getattr(cfg, key)
            if value is None:
                text = "auto"
            elif isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            out.write(f"{key} = {text}\n")
        out.write("\n")
    return out.getvalue()


def parse_config(text: str) -> ScenarioConfig:
    """Parse ``[section]`` / ``key = value`` text into a config."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ValueError(f"malformed config: {exc}") from exc
    values = {}
    for section in parser.sections():
        if section not in _CONFIG_LAYOUT:
            raise ValueError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _CONFIG_LAYOUT[section]:
                raise ValueError(f"unknown key {key!r} in section [{section}]")
            raw = raw.strip()
            if key in _OPTIONAL_KEYS and raw.lower() in ("auto", "none", ""):
                values[key] = None
            elif key in _BOOL_KEYS:
                if raw.lower() not in ("true", "false", "0", "1", "yes", "no"):
                    raise ValueError(f"{key} must be boolean, got {raw!r}")
                values[key] = raw.lower() in ("true", "1", "yes")
            elif key in _INT_KEYS:
                values[key] = int(raw)
            elif key in _STR_KEYS:
                values[key] = raw
            else:
                values[key] = float(raw)
    return ScenarioConfig(**values)


def config_hash(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(render_config(cfg).encode("ascii")).hexdigest()


# ---------------------------------------------------------------------------
# presets

def _fig1() -> ScenarioConfig:
    return ScenarioConfig(
        ell_780=0, ell_776=1,
        enable_tilted_lens=False, enable_self_interference=True,
    )


def _fig3ab() -> ScenarioConfig:
    return ScenarioConfig(ell_780=0, ell_776=1, enable_self_interference=True)


def _fig3cd() -> ScenarioConfig:
    return ScenarioConfig(conical_blue=True)


def _fig4ab() -> ScenarioConfig:
    return ScenarioConfig(ell_780=1, ell_776=0)


def _fig4cd() -> ScenarioConfig:
    return ScenarioConfig(ell_780=0, ell_776=-1)


def _fig5() -> ScenarioConfig:
    return ScenarioConfig(ell_780=1, ell_776=1, enable_self_interference=True)


_PRESETS = {
    "fig1": _fig1,
    "fig3": _fig3cd,  # the conical-vs-vortex discrimination case
    "fig3ab": _fig3ab,
    "fig3cd": _fig3cd,
    "fig4ab": _fig4ab,
    "fig4cd": _fig4cd,
    "fig5": _fig5,
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset(name: str, **overrides) -> ScenarioConfig:
    """Configuration reproducing one of the reference scenarios."""
    if name not in _PRESETS:
        raise UnknownPresetError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        )
    cfg = _PRESETS[name]()
    return replace(cfg, **overrides) if overrides else cfg


# ---------------------------------------------------------------------------
# pipeline

def _build_pump(cfg: ScenarioConfig, grid, which: str) -> ComplexField:
    if which == "780":
        waist, ell, rot, power = (cfg.waist_780_mm, cfg.ell_780,
                                  cfg.mask_rotation_780_deg, cfg.power_780_mw)
        wavelength = 780.0
    else:
        waist, ell, rot, power = (cfg.waist_776_mm, cfg.ell_776,
                                  cfg.mask_rotation_776_deg, cfg.power_776_mw)
        wavelength = 776.0
    beam = gaussian(grid, BeamSpec(waist, wavelength))
    if ell != 0:
        if cfg.mask_model == "ideal_ramp":
            mask = MaskModel.ideal(ell, rotation_deg=rot)
        else:
            mask = MaskModel.octants(ell, steps=cfg.mask_steps, rotation_deg=rot)
        beam = apply_spiral_mask(beam, mask)
    return normalize_power(beam, power)


def _spectrum_verdict(field: ComplexField) -> ChargeVerdict:
    ell = dominant_charge(field)
    sign = None if ell == 0 else (1 if ell > 0 else -1)
    return ChargeVerdict(abs(ell), sign, 1.0, "spectrum")


def run_scenario(cfg: ScenarioConfig, out_dir=None) -> RunReport:
    """Execute the full pipeline; optionally write artifacts to ``out_dir``."""
    if not (DENSITY_RANGE_CM3[0] <= cfg.atom_density_cm3 <= DENSITY_RANGE_CM3[1]):
        warnings.warn(
            f"atom density {cfg.atom_density_cm3:g} cm^-3 is outside the "
            f"calibrated range {DENSITY_RANGE_CM3[0]:g} - {DENSITY_RANGE_CM3[1]:g}",
            stacklevel=2,
        )
    grid = make_grid(cfg.n, cfg.extent_mm)
    lens = cfg.lens()
    density_rel = cfg.atom_density_cm3 / 1.0e12
    power_780_rel = cfg.power_780_mw / 5.0
    power_776_rel = cfg.power_776_mw / 3.0

    artifacts: dict[str, ComplexField | IntensityImage] = {}
    pump_oam = {780.0: cfg.ell_780, 776.0: cfg.ell_776}

    if cfg.conical_blue:
        seed_beam = gaussian(grid, BeamSpec(cfg.conical_waist_mm, 420.0))
        cone = apply_axicon(seed_beam, cfg.conical_phase_per_mm)
        blue = angular_spectrum(cone, cfg.conical_travel_m)
        fields = {"blue": blue}
        predictions = {"blue": (0, 0)}
        intensity_rel = {"blue": density_rel * power_780_rel * power_776_rel}
    else:
        pump_780 = _build_pump(cfg, grid, "780")
        pump_776 = _build_pump(cfg, grid, "776")
        artifacts["pump780.oamf"] = pump_780
        artifacts["pump776.oamf"] = pump_776
        mixed = generate_all(
            MixingScenario(
                normalize_power(pump_780, 1.0),
                normalize_power(pump_776, 1.0),
                hypothesis=cfg.hypothesis,
            ),
            pump_oam=pump_oam,
        )
        fields = {"blue": mixed.blue, "ir": mixed.ir}
        fwm_ir = predict_oam(builtin_loop("ir_fwm"), "fwm", pump_oam)
        swm_ir = predict_oam(builtin_loop("ir_swm"), "swm", pump_oam)
        blue_pred = mixed.ledger_blue.detected_charge
        predictions = {
            "blue": (blue_pred, blue_pred),
            "ir": (fwm_ir.detected_charge, swm_ir.detected_charge),
        }
        intensity_rel = {
            "blue": density_rel * power_780_rel * power_776_rel,
            "ir": density_rel * power_780_rel**2 * power_776_rel,
        }

    field_reports = []
    measured: dict[str, ChargeVerdict] = {}
    for index, (name, field) in enumerate(fields.items()):
        artifacts[f"{name}.oamf"] = field
        camera = to_intensity(angular_spectrum(field, cfg.camera_distance_m))
        camera = add_intensity_noise(camera, cfg.noise_amplitude,
                                     cfg.noise_seed + 10 * index + 1)
        artifacts[f"{name}_camera"] = camera
        dip = central_dip(camera)

        verdicts = []
        if cfg.enable_spectrum:
            verdicts.append(_spectrum_verdict(field))
        if cfg.enable_tilted_lens:
            astig = astigmatic_focus_image(field, lens, cfg.observation_distance_m)
            astig = add_intensity_noise(astig, cfg.noise_amplitude,
                                        cfg.noise_seed + 10 * index + 2)
            artifacts[f"{name}_tilted"] = astig
            verdicts.append(stripe_count(astig, lens))
        if cfg.enable_self_interference and name == "blue":
            fringes = self_interference(field, cfg.si_magnification,
                                        cfg.si_ratio, cfg.si_defocus_m)
            fringes = add_intensity_noise(fringes, cfg.noise_amplitude,
                                          cfg.noise_seed + 10 * index + 3)
            artifacts[f"{name}_spiral"] = fringes
            verdicts.append(spiral_count(fringes))

        for method in ("tilted_lens", "self_interference", "spectrum"):
            pick = next((v for v in verdicts if v.method == method), None)
            if pick is not None and pick.confidence > 0:
                measured[name] = pick
                break

        field_reports.append(FieldReport(
            name=name,
            wavelength_nm=field.wavelength_nm,
            oracle_charge=dominant_charge(field),
            predicted_fwm=predictions[name][0],
            predicted_swm=predictions[name][1],
            camera_dip=dip,
            relative_intensity=intensity_rel[name],
            verdicts=tuple(verdicts),
        ))

    process = None
    if "blue" in measured and "ir" in measured:
        process = classify_process({780: cfg.ell_780, 776: cfg.ell_776},
                                   measured["blue"], measured["ir"])

    report = RunReport(
        version=__version__,
        config_hash=config_hash(cfg),
        fields=tuple(field_reports),
        process=process,
    )

    if out_dir is not None:
        _write_artifacts(cfg, report, artifacts, out_dir)
    return report


def _write_artifacts(cfg, report, artifacts, out_dir) -> None:
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.cfg").write_text(render_config(cfg), encoding="ascii")
    (out / "report.txt").write_text(render_report(report), encoding="ascii")
    for name in sorted(artifacts):
        item = artifacts[name]
        if isinstance(item, ComplexField):
            write_field(item, out / name)
        else:
            write_intensity(item, out / f"{name}.oami")
            write_pgm(item, out / f"{name}.pgm")


def render_report(report: RunReport) -> str:
    """Human-readable report followed by a machine-readable block."""
    lines = []
    lines.append(f"wave-mixing charge-transfer report (vortexmix {report.version})")
    lines.append(f"config sha256: {report.config_hash}")
    lines.append("")
    for f in report.fields:
        lines.append(f"field {f.name} ({f.wavelength_nm:g} nm)")
        lines.append(f"  oracle charge          : {f.oracle_charge:+d}")
        lines.append(f"  predicted (fwm / swm)  : {f.predicted_fwm:+d} / {f.predicted_swm:+d}")
        lines.append(f"  camera central dip     : {f.camera_dip:.6f}")
        lines.append(f"  relative intensity     : {f.relative_intensity:.6f}")
        for v in f.verdicts:
            sign = "?" if v.sign is None else f"{v.sign:+d}"
            lines.append(
                f"  {v.method:<18s}: |l| = {v.magnitude}, sign {sign}, "
                f"confidence {v.confidence:.3f}"
            )
        lines.append("")
    if report.process is None:
        lines.append("process verdict: not applicable (need both fields measured)")
    else:
        lines.append(f"process verdict: {report.process.verdict}")
        for name, meas, pf, ps in report.process.supporting:
            lines.append(f"  {name}: measured {meas:+d}, fwm predicts {pf:+d}, "
                         f"swm predicts {ps:+d}")
    lines.append("")
    lines.append("[machine]")
    lines.append(f"version = {report.version}")
    lines.append(f"config_hash = {report.config_hash}")
    verdict = "none" if report.process is None else report.process.verdict
    lines.append(f"process_verdict = {verdict}")
    for f in report.fields:
        key = f.name
        lines.append(f"{key}.oracle_charge = {f.oracle_charge}")
        lines.append(f"{key}.predicted_fwm = {f.predicted_fwm}")
        lines.append(f"{key}.predicted_swm = {f.predicted_swm}")
        lines.append(f"{key}.camera_dip = {f.camera_dip!r}")
        lines.append(f"{key}.relative_intensity = {f.relative_intensity!r}")
        for v in f.verdicts:
            prefix = f"{key}.{v.method}"
            lines.append(f"{prefix}.magnitude = {v.magnitude}")
            lines.append(f"{prefix}.sign = {'unknown' if v.sign is None else v.sign}")
            lines.append(f"{prefix}.confidence = {v.confidence!r}")
    return "\n".join(lines) + "\n"
