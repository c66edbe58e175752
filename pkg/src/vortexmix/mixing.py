"""Generation of the blue and infrared fields from the two pump beams.

The model is local: each generated transverse amplitude is a pointwise
product of pump quantities at the mixing plane, which reproduces the
charge bookkeeping and the observed profiles without propagating inside
the vapour.

* blue (420 nm): product of both pump amplitudes, so helical phases add,
* infrared (1370 nm), four-wave hypothesis: the 780 nm beam enters only
  through its intensity (it populates the intermediate level), so only
  the 776 nm phase survives,
* infrared, six-wave hypothesis: the pump charge leaves with the
  undetected ground-state re-emission, leaving a flat-phase field.

Both generated fields are normalized to unit power; the conversion
efficiency itself is out of scope and only tracked as a relative gain.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DegenerateFieldError, GridMismatchError
from .field import ComplexField, normalize_power
from .process import OamLedger, ProcessLoop, builtin_loop, predict_oam

__all__ = ["MixingScenario", "MixedFields", "generate_blue", "generate_ir", "generate_all"]

BLUE_WAVELENGTH_NM = 420.0
IR_WAVELENGTH_NM = 1370.0


@dataclass(frozen=True)
class MixingScenario:
    """Two pump fields plus the process hypothesis under test."""

    pump_780: ComplexField
    pump_776: ComplexField
    hypothesis: str = "fwm"
    loop_blue: ProcessLoop = dc_field(default_factory=lambda: builtin_loop("blue_fwm"))
    loop_ir: ProcessLoop | None = None
    gain: float = 1.0

    def __post_init__(self):
        if self.hypothesis not in ("fwm", "swm"):
            raise ValueError(f"hypothesis must be fwm or swm, got {self.hypothesis!r}")
        if self.pump_780.grid != self.pump_776.grid:
            raise GridMismatchError("pump beams must share one grid")
        if abs(self.pump_780.wavelength_nm - 780.0) > 0.5:
            raise ValueError(f"pump_780 is tagged {self.pump_780.wavelength_nm} nm")
        if abs(self.pump_776.wavelength_nm - 776.0) > 0.5:
            raise ValueError(f"pump_776 is tagged {self.pump_776.wavelength_nm} nm")
        if self.gain <= 0:
            raise ValueError(f"gain must be positive, got {self.gain}")
        if self.loop_ir is None:
            name = "ir_fwm" if self.hypothesis == "fwm" else "ir_swm"
            object.__setattr__(self, "loop_ir", builtin_loop(name))


@dataclass(frozen=True)
class MixedFields:
    """Generated fields bundled with their charge ledgers."""

    blue: ComplexField
    ir: ComplexField
    ledger_blue: OamLedger
    ledger_ir: OamLedger


def _normalized(grid, wavelength_nm, amp, what: str) -> ComplexField:
    raw = ComplexField(grid, wavelength_nm, amp)
    try:
        return normalize_power(raw, 1.0)
    except DegenerateFieldError:
        raise DegenerateFieldError(f"{what} amplitude is identically zero") from None


def generate_blue(scenario: MixingScenario) -> ComplexField:
    """Blue field: gain * amp780 * amp776, power-normalized; charges add."""
    amp = scenario.gain * scenario.pump_780.amp * scenario.pump_776.amp
    return _normalized(scenario.pump_780.grid, BLUE_WAVELENGTH_NM, amp, "blue")


def generate_ir(scenario: MixingScenario) -> ComplexField:
    """Infrared field under the scenario's hypothesis, power-normalized."""
    p780 = scenario.pump_780.amp
    p776 = scenario.pump_776.amp
    if scenario.hypothesis == "fwm":
        amp = scenario.gain * (p780.real**2 + p780.imag**2) * p776
    else:
        amp = scenario.gain * np.abs(p780 * p776).astype(np.complex128)
    return _normalized(scenario.pump_780.grid, IR_WAVELENGTH_NM, amp, "infrared")


def generate_all(scenario: MixingScenario, pump_oam: dict[float, int] | None = None) -> MixedFields:
    """Both generated fields plus the charge ledgers for each loop.

    ``pump_oam`` maps pump wavelength to charge; when omitted it is read
    off the pump fields with the azimuthal-spectrum oracle.
    """
    if pump_oam is None:
        from .diagnostics import dominant_charge

        pump_oam = {
            780.0: dominant_charge(scenario.pump_780),
            776.0: dominant_charge(scenario.pump_776),
        }
    blue = generate_blue(scenario)
    ir = generate_ir(scenario)
    # the blue loop is four-wave mixing under either hypothesis; only the
    # infrared loop is in question
    ledger_blue = predict_oam(scenario.loop_blue, "fwm", pump_oam)
    ledger_ir = predict_oam(scenario.loop_ir, scenario.hypothesis, pump_oam)
    return MixedFields(blue, ir, ledger_blue, ledger_ir)
