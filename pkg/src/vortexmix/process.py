"""Atomic process loops: parsing, energy closure, and charge bookkeeping.

A loop is an ordered cycle of transitions between named levels, each
absorbing or emitting one photon.  The rubidium cascade behind the blue
and infrared emission provides three builtin loops:

* ``blue_fwm``  : 780 + 776 absorbed, 5230 and 420 emitted,
* ``ir_fwm``    : 776 absorbed, 5230 / 2730 / 1370 emitted,
* ``ir_swm``    : both pumps absorbed, the cycle returning through the
  ground state with a re-emission at the 780 nm transition.

Wavelengths are the nominal transition values in nanometres; photon-energy
closure around each cycle is enforced to 0.5 %.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import (
    EnergyClosureError,
    LoopClosureError,
    LoopParseError,
    MissingPumpChargeError,
)

__all__ = [
    "Transition",
    "ProcessLoop",
    "OamLedger",
    "parse_loop",
    "render_loop",
    "energy_residual",
    "predict_oam",
    "builtin_loop",
    "BUILTIN_LOOPS",
]

ENERGY_TOLERANCE = 0.005


@dataclass(frozen=True)
class Transition:
    """One photon exchange between two levels."""

    upper: str
    lower: str
    wavelength_nm: float
    direction: str  # "absorb" | "emit"
    pump: bool = False
    detect: bool = False

    def __post_init__(self):
        if self.direction not in ("absorb", "emit"):
            raise ValueError(f"direction must be absorb or emit, got {self.direction!r}")
        if not self.upper or not self.lower:
            raise ValueError("level labels must be non-empty")
        if not self.wavelength_nm > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength_nm}")
        if self.pump and self.direction != "absorb":
            raise ValueError("only absorbed photons can be pumps")
        if self.detect and self.direction != "emit":
            raise ValueError("only emitted photons can be detected")

    @property
    def role(self) -> str:
        if self.pump:
            return "pump"
        if self.detect:
            return "generated"
        return "internal"

    @property
    def start_level(self) -> str:
        return self.lower if self.direction == "absorb" else self.upper

    @property
    def end_level(self) -> str:
        return self.upper if self.direction == "absorb" else self.lower


@dataclass(frozen=True)
class ProcessLoop:
    """A closed cycle of transitions with validated energy closure."""

    name: str
    steps: tuple[Transition, ...]

    def __post_init__(self):
        if len(self.steps) < 2:
            raise LoopClosureError(f"loop {self.name!r} needs at least two steps")
        for prev, step in zip(self.steps, self.steps[1:]):
            if prev.end_level != step.start_level:
                raise LoopClosureError(
                    f"loop {self.name!r}: step from {step.start_level!r} does not "
                    f"continue from {prev.end_level!r}"
                )
        if self.steps[-1].end_level != self.steps[0].start_level:
            raise LoopClosureError(
                f"loop {self.name!r} ends on {self.steps[-1].end_level!r}, "
                f"not the starting level {self.steps[0].start_level!r}"
            )
        if not any(s.direction == "absorb" for s in self.steps):
            raise LoopClosureError(f"loop {self.name!r} absorbs no photon")
        if not any(s.direction == "emit" for s in self.steps):
            raise LoopClosureError(f"loop {self.name!r} emits no photon")
        residual = energy_residual(self)
        if residual > ENERGY_TOLERANCE:
            raise EnergyClosureError(
                f"loop {self.name!r} misses energy closure: residual "
                f"{residual:.3g} > {ENERGY_TOLERANCE}"
            )

    @property
    def start_level(self) -> str:
        return self.steps[0].start_level

    @property
    def pumps(self) -> tuple[Transition, ...]:
        return tuple(s for s in self.steps if s.pump)

    @property
    def detected(self) -> Transition | None:
        for s in self.steps:
            if s.detect:
                return s
        return None


@dataclass(frozen=True)
class OamLedger:
    """Integer topological charge assigned to every step of a loop."""

    loop: ProcessLoop
    charges: tuple[int, ...]
    detected_index: int | None

    def __post_init__(self):
        if len(self.charges) != len(self.loop.steps):
            raise ValueError("one charge per loop step required")
        absorbed = sum(c for c, s in zip(self.charges, self.loop.steps)
                       if s.direction == "absorb")
        emitted = sum(c for c, s in zip(self.charges, self.loop.steps)
                      if s.direction == "emit")
        if absorbed != emitted:
            raise ValueError(
                f"ledger breaks charge conservation: absorbed {absorbed}, "
                f"emitted {emitted}"
            )

    def charge_at(self, wavelength_nm: float, direction: str = "emit") -> int:
        for c, s in zip(self.charges, self.loop.steps):
            if s.direction == direction and abs(s.wavelength_nm - wavelength_nm) < 0.5:
                return c
        raise KeyError(f"no {direction} step at {wavelength_nm} nm in {self.loop.name!r}")

    @property
    def detected_charge(self) -> int:
        if self.detected_index is None:
            raise KeyError(f"loop {self.loop.name!r} has no detected step")
        return self.charges[self.detected_index]


def energy_residual(loop: ProcessLoop) -> float:
    """Relative mismatch of summed photon energies around the cycle."""
    absorbed = sum(1.0 / s.wavelength_nm for s in loop.steps if s.direction == "absorb")
    emitted = sum(1.0 / s.wavelength_nm for s in loop.steps if s.direction == "emit")
    return abs(absorbed - emitted) / absorbed


# ---------------------------------------------------------------------------
# textual format
#
#   loop ::= "loop" name ":" level (step level)+
#   step ::= "-(" direction wavelength "nm" ["," "pump"] ["," "detect"] ")->"
#   direction ::= "absorb" | "emit"


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _line_col(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message: str, pos: int | None = None) -> LoopParseError:
        line, col = self._line_col(self.pos if pos is None else pos)
        return LoopParseError(message, line, col)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def literal(self, token: str):
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            raise self.error(f"expected {token!r}")
        self.pos += len(token)

    def try_literal(self, token: str) -> bool:
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def word(self, what: str) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] in "_/+."
        ):
            self.pos += 1
        if self.pos == start:
            raise self.error(f"expected {what}")
        return self.text[start:self.pos]

    def number(self) -> float:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isdigit() or self.text[self.pos] in ".+-eE"
        ):
            self.pos += 1
        if self.pos == start:
            raise self.error("expected a number")
        try:
            return float(self.text[start:self.pos])
        except ValueError:
            raise self.error("malformed number", start) from None

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _parse_loop_text(text: str) -> ProcessLoop:
    s = _Scanner(text)
    s.literal("loop")
    name = s.word("a loop name")
    s.literal(":")
    level = s.word("a level label")
    steps: list[Transition] = []
    while True:
        s.literal("-(")
        direction = s.word("absorb or emit")
        if direction not in ("absorb", "emit"):
            raise s.error(f"direction must be absorb or emit, got {direction!r}")
        wavelength = s.number()
        s.literal("nm")
        pump = False
        detect = False
        while s.try_literal(","):
            flag = s.word("pump or detect")
            if flag == "pump":
                pump = True
            elif flag == "detect":
                detect = True
            else:
                raise s.error(f"unknown flag {flag!r}")
        s.literal(")->")
        nxt = s.word("a level label")
        if direction == "absorb":
            tr = Transition(upper=nxt, lower=level, wavelength_nm=wavelength,
                            direction="absorb", pump=pump, detect=detect)
        else:
            tr = Transition(upper=level, lower=nxt, wavelength_nm=wavelength,
                            direction="emit", pump=pump, detect=detect)
        steps.append(tr)
        level = nxt
        if s.at_end():
            break
    return ProcessLoop(name, tuple(steps))


def parse_loop(text: str) -> ProcessLoop:
    """Parse one loop description; bare builtin names resolve directly."""
    stripped = text.strip()
    if stripped in BUILTIN_LOOPS:
        return BUILTIN_LOOPS[stripped]
    return _parse_loop_text(text)


def render_loop(loop: ProcessLoop) -> str:
    """Canonical one-line text for a loop; parses back to an equal value."""
    parts = [f"loop {loop.name}: {loop.start_level}"]
    for step in loop.steps:
        wl = step.wavelength_nm
        wl_text = f"{int(wl)}" if wl == int(wl) else repr(wl)
        flags = ""
        if step.pump:
            flags += ", pump"
        if step.detect:
            flags += ", detect"
        parts.append(f" -({step.direction} {wl_text}nm{flags})-> {step.end_level}")
    return "".join(parts)


BUILTIN_LOOP_TEXT = {
    "blue_fwm": (
        "loop blue_fwm: 5S1/2 -(absorb 780nm, pump)-> 5P3/2 "
        "-(absorb 776nm, pump)-> 5D5/2 -(emit 5230nm)-> 6P3/2 "
        "-(emit 420nm, detect)-> 5S1/2"
    ),
    "ir_fwm": (
        "loop ir_fwm: 5P3/2 -(absorb 776nm, pump)-> 5D5/2 "
        "-(emit 5230nm)-> 6P3/2 -(emit 2730nm)-> 6S1/2 "
        "-(emit 1370nm, detect)-> 5P3/2"
    ),
    "ir_swm": (
        "loop ir_swm: 5S1/2 -(absorb 780nm, pump)-> 5P3/2 "
        "-(absorb 776nm, pump)-> 5D5/2 -(emit 5230nm)-> 6P3/2 "
        "-(emit 2730nm)-> 6S1/2 -(emit 1370nm, detect)-> 5P3/2 "
        "-(emit 780nm)-> 5S1/2"
    ),
}


BUILTIN_LOOPS = {name: _parse_loop_text(text) for name, text in BUILTIN_LOOP_TEXT.items()}


def builtin_loop(name: str) -> ProcessLoop:
    if name not in BUILTIN_LOOPS:
        raise KeyError(f"unknown builtin loop {name!r}; have {sorted(BUILTIN_LOOPS)}")
    return BUILTIN_LOOPS[name]


# ---------------------------------------------------------------------------
# charge assignment


def predict_oam(
    loop: ProcessLoop,
    hypothesis: str,
    pump_oam: Mapping[float, int],
) -> OamLedger:
    """Assign every photon in the loop an integer topological charge.

    All pump charge goes to one designated emission, everything else
    stays uncharged, so conservation holds exactly:

    * ``fwm``: the designated receiver is the detected emission,
    * ``swm``: the receiver is the re-emission closest in wavelength to a
      pump (the ground-state return), which strips the detected field.
    """
    if hypothesis not in ("fwm", "swm"):
        raise ValueError(f"hypothesis must be fwm or swm, got {hypothesis!r}")

    def pump_charge(step: Transition) -> int:
        for wl, ell in pump_oam.items():
            if abs(float(wl) - step.wavelength_nm) < 0.5:
                if ell != int(ell):
                    raise ValueError(f"pump charge must be an integer, got {ell!r}")
                return int(ell)
        raise MissingPumpChargeError(
            f"no charge given for the {step.wavelength_nm} nm pump in {loop.name!r}"
        )

    charges = [0] * len(loop.steps)
    total = 0
    for i, step in enumerate(loop.steps):
        if step.pump:
            charges[i] = pump_charge(step)
            total += charges[i]

    emits = [i for i, s in enumerate(loop.steps) if s.direction == "emit"]
    if hypothesis == "fwm":
        receiver = next((i for i in emits if loop.steps[i].detect), None)
        if receiver is None:
            raise ValueError(f"loop {loop.name!r} marks no detected emission")
    else:
        pump_wavelengths = [s.wavelength_nm for s in loop.pumps]
        if not pump_wavelengths:
            raise ValueError(f"loop {loop.name!r} has no pump steps")
        def distance(i):
            return min(abs(loop.steps[i].wavelength_nm - p) for p in pump_wavelengths)
        receiver = min(emits, key=distance)
        if distance(receiver) > 0.02 * loop.steps[receiver].wavelength_nm:
            raise ValueError(
                f"loop {loop.name!r} has no re-emission near a pump wavelength; "
                "the swm assignment needs the ground-state return"
            )
    charges[receiver] = total

    detected_index = next((i for i, s in enumerate(loop.steps) if s.detect), None)
    return OamLedger(loop, tuple(charges), detected_index)
