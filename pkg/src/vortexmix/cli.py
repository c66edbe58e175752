"""Command-line interface.

Verbs:

* ``run <cfg> --out <dir>``: execute a scenario from a config file,
* ``preset <name> [--l780 I] [--l776 I] [--hypothesis H] --out <dir>``,
* ``analyze --method (tilted-lens|spiral|spectrum) <field-file>``,
* ``charge <field-file>``: dominant charge of a stored field.

Exit codes: 0 success, 2 analysis inconclusive, 1 error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .diagnostics import (
    dominant_charge,
    oam_spectrum,
    self_interference,
    spiral_count,
    stripe_count,
)
from .fileio import read_field
from .propagate import LensSpec, astigmatic_focus_image
from .scenario import (
    PRESET_NAMES,
    parse_config,
    preset,
    render_report,
    run_scenario,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortexmix",
        description="Wave-mixing OAM-transfer simulator and charge diagnostics",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario from a config file")
    p_run.add_argument("config", help="path to a scenario config file")
    p_run.add_argument("--out", required=True, help="output directory")

    p_preset = sub.add_parser("preset", help="run a named preset scenario")
    p_preset.add_argument("name", help=f"one of: {', '.join(PRESET_NAMES)}")
    p_preset.add_argument("--l780", type=int, default=None, help="charge on the 780 nm pump")
    p_preset.add_argument("--l776", type=int, default=None, help="charge on the 776 nm pump")
    p_preset.add_argument("--hypothesis", choices=("fwm", "swm"), default=None)
    p_preset.add_argument("--out", required=True, help="output directory")

    p_an = sub.add_parser("analyze", help="measure the charge of a stored field")
    p_an.add_argument("field", help="path to an OAMF1 field file")
    p_an.add_argument(
        "--method",
        required=True,
        choices=("tilted-lens", "spiral", "spectrum"),
    )
    p_an.add_argument("--focal-m", type=float, default=1.0)
    p_an.add_argument("--tilt-deg", type=float, default=30.0)

    p_ch = sub.add_parser("charge", help="dominant charge of a stored field")
    p_ch.add_argument("field", help="path to an OAMF1 field file")
    return parser


def _cmd_run(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    report = run_scenario(cfg, args.out)
    sys.stdout.write(render_report(report))
    if report.process is not None and report.process.verdict == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_preset(args) -> int:
    overrides = {}
    if args.l780 is not None:
        overrides["ell_780"] = args.l780
    if args.l776 is not None:
        overrides["ell_776"] = args.l776
    if args.hypothesis is not None:
        overrides["hypothesis"] = args.hypothesis
    cfg = preset(args.name, **overrides)
    report = run_scenario(cfg, args.out)
    sys.stdout.write(render_report(report))
    if report.process is not None and report.process.verdict == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_analyze(args) -> int:
    field = read_field(args.field)
    if args.method == "spectrum":
        spectrum = oam_spectrum(field)
        ell = spectrum.argmax
        print(f"dominant charge: {ell:+d}")
        for order in sorted(spectrum.weights):
            w = spectrum.weights[order]
            if w >= 1e-4:
                print(f"  l = {order:+d}: {w:.4f}")
        return EXIT_OK
    if args.method == "tilted-lens":
        lens = LensSpec(args.focal_m, args.tilt_deg)
        verdict = stripe_count(astigmatic_focus_image(field, lens), lens)
    else:
        verdict = spiral_count(self_interference(field))
    sign = "?" if verdict.sign is None else f"{verdict.sign:+d}"
    print(f"method {verdict.method}: |l| = {verdict.magnitude}, sign {sign}, "
          f"confidence {verdict.confidence:.3f}")
    if verdict.confidence <= 0.0:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_charge(args) -> int:
    field = read_field(args.field)
    print(f"{dominant_charge(field):+d}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "preset": _cmd_preset,
        "analyze": _cmd_analyze,
        "charge": _cmd_charge,
    }
    try:
        return handlers[args.command](args)
    except BrokenPipeError:
        return EXIT_ERROR
    except Exception as exc:  # surface domain errors as exit code 1
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
