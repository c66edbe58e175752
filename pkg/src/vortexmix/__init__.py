"""Wave-optics toolkit for orbital-angular-momentum transfer in atomic wave mixing.

The package simulates the full chain behind a charge-transfer experiment:
vortex pump synthesis (spiral phase masks, axicons), angular-spectrum
propagation, tilted-lens astigmatic imaging, self-interference, the
pointwise wave-mixing model for the generated blue and infrared fields,
intensity-only topological-charge analyzers, and the four- versus
six-wave-mixing hypothesis test built on them.
"""

__version__ = "0.1.0"

from .field import (
    ComplexField,
    GridSpec,
    IntensityImage,
    make_grid,
    normalize_power,
    overlap,
    power,
    to_intensity,
)
from .sources import (
    BeamSpec,
    MaskModel,
    apply_axicon,
    apply_spiral_mask,
    gaussian,
    lg_mode,
    magnify,
)
from .propagate import (
    LensSpec,
    angular_spectrum,
    astigmatic_focus_image,
    max_propagation_distance_m,
    min_focal_length_m,
    thin_lens,
    tilted_lens,
)
from .process import (
    OamLedger,
    ProcessLoop,
    Transition,
    builtin_loop,
    energy_residual,
    parse_loop,
    predict_oam,
    render_loop,
)
from .mixing import (
    MixedFields,
    MixingScenario,
    generate_all,
    generate_blue,
    generate_ir,
)
from .diagnostics import (
    ChargeVerdict,
    OamSpectrum,
    ProcessVerdict,
    add_intensity_noise,
    central_dip,
    classify_process,
    dominant_charge,
    fitted_waist_mm,
    oam_spectrum,
    self_interference,
    spiral_count,
    stripe_count,
)
from .fileio import read_field, read_intensity, write_field, write_intensity, write_pgm
from .scenario import (
    FieldReport,
    RunReport,
    ScenarioConfig,
    parse_config,
    preset,
    render_config,
    render_report,
    run_scenario,
)

__all__ = [
    "__version__",
    # field primitives
    "ComplexField", "GridSpec", "IntensityImage", "make_grid",
    "normalize_power", "overlap", "power", "to_intensity",
    # sources
    "BeamSpec", "MaskModel", "apply_axicon", "apply_spiral_mask",
    "gaussian", "lg_mode", "magnify",
    # propagation
    "LensSpec", "angular_spectrum", "astigmatic_focus_image",
    "max_propagation_distance_m", "min_focal_length_m", "thin_lens", "tilted_lens",
    # process loops
    "OamLedger", "ProcessLoop", "Transition", "builtin_loop",
    "energy_residual", "parse_loop", "predict_oam", "render_loop",
    # mixing
    "MixedFields", "MixingScenario", "generate_all", "generate_blue", "generate_ir",
    # diagnostics
    "ChargeVerdict", "OamSpectrum", "ProcessVerdict", "add_intensity_noise",
    "central_dip", "classify_process", "dominant_charge", "fitted_waist_mm",
    "oam_spectrum", "self_interference", "spiral_count", "stripe_count",
    # file formats
    "read_field", "read_intensity", "write_field", "write_intensity", "write_pgm",
    # scenarios
    "FieldReport", "RunReport", "ScenarioConfig", "parse_config", "preset",
    "render_config", "render_report", "run_scenario",
]
