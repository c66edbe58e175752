"""Exception types shared across the package."""


class GridMismatchError(ValueError):
    """Two fields were combined but live on different grids or wavelengths."""


class DegenerateFieldError(ValueError):
    """An operation required a field with nonzero power."""


class DegenerateImageError(ValueError):
    """An operation required an image with nonzero content."""


class AliasingRiskError(ValueError):
    """A propagation or lens phase would be undersampled on this grid."""


class NoSignalError(ValueError):
    """An analyzer received an image with no usable signal."""


class UnsignedVerdictError(ValueError):
    """A charge verdict with nonzero magnitude has no resolved sign."""


class LoopParseError(ValueError):
    """Malformed process-loop text."""

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class LoopClosureError(ValueError):
    """A process loop does not return to its starting level."""


class EnergyClosureError(ValueError):
    """Photon energies around a process loop do not balance."""


class MissingPumpChargeError(ValueError):
    """A pump transition has no assigned topological charge."""


class UnknownPresetError(ValueError):
    """No preset scenario is registered under the requested name."""


class FieldFormatError(ValueError):
    """Malformed field file."""

    def __init__(self, message, byte_offset):
        super().__init__(f"byte {byte_offset}: {message}")
        self.byte_offset = byte_offset
