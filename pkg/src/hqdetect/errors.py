"""Exception hierarchy shared by every hqdetect module."""


class HQDetectError(Exception):
    """Base class for all library errors."""


# -- numerical / quantum ----------------------------------------------------

class NumericalError(HQDetectError, ValueError):
    """Raised for invalid numerical inputs (exit code 4 in the CLI)."""


class NotNormalized(NumericalError):
    pass


class EmptyInput(NumericalError):
    pass


class OutOfRange(NumericalError):
    pass


class DimensionMismatch(NumericalError):
    pass


class InvalidIndices(NumericalError):
    pass


class ResourceOverflow(NumericalError, OverflowError):
    """A resource count left the signed 64-bit range."""


class UnsupportedGate(NumericalError):
    pass


class LengthMismatch(NumericalError):
    pass


class EmptyBatch(NumericalError):
    pass


class NotHermitian(NumericalError):
    pass


# -- classical models and metrics -------------------------------------------

class ShapeMismatch(NumericalError):
    pass


class EmptyDataset(NumericalError):
    pass


class LabelOutOfRange(NumericalError):
    pass


class DegenerateLabels(NumericalError):
    pass


class EmptyMatrix(NumericalError):
    pass


class UnsupportedKind(HQDetectError, ValueError):
    pass


# -- data ingestion ---------------------------------------------------------

class DataError(HQDetectError):
    """Raised for unreadable or malformed data (exit code 3 in the CLI)."""


class InvalidSpec(HQDetectError, ValueError):
    """Generator settings are inconsistent."""


class InvalidLayer(HQDetectError, ValueError):
    pass


class MissingColumn(DataError):
    def __init__(self, column):
        super().__init__(f"missing required column {column!r}")
        self.column = column


class ParseError(DataError):
    def __init__(self, row, message):
        super().__init__(f"row {row}: {message}")
        self.row = row


class EmptyFile(DataError):
    pass


class ModelLoadError(DataError):
    pass


# -- pipeline / CLI ---------------------------------------------------------

class ArityMismatch(HQDetectError, ValueError):
    pass


class InvalidThreshold(HQDetectError, ValueError):
    pass


class NegativeWeight(HQDetectError, ValueError):
    pass


class ConfigError(HQDetectError):
    """Bad experiment configuration (exit code 2 in the CLI)."""

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field
