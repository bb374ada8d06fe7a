"""Exception hierarchy shared across the engine, metric, and service."""


class VizStateError(Exception):
    """Base class; ``code`` is the stable identifier exposed over RPC."""

    code = "INTERNAL"


class MalformedDocument(VizStateError):
    code = "MALFORMED_DOCUMENT"


class SchemaViolation(VizStateError):
    code = "SCHEMA_VIOLATION"


class UnknownPlot(VizStateError):
    code = "UNKNOWN_PLOT"


class InvalidRange(VizStateError):
    code = "INVALID_RANGE"


class CurveOutOfRange(VizStateError):
    code = "CURVE_OUT_OF_RANGE"


class UnknownInteraction(VizStateError):
    code = "UNKNOWN_INTERACTION"


class EmptyCloud(VizStateError):
    code = "EMPTY_CLOUD"


class UnknownSeries(VizStateError):
    code = "UNKNOWN_SERIES"


class NotApplicable(VizStateError):
    code = "NOT_APPLICABLE"


class UnknownFigure(VizStateError):
    code = "UNKNOWN_FIGURE"


class IndexOutOfRange(VizStateError):
    code = "INDEX_OUT_OF_RANGE"
