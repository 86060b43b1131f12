"""Exception hierarchy shared across the engine."""


class EventLabError(Exception):
    """Base class for all engine errors."""


class ManifestError(EventLabError):
    """Dataset manifest missing, malformed, or violating an invariant."""


class DetectionsError(EventLabError):
    """Per-frame detections file malformed or violating an invariant."""


class ParseError(EventLabError):
    """Rule DSL could not be parsed; carries source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class RuleError(EventLabError):
    """Events rejected by validation where a hard failure is required."""


class TrackingError(EventLabError):
    """Internal contract violation between tracker and matcher."""


class UndefinedMetricError(EventLabError):
    """Metric has no defined value for the given inputs (never silently 0 or 1)."""


class ProjectError(EventLabError):
    """Project directory missing, malformed, or version-mismatched."""


class RunError(EventLabError):
    """Labeling run could not start or failed on I/O."""
