"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class InsufficientDataError(ToolkitError):
    """Too few observations for the requested statistic."""


class DegenerateInputError(ToolkitError):
    """Input that makes the requested quantity undefined (e.g. zero denominator)."""


class DesignError(ToolkitError):
    """Design matrix cannot be built (rank deficiency, missing columns)."""


class ScoringError(ToolkitError):
    """A scorer failed to produce scores for a record."""

    def __init__(self, message: str, video_id: str | None = None):
        super().__init__(message)
        self.video_id = video_id


class ProtocolError(ScoringError):
    """Remote scorer returned a malformed or out-of-range payload."""


class MissingScoreError(ScoringError):
    """Replay score file has no entry for the requested video."""


class ConfigError(ToolkitError):
    """Pipeline configuration failed validation."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class InternalConsistencyError(ToolkitError):
    """A result violates an identity that should hold by construction."""
