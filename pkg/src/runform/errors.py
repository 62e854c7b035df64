"""Engine error types shared across modules."""


class EngineError(Exception):
    """Base class for all engine errors."""


class MotionFormatError(EngineError):
    """Malformed or invalid pose-sequence document."""


class NoHeadingError(EngineError):
    """Sequence has no horizontal root displacement; heading cannot be inferred."""


class NoGaitError(EngineError):
    """Foot trajectories contain no usable gait extrema."""


class NoCycleError(EngineError):
    """Fewer than two right-foot landings; no complete cycle."""


class NoOverlapError(EngineError):
    """Two sequences share fewer than two key events."""


class NothingToCompareError(EngineError):
    """Attribute series have no paired cycles with values."""


class UnreachableTargetError(EngineError):
    """Corrected pose target exceeds limb reach or rotation bounds."""


class UnknownSuggestionError(EngineError):
    """Suggestion id not present in the session report."""


class PipelineError(EngineError):
    """Stage-labelled failure raised while orchestrating a session."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
