class SaliencyError(Exception):
    """Base class for all errors raised by dksaliency."""


class ImageError(SaliencyError):
    pass


class SegmentationError(SaliencyError):
    pass


class GraphError(SaliencyError):
    pass


class ConvergenceError(SaliencyError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class EvaluationError(SaliencyError):
    pass


class PipelineError(SaliencyError):
    """Wraps a failure inside run_pipeline with the name of the failing stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
