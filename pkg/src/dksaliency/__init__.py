"""Salient region detection on superpixel graphs, refined by dense k-subgraph search."""
from .composer import PipelineParams, PipelineResult, analyze, refine, run_pipeline
from .errors import (
    ConvergenceError,
    EvaluationError,
    GraphError,
    ImageError,
    PipelineError,
    SaliencyError,
    SegmentationError,
)

__version__ = "0.1.0"

__all__ = [
    "PipelineParams",
    "PipelineResult",
    "analyze",
    "refine",
    "run_pipeline",
    "SaliencyError",
    "ImageError",
    "SegmentationError",
    "GraphError",
    "ConvergenceError",
    "EvaluationError",
    "PipelineError",
]
