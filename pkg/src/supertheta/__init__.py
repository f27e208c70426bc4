"""Theta nullvalues of supersingular principally polarized abelian varieties E^g/H."""

from .ffield import FieldDesc, FieldElement, NilRing, NilElement, make_field
from .pipeline import (PipelineError, ProblemConfig, RunResult, ValidationError, run_pipeline,
                       verify_supersingular)
from .thetanull import ThetaConstants, ThetaNullpoint, fourier_theta, rosenhain_g2

__version__ = "0.1.0"

__all__ = [
    "FieldDesc", "FieldElement", "NilRing", "NilElement", "make_field",
    "PipelineError", "ProblemConfig", "RunResult", "ValidationError", "run_pipeline",
    "verify_supersingular", "ThetaConstants", "ThetaNullpoint", "fourier_theta", "rosenhain_g2",
]
