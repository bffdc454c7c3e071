"""coxeter_walls - Coxeter combinatorics and Euclidean reflection-group checks for parabolic subgroups."""

from coxeter_walls.models import (
    INFINITY,
    CheckResult,
    CoxeterSystem,
    Element,
    EuclideanRealization,
    GeneratorSubset,
    RunReport,
    VerifyConfig,
)
from coxeter_walls.coxeter import ball, load_system, new_system, normal_form
from coxeter_walls.geometry import build_realization
from coxeter_walls.engine import VerificationEngine

__version__ = "0.1.0"

__all__ = [
    "INFINITY",
    "CheckResult",
    "CoxeterSystem",
    "Element",
    "EuclideanRealization",
    "GeneratorSubset",
    "RunReport",
    "VerifyConfig",
    "VerificationEngine",
    "ball",
    "build_realization",
    "load_system",
    "new_system",
    "normal_form",
]
