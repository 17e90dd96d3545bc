"""Exact computation of A-infinity secondary multiplications, Hochschild
obstruction classes, realisability verdicts and graded localisations for
finitely presented graded algebras over prime fields."""

__version__ = "0.1.0"

from .exactla import GF, QQ, Matrix
from .graded import (
    GradedAlgebraPresentation,
    GradedMap,
    GradedVectorSpace,
    ModulePresentation,
    WindowOverflowError,
)
from .hochschild import HochschildCochain, ObstructionVerdict, cup, delta, yoneda

__all__ = [
    "GF",
    "QQ",
    "Matrix",
    "GradedAlgebraPresentation",
    "GradedMap",
    "GradedVectorSpace",
    "ModulePresentation",
    "WindowOverflowError",
    "HochschildCochain",
    "ObstructionVerdict",
    "cup",
    "delta",
    "yoneda",
    "__version__",
]
