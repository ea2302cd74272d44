from .config import (
    WittConfig,
    GroupConfig,
    SearchConfig,
    JobConfig,
)
from .rings import FiniteField, ZmodPM, QuotientPoly, IntegerPoly
from .witt import WittRing, WittVec
from .matrices import MatW, PMat
from .groups import GroupSpec
from .displays import Display, PrecisionBudget, SlopeVec
from .rz import BasePoint, RZPoint, LatticeCoset
from .deform import SquareZeroData

__all__ = [
    "WittConfig",
    "GroupConfig",
    "SearchConfig",
    "JobConfig",
    "FiniteField",
    "ZmodPM",
    "QuotientPoly",
    "IntegerPoly",
    "WittRing",
    "WittVec",
    "MatW",
    "PMat",
    "GroupSpec",
    "Display",
    "PrecisionBudget",
    "SlopeVec",
    "BasePoint",
    "RZPoint",
    "LatticeCoset",
    "SquareZeroData",
]
