"""hahnkit: exact arithmetic, root solving, and existential definability
formulas for Hahn series fields over finite residue fields."""

from .errors import HahnkitError
from .evaluator import EvalConfig, EvalVerdict, Evaluator
from .finite_field import FqContext, FqElem
from .hahn import HahnSeries, ValBound, series
from .solver import BranchReport, UPoly, hensel_lift, newton_polygon, puiseux_roots

__all__ = [
    "BranchReport",
    "EvalConfig",
    "EvalVerdict",
    "Evaluator",
    "FqContext",
    "FqElem",
    "HahnkitError",
    "HahnSeries",
    "UPoly",
    "ValBound",
    "hensel_lift",
    "newton_polygon",
    "puiseux_roots",
    "series",
]

__version__ = "0.1.0"
