"""Runlength-limited subcodes of Reed-Muller codes: constructions, bounds and experiments."""

__version__ = "0.1.0"

from .gf2 import AffineSolutionSet, BitWord, Gf2Matrix, rank, restrict_columns, rref, solve_affine
from .rmcode import CoordinateOrdering, RmCode, WeightDistribution, build, gray_permutation

__all__ = [
    "__version__",
    "AffineSolutionSet",
    "BitWord",
    "Gf2Matrix",
    "rank",
    "rref",
    "solve_affine",
    "restrict_columns",
    "CoordinateOrdering",
    "RmCode",
    "WeightDistribution",
    "build",
    "gray_permutation",
]
