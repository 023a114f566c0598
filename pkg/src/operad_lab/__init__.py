"""Point-level computations with disc, sphere and Fulton-MacPherson operads.

Exact rational arithmetic by default (``fractions.Fraction``), floats on
request. See the README for the command line and the verification suites.
"""

from .disc_operads import DiscConfig, classify, compose, decompose
from .errors import (BackendError, DomainError, NumericalError, OperadLabError, ParseError,
                     PreconditionError, ResourceError, SamplingError, UsageError, ValidationError)
from .fulton_macpherson import FMPoint
from .geometry import INF, Backend, Basepoint, DirectSumNorm, Norm
from .trees import LabelledTree

__version__ = "0.1.0"

__all__ = [
    "DiscConfig", "classify", "compose", "decompose", "FMPoint", "LabelledTree",
    "INF", "Backend", "Basepoint", "DirectSumNorm", "Norm",
    "OperadLabError", "DomainError", "BackendError", "PreconditionError", "ValidationError",
    "ResourceError", "NumericalError", "SamplingError", "ParseError", "UsageError",
]
