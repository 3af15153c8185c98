"""Exact computations with finitely generated modules over Lambda = Z_p[[T]].

The package covers truncated power series arithmetic, elementary modules
with their functors F and G, finite-level quotients computed by Smith
normal form, iota-twisted duality for finite Lambda-modules and synthetic
towers with bounded control defects.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    InvalidInput,
    InvalidLimit,
    LambdaError,
    LevelTooDeep,
    NoConsistentFit,
    NoIntegerFit,
    PrecisionError,
)
from .ring import DistPoly, PrecisionProfile, RingElem, profile_for  # noqa: E402
from .elementary import Cyclo, ElementaryModule, Generic, PPower  # noqa: E402
from .presented import FiniteWTModule, GrowthFit, PresentedModule  # noqa: E402

__all__ = [
    "Cyclo", "DistPoly", "ElementaryModule", "FiniteWTModule", "Generic", "GrowthFit",
    "InvalidInput", "InvalidLimit", "LambdaError", "LevelTooDeep", "NoConsistentFit",
    "NoIntegerFit", "PPower", "PrecisionError", "PrecisionProfile", "PresentedModule",
    "RingElem", "profile_for",
]
