"""favardlab: a numerical laboratory for Favard length of self-similar disc
fractals, their projection multiplicity functions, and the Fourier-side
products that control both."""

from ._kernels import active_backend
from .errors import BudgetError, InvalidAddressError, PreconditionError
from .geometry import (
    IntervalUnion,
    NeedleEstimate,
    buffon_mc,
    favard_quadrature,
    measure,
    project_disc,
    project_set,
)
from .multiplicity import (
    StepFunction,
    estimate_chain_report,
    exceptional_set_scan,
    level_set,
    lp_norm,
    maximal_function,
    multiplicity_function,
)
from .selfsimilar import (
    DiscSet,
    SimilaritySystem,
    center,
    disc_set,
    gasket_system,
    iter_centers,
    resolve_system,
    system_from_json,
    system_to_json,
    theta_period,
    validate_general_system,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "DiscSet",
    "IntervalUnion",
    "InvalidAddressError",
    "NeedleEstimate",
    "PreconditionError",
    "SimilaritySystem",
    "StepFunction",
    "active_backend",
    "buffon_mc",
    "center",
    "disc_set",
    "estimate_chain_report",
    "exceptional_set_scan",
    "favard_quadrature",
    "gasket_system",
    "iter_centers",
    "level_set",
    "lp_norm",
    "maximal_function",
    "measure",
    "multiplicity_function",
    "project_disc",
    "project_set",
    "resolve_system",
    "system_from_json",
    "system_to_json",
    "theta_period",
    "validate_general_system",
]
