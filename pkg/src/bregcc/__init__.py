"""Backward and forward Bregman circumcenters of finite point sets."""
from .backward import (
    BackwardProblem,
    backward_cc_via_forward_projection,
    backward_circumcenter,
    backward_E_representative,
    backward_pseudo_circumcenter,
    backward_pseudo_via_projection,
)
from .bregman import (
    ProjectionResult,
    backward_bregman_project,
    bregman_distance,
    bregman_distance_dual_check,
    forward_bregman_project,
)
from .duality import DualityReport, alternative_operators, check_E_duality, check_pseudo_duality
from .estimators import BregmanCircumcenter
from .exceptions import (
    DomainError,
    InputError,
    InvariantViolation,
    NoProjectionError,
    UnsupportedFunctionError,
)
from .forward import (
    ForwardProblem,
    forward_circumcenter,
    forward_E_representative,
    forward_pseudo_circumcenter,
    forward_pseudo_via_projection,
)
from .legendre import CATALOG, LegendreFunction, Membership, get_function, register_function
from .linalg import (
    AffineFlat,
    Kind,
    SolutionSet,
    affinely_independent,
    classical_circumcenter,
    euclid_project,
    gram,
    solve_affine_constraints,
)

__version__ = "0.1.0"
