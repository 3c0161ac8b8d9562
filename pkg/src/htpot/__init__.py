"""Numerical potential theory on prototype Heisenberg-type groups.

The package provides the group algebra (composition, dilations, validation of
the defining matrices), the homogeneous-gauge fundamental solution of the
sub-Laplacian with numerical flux calibration, finite-difference horizontal
operators, reflection (method-of-images) Green-function candidates on
half-spaces, wedges and strips with controlled series truncation and measured
boundary traces, and volume/layer potentials for Dirichlet problems.
"""

from .errors import (
    CalibrationError,
    DomainError,
    PoleError,
    StructureError,
    TruncationError,
)
from .fundamental import (
    FundamentalSolutionParams,
    GaugeValue,
    calibrate_c,
    flux,
    gamma,
    gamma_pole,
    gauge,
    horizontal_gradient_gamma,
    params_for,
    quasi_distance,
)
from .geometry import Box
from .groups import (
    GroupSpec,
    Point,
    ValidationReport,
    compose,
    dilate,
    group_from_config,
    homogeneous_dimension,
    inverse,
    make_abelian,
    make_heisenberg,
    make_quaternionic,
    origin,
    validate_group,
)
from .images import (
    CharacteristicSet,
    Hyperplane,
    ImageCharge,
    Strip,
    TraceReport,
    TruncationPolicy,
    Wedge,
    boundary_trace_scan,
    characteristic_points,
    domain_from_config,
    green_eval,
    green_eval_grid,
    green_symmetry_check,
    half_space,
    quadrant,
    reflect,
    strip_images,
    strip_tail_bound,
    wedge_images,
)
from .operators import (
    ResidualReport,
    ScalarField,
    StencilSpec,
    apply_sublaplacian,
    apply_sublaplacian_composed,
    apply_vector_field,
    harmonicity_residual,
    horizontal_gradient,
)
from .dirichlet import (
    FaceDatum,
    ProblemSpec,
    QuadratureSpec,
    SolveReport,
    SupportedField,
    layer_potential,
    solve,
    solution_field,
    verify_solution,
    volume_potential,
)

__version__ = "0.1.0"
