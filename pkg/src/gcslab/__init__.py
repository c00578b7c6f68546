"""Gaussian wave packets of a charged particle in a constant electric field.

Exact generalized coherent states, a split-operator reference propagator and
a classifier for when the packet behaves semiclassically.
"""

from .core import (
    PhysicalSetup,
    SeedCoefficients,
    classical_trajectory,
    coefficient_functions,
    from_dimensionless,
    phase_integral,
    q_function,
    to_dimensionless,
)
from .errors import (
    ConfigError,
    DegenerateSeedError,
    DomainError,
    EdgeLeakageError,
    GcsError,
    GridMismatchError,
    HeisenbergViolationError,
    NoMotionError,
    QuadratureError,
)
from .oracle import (
    SpatialGrid,
    l2_distance,
    propagate,
    quadrature_moments,
    sample_gcs,
    schrodinger_residual,
)
from .semiclassical import (
    Regime,
    RegimeVerdict,
    SemiclassicalInput,
    classify,
    classify_field_cs,
    classify_field_gcs,
    classify_free_cs,
    classify_free_gcs,
    physical_conditions_report,
    ratio_R,
    ratios,
    semiclassical_intervals,
)
from .states import (
    GcsState,
    check_uncertainty,
    cs_specialize,
    density,
    evaluate_gcs,
    moments,
    sigma_q_closed_form,
)

__version__ = "0.1.0"
