"""Numerics for curvature of large circles, distance phase functions, and
period integrals on explicitly given nonpositively curved planes."""

from .errors import (
    ConfigError,
    DomainError,
    HorocurvError,
    InternalError,
    NoConvergence,
    NonPositiveMagnitude,
    PreconditionError,
    RadiusTooSmall,
    UnderResolved,
)
from .geodesics import (
    DEFAULT_STEP,
    GeodesicPath,
    connect,
    connect_core,
    distance,
    geodesic_ivp,
    geodesic_span,
    transport_perp,
)
from .jacobi import (
    AsymptoticCurvature,
    CurvatureGap,
    JacobiSolution,
    asymptotic_curvature,
    circle_curvature,
    circle_curvature_profile,
    curvature_gap,
    hs_solution,
    jacobi_bvp,
    jacobi_ivp,
    limit_solution,
    riccati_residual,
)
from .oscillatory import (
    DecayFit,
    LatticeEigenfunction,
    OscillatoryResult,
    PeriodResult,
    Window,
    bump_window,
    closed_window,
    decay_fit,
    oscillatory_integral_2d,
    period_integral,
    torus_lattice_modes,
)
from .phase import (
    Classification,
    CriticalReport,
    CriticalSearch,
    Isometry,
    ParamCurve,
    PhaseField,
    circle_curve,
    classify_critical,
    compose,
    covariant_accel,
    find_critical_points,
    geodesic_curvature,
    graph_curve,
    line_curve,
    phase_gradient,
    phase_hessian,
    phase_hessian_checked,
    sampled_curve,
    shipped_configuration,
    transformed_curve,
    translation,
    unit_speed_reparam,
    validate_isometry,
    y_shift,
)
from .surfaces import (
    CurvatureReport,
    MetricSurface,
    Tangent2,
    christoffel_at,
    conformal_surface,
    gaussian_curvature,
    metric_at,
    preset,
    random_unit_tangent,
    unit_tangent,
    validate_nonpositive,
    warped_surface,
)

__version__ = "0.1.0"
