"""Bandlimited plane curves through point sets by iterative spectral filtering."""

from .bezier import (
    BezierSpline,
    PointSet,
    bbox_diameter,
    eval_spline,
    fit_closed_spline,
    fit_open_spline,
    fit_spline,
    knot_continuity,
)
from .corrections import (
    NearestParams,
    PerturbationBasis,
    RigidFix,
    apply_perturbations,
    close_sprime,
    nearest_parameters,
    perturbation_basis,
    reposition,
)
from .driver import (
    FitConfig,
    FitResult,
    check_termination,
    coef_budget,
    compute_thresholds,
    filter_bandwidth,
    residual_at_samples,
    run_continuation,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    CurveFitError,
    DegenerateInputError,
    DomainError,
    InputSizeError,
    NonPeriodicIntegrandError,
    NotClosedError,
    ParseError,
    SingularParametrizationError,
    SingularSystemError,
)
from .kinematics import (
    CurveState,
    detrend_theta,
    discretize_spline,
    extract_kinematics,
    reconstruct_curve,
    retrend_theta,
    unwrap_angles,
)
from .spectral import (
    CHEBYSHEV,
    FOURIER,
    SpectralSeries,
    cheb_differentiate,
    cheb_forward,
    cheb_integrate,
    cheb_inverse,
    cheb_nodes,
    filter_chebyshev,
    filter_fourier,
    fourier_differentiate,
    fourier_forward,
    fourier_integrate,
    fourier_inverse,
    fourier_nodes,
    gaussian_gain,
)

__version__ = "0.1.0"
