"""Determinantal kernels and Monte-Carlo simulation for noncolliding
Brownian particles launched from the zeros of the Airy function."""
from .errors import (
    AiryRelaxError,
    ArgumentError,
    ConditionViolationError,
    ConvergenceError,
    DomainOverflowError,
)
from .airy import (
    AiryConstants,
    AiryZeroTable,
    ai,
    ai_prime,
    airy_constants,
    airy_zeros,
    airy_zeta,
)
from .configs import (
    ConditionReport,
    PointConfiguration,
    builtin,
    check_conditions,
    transform,
)
from .products import ai_N, growth_bound, phi_A, phi_p, pi_p, s_decomposition
from .kernels import (
    FourierAiryExpansion,
    KernelSpec,
    airy_bilinear_exp,
    airy_gauss_transform,
    airy_kernel,
    ext_airy_kernel,
    fourier_airy_project,
    g_factor,
    kernel_batch,
    kernel_finite,
    kernel_infinite,
    kernel_relaxation,
    p_ai,
    p_sin,
    q_kernel,
    sine_kernel,
)
from .correlations import (
    CorrelationQuery,
    GapQuery,
    correlation_function,
    density_profile,
    initial_recovery,
    relaxation_residual,
    tracy_widom,
)
from .sim import (
    Ensemble,
    SimPlan,
    drift_coefficient,
    estimate_correlation,
    simulate,
)

__version__ = "0.1.0"
