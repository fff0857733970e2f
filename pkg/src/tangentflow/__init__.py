"""Exponential and logarithm of formal vector fields tangent to the identity,
with exact checks of the Gevrey majorant estimates behind them."""

from .errors import (
    DimensionError,
    DocumentError,
    InconclusiveSupError,
    InsufficientDataError,
    NotInDomainError,
    NotTangentError,
    SingularScalingError,
    SubstitutionError,
    TangentFlowError,
    TruncationError,
)
from .exp_log import Diffeo, compose, exp_field, log_diffeo, nu, scale_conjugate
from .majorant import (
    FitResult,
    GevreyParams,
    find_gevrey_radius,
    gevrey_dominated,
    gevrey_fit,
    precede,
)
from .series import (
    INFINITY,
    Series,
    add_scale,
    coef_deg,
    diff,
    diff_sum,
    h_poly,
    mul,
    order,
    substitute,
    truncate,
    variable,
)
from .vector_field import VectorField, apply, field_order, power_apply

__version__ = "0.1.0"
