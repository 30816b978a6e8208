"""f-divergences, their pairwise joint ranges and best-constant inequalities."""

from .bounds import (
    CertificateResult,
    RatioLimits,
    certify_lower,
    certify_upper,
    d2d3_boundary,
    d2d3_range_membership,
    pinsker_floor_check,
    ratio_limits,
)
from .divcore import (
    ContractViolation,
    DivergenceError,
    Distribution,
    Generator,
    conjugate,
    divergence,
    from_callable,
    two_point_divergence,
)
from .generators import GeneratorSpec, make_power, parse_spec, resolve
from .jointrange import (
    DivergencePair,
    GridSpec,
    RangeAtlas,
    TwoPointParam,
    achievability_oracle,
    hull_contains,
    jacobian_determinant,
    mixture_pair,
    sample_atlas,
    two_point_pair,
)

__version__ = "0.1.0"
