"""Exact arithmetic on iterated-logarithm germs, with a numeric ODE harness.

The symbolic side works in the differential field generated by ``x``,
``exp`` of polynomials and the iterated logarithms ``ell(n)``; the numeric
side integrates ``Y'' + fY = 0`` and ``4Y'' + fY = 0`` and measures the
constants in the associated growth bounds.
"""

from .bounds import (
    BoundReport,
    gronwall_check,
    growth_bound_report,
    riccati_residual,
    riccati_z,
    wronskian_report,
)
from .diffpoly import (
    DiffPoly,
    Y,
    chvar_closed_form,
    chvar_transform,
    comp_conj,
    eval_poly,
    eventual_sign_of_eval,
    mul_conj,
    riccati_poly,
)
from .errors import (
    CacheBoundError,
    DomainError,
    HardyTowerError,
    LoweringError,
    NotApplicable,
    ParseError,
    PoleError,
    StepSizeUnderflow,
    UnsupportedComposition,
    UnsupportedPower,
    ZeroDivisionInField,
)
from .evaluate import compile_elem, domain_threshold, eval_at, eval_sign
from .field import (
    FieldElem,
    LCombo,
    Verdict,
    compare,
    compose_exp,
    compose_log,
    derive,
    logderiv,
    omega_map,
    sigma_map,
    sign_eventual,
    valuation,
    x,
)
from .monomial import INFINITY, TowerMonomial, ValVector, dominance_cmp
from .ode import Trajectory, integrate, pair
from .parser import parse_diffpoly, parse_expr
from .printing import print_canonical, print_diffpoly
from .tower import (
    TowerCache,
    ell,
    g,
    gamma,
    identity_suite,
    lambda_,
    omega_seq,
    pc_check,
)
from .witness import WitnessReport, witness_pipeline

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CacheBoundError",
    "DiffPoly",
    "DomainError",
    "FieldElem",
    "HardyTowerError",
    "INFINITY",
    "LCombo",
    "LoweringError",
    "NotApplicable",
    "ParseError",
    "PoleError",
    "StepSizeUnderflow",
    "TowerCache",
    "TowerMonomial",
    "Trajectory",
    "UnsupportedComposition",
    "UnsupportedPower",
    "ValVector",
    "Verdict",
    "WitnessReport",
    "Y",
    "ZeroDivisionInField",
    "chvar_closed_form",
    "chvar_transform",
    "comp_conj",
    "compare",
    "compile_elem",
    "compose_exp",
    "compose_log",
    "derive",
    "domain_threshold",
    "dominance_cmp",
    "ell",
    "eval_at",
    "eval_poly",
    "eval_sign",
    "eventual_sign_of_eval",
    "g",
    "gamma",
    "gronwall_check",
    "growth_bound_report",
    "identity_suite",
    "integrate",
    "lambda_",
    "logderiv",
    "mul_conj",
    "omega_map",
    "omega_seq",
    "pair",
    "parse_diffpoly",
    "parse_expr",
    "pc_check",
    "print_canonical",
    "print_diffpoly",
    "riccati_poly",
    "riccati_residual",
    "riccati_z",
    "sigma_map",
    "sign_eventual",
    "valuation",
    "witness_pipeline",
    "wronskian_report",
    "x",
]
