"""Parametric factorization of mixed quadratic-linear Lienard equations

    x'' + mu x'^2/x + F(x) x' + G(x) = 0

with power-law ``F`` and ``G``, particular solutions by quadrature, Abel
reductions and an independent Runge-Kutta oracle.
"""
from .abel import (
    AbelSystem,
    CanonicalAbel,
    ParametricCurve,
    PoleCrossingError,
    abel_parametric,
    fisher_parametric,
    is_canonicalize,
    reduce_to_abel,
    w_from_curve,
)
from .factorizer import (
    FactorPair,
    MixedLienardEquation,
    NoFactorizationError,
    Split,
    check_conditions,
    expand_factorization,
    factorize,
    find_factorization,
    reduce_to_standard,
)
from .powerexpr import DomainError, PowerLawExpr
from .quadrature import SegmentError, SolutionCurve, TimeRangeError, quadrature_solve, time_of_state
from .specialfn import ConvergenceError, hyp2f1
from .verify import ResidualReport, period_estimate, residual_norm, rk_integrate

__version__ = "0.1.0"

__all__ = [
    "AbelSystem",
    "CanonicalAbel",
    "ConvergenceError",
    "DomainError",
    "FactorPair",
    "MixedLienardEquation",
    "NoFactorizationError",
    "ParametricCurve",
    "PoleCrossingError",
    "PowerLawExpr",
    "ResidualReport",
    "SegmentError",
    "SolutionCurve",
    "Split",
    "TimeRangeError",
    "abel_parametric",
    "check_conditions",
    "expand_factorization",
    "factorize",
    "find_factorization",
    "fisher_parametric",
    "hyp2f1",
    "is_canonicalize",
    "period_estimate",
    "quadrature_solve",
    "reduce_to_abel",
    "reduce_to_standard",
    "residual_norm",
    "rk_integrate",
    "time_of_state",
    "w_from_curve",
]
