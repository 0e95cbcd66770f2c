"""Worked examples: isochronous oscillators, Fisher travelling waves and
Israel-Stewart cosmology."""
from .fisher import FisherCase, FormVerificationError, fisher_equation, fisher_implicit_tau, fisher_kink, fisher_setup, form_verdicts
from .isochronous import (
    IsochronousCase,
    PoleError,
    isochronous_A,
    isochronous_derivatives,
    isochronous_equation,
    isochronous_pair,
    isochronous_q,
    isochronous_x,
)
from .israel_stewart import (
    DegenerateParameterError,
    HubbleSolution,
    IsraelStewartAlphas,
    abel_A,
    is_alphas,
    is_dynamic_relation,
    is_equation,
    is_pairs,
    is_particular,
    is_split,
    line_slope,
)

__all__ = [
    "DegenerateParameterError",
    "FisherCase",
    "FormVerificationError",
    "HubbleSolution",
    "IsochronousCase",
    "IsraelStewartAlphas",
    "PoleError",
    "abel_A",
    "fisher_equation",
    "fisher_implicit_tau",
    "fisher_kink",
    "fisher_setup",
    "form_verdicts",
    "is_alphas",
    "is_dynamic_relation",
    "is_equation",
    "is_pairs",
    "is_particular",
    "is_split",
    "isochronous_A",
    "isochronous_derivatives",
    "isochronous_equation",
    "isochronous_pair",
    "isochronous_q",
    "isochronous_x",
    "line_slope",
]
