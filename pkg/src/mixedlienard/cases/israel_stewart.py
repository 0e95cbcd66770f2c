"""Hubble rate of the Israel-Stewart model with bulk viscosity ``xi0 rho^(1/2)``:

    H'' + alpha1 H'^2/H + alpha2 H H' + alpha3 H^3 = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from ..factorizer import FactorPair, MixedLienardEquation, NoFactorizationError, Split, find_factorization
from ..powerexpr import PowerLawExpr

Number = Union[int, float, Fraction]


class DegenerateParameterError(ValueError):
    """``omega_eos = 0`` gives ``alpha1 = -1`` and the power ``H^(1+alpha1)`` collapses."""


def _exact(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(str(value)) if isinstance(value, float) else Fraction(value)


@dataclass(frozen=True)
class IsraelStewartAlphas:
    omega_eos: float
    epsilon: float
    xi0: float
    delta: Fraction
    alpha1: Fraction
    alpha2: float
    alpha3: float

    def as_dict(self) -> dict:
        return {
            "omega_eos": self.omega_eos,
            "epsilon": self.epsilon,
            "xi0": self.xi0,
            "delta": float(self.delta),
            "delta_exact": str(self.delta),
            "alpha1": float(self.alpha1),
            "alpha1_exact": str(self.alpha1),
            "alpha2": self.alpha2,
            "alpha3": self.alpha3,
        }


def is_alphas(omega_eos: Number, epsilon: Number, xi0: Number) -> IsraelStewartAlphas:
    """Model constants.  ``delta`` and ``alpha1`` are exact for decimal ``omega_eos``."""
    w = _exact(omega_eos)
    if w == 0:
        raise DegenerateParameterError("omega_eos = 0 is degenerate: alpha1 = -1 makes mu + 1 = 0")
    if not 0 < w < 1:
        raise ValueError(f"omega_eos must lie in (0, 1), got {omega_eos}")
    if xi0 <= 0:
        raise ValueError("xi0 must be positive")
    delta = Fraction(3, 4) * (1 + w) / (Fraction(1, 2) + w)
    alpha1 = -Fraction(3, 2) / delta
    wf, eps, xi = float(w), float(epsilon), float(xi0)
    alpha2 = 1.5 + 3.0 * (1 + wf) - 9.0 / (4.0 * float(delta)) * (1 + wf) + math.sqrt(3.0) * eps * (1 - wf * wf) / xi
    alpha3 = 2.25 * (1 + wf) + 4.5 * eps * (1 - wf * wf) * ((1 + wf) / (math.sqrt(3.0) * xi) - 1.0)
    return IsraelStewartAlphas(float(w), eps, xi, delta, alpha1, alpha2, alpha3)


def is_equation(alphas: IsraelStewartAlphas) -> MixedLienardEquation:
    return MixedLienardEquation(
        alphas.alpha1,
        PowerLawExpr.monomial(alphas.alpha2, 1),
        PowerLawExpr.monomial(alphas.alpha3, 3),
    )


def is_split(alphas: IsraelStewartAlphas) -> Split:
    """``P = (1+alpha1) alpha3 H``, ``Q = H``, so ``phi1 = a1 (1+alpha1) alpha3 H``."""
    H = PowerLawExpr.x()
    return Split(H.scale(float(1 + alphas.alpha1) * alphas.alpha3), H, "leading")


def is_pairs(alphas: IsraelStewartAlphas) -> list[FactorPair]:
    return find_factorization(is_equation(alphas), is_split(alphas))


@dataclass(frozen=True)
class HubbleSolution:
    """``H(t) = A / (t - t_star)`` with ``t_star = t0 - A/H0``."""

    A: float
    t_star: float
    H0: float
    t0: float
    branch: str
    a1: float

    def H(self, t):
        return self.A / (np.asarray(t, dtype=float) - self.t_star)

    def dH(self, t):
        return -self.A / (np.asarray(t, dtype=float) - self.t_star) ** 2

    def d2H(self, t):
        return 2.0 * self.A / (np.asarray(t, dtype=float) - self.t_star) ** 3

    def as_dict(self) -> dict:
        return {"A": self.A, "t_star": self.t_star, "H0": self.H0, "t0": self.t0, "branch": self.branch, "a1": self.a1}


def is_particular(alphas: IsraelStewartAlphas, H0: float, t0: float = 0.0, branch: str = "+") -> HubbleSolution:
    """Particular solution from ``H' = a1 alpha3 H^2`` on the chosen root of ``a1``."""
    if H0 == 0:
        raise ValueError("H0 must be non-zero")
    pairs = is_pairs(alphas)
    if not pairs:
        raise NoFactorizationError("no real factorization: alpha2^2 < 4 alpha3 (2 + alpha1)")
    match = [p for p in pairs if p.branch == branch or p.branch is None]
    if not match:
        raise LookupError(f"no pair on branch {branch!r}")
    a1 = float(match[0].a1)
    A = -1.0 / (a1 * alphas.alpha3)
    return HubbleSolution(A, t0 - A / H0, float(H0), float(t0), branch, a1)


def abel_A(alphas: IsraelStewartAlphas) -> float:
    """``alpha3 (2 + alpha1) / alpha2^2``."""
    return alphas.alpha3 * float(2 + alphas.alpha1) / alphas.alpha2**2


def line_slope(alphas: IsraelStewartAlphas, branch: str) -> float:
    """``w / eta`` along the particular solution of the given branch,
    ``(1 -/+ sqrt(1 - 4A))/2`` for ``alpha2 > 0``."""
    A = abel_A(alphas)
    root = math.sqrt(1.0 - 4.0 * A) * math.copysign(1.0, alphas.alpha2)
    return 0.5 * (1.0 - root) if branch == "+" else 0.5 * (1.0 + root)


def is_dynamic_relation(alphas: IsraelStewartAlphas, solution: HubbleSolution, t=None) -> dict:
    """Compare ``d H^(1+alpha1)/dt`` with the first-order relations it should obey.

    ``first_order``: ``-(1+alpha1) w(H)``, ``w = -H^(1+alpha1) phi1/(1+alpha1)``.
    ``derived_eta``: ``-(1+alpha1) s eta`` with the line slope ``s``.
    ``printed_same``/``printed_other``: ``-(1+alpha1)(1 +/- sqrt(1-4A)) eta``
    with the sign paired with the solution's branch or the opposite one.
    Each entry holds the largest relative mismatch; ``printed_ratio`` is the
    (constant) ratio of the printed right side to the left side.
    """
    if t is None:
        t = solution.t_star + np.geomspace(0.1, 10.0, 200) * math.copysign(1.0, solution.A)
        t = np.sort(t)
    t = np.asarray(t, dtype=float)
    H, dH = solution.H(t), solution.dH(t)
    a1p = float(1 + alphas.alpha1)
    lhs = a1p * H ** float(alphas.alpha1) * dH
    phi1 = solution.a1 * a1p * alphas.alpha3 * H
    w = -(H**a1p) * phi1 / a1p
    eta = alphas.alpha2 / float(2 + alphas.alpha1) * H ** float(2 + alphas.alpha1)
    A = abel_A(alphas)
    root = math.sqrt(1.0 - 4.0 * A)
    sgn = 1.0 if solution.branch == "+" else -1.0
    rhs = {
        "first_order": -a1p * w,
        "derived_eta": -a1p * line_slope(alphas, solution.branch) * eta,
        "printed_same": -a1p * (1.0 + sgn * root) * eta,
        "printed_other": -a1p * (1.0 - sgn * root) * eta,
    }
    scale = np.maximum(np.abs(lhs), 1e-300)
    report = {name: float(np.max(np.abs(lhs - r) / scale)) for name, r in rhs.items()}
    report["printed_ratio_same"] = float(np.median(rhs["printed_same"] / lhs))
    report["printed_ratio_other"] = float(np.median(rhs["printed_other"] / lhs))
    report["slope"] = line_slope(alphas, solution.branch)
    report["A"] = A
    report["agrees"] = {name: report[name] < 1e-9 for name in rhs}
    return report
