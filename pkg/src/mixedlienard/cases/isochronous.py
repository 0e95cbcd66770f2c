"""Isochronous oscillators ``q'' + (2m+3) q^(2m+1) q' + q + q^(4m+3) = 0``
rewritten in ``x = q^(2m+1)``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..factorizer import FactorPair, MixedLienardEquation
from ..powerexpr import PowerLawExpr


class PoleError(ArithmeticError):
    """The closed-form denominator vanishes on the evaluation window."""


def isochronous_A(m: int) -> list[Fraction]:
    """Exact ``A_mr = 2^(2(m-r)) (m!)^2 (2r)! / ((2m)! (r!)^2)`` for ``r = 0..m``."""
    if m < 0 or int(m) != m:
        raise ValueError("m must be a non-negative integer")
    m = int(m)
    fm, f2m = math.factorial(m), math.factorial(2 * m)
    return [
        Fraction(4 ** (m - r) * fm * fm * math.factorial(2 * r), f2m * math.factorial(r) ** 2) for r in range(m + 1)
    ]


@dataclass(frozen=True)
class IsochronousCase:
    m: int
    C: float
    t0: float = 0.0

    def __post_init__(self):
        if self.m < 0 or int(self.m) != self.m:
            raise ValueError("m must be a non-negative integer")

    @property
    def coefficients(self) -> list[Fraction]:
        return isochronous_A(self.m)

    @property
    def periodic(self) -> bool:
        return abs(self.C) > self.coefficients[0]

    @property
    def mu(self) -> Fraction:
        return Fraction(-2 * self.m, 2 * self.m + 1)


def isochronous_equation(m: int) -> MixedLienardEquation:
    """``x'' - (2m/(2m+1)) x'^2/x + (2m+3) x x' + (2m+1)(x + x^3) = 0``."""
    n = 2 * m + 1
    F = PowerLawExpr.monomial(float(2 * m + 3), 1)
    G = PowerLawExpr([(float(n), 1), (float(n), 3)])
    return MixedLienardEquation(Fraction(-2 * m, n), F, G)


def isochronous_pair(m: int) -> FactorPair:
    """``(D + x + i)(D + x - i) x^(1/(2m+1)) = 0``."""
    phi1 = PowerLawExpr([(-1.0, 1), (1j, 0)])
    phi2 = PowerLawExpr([(-1.0, 1), (-1j, 0)])
    return FactorPair(Fraction(-2 * m, 2 * m + 1), phi1, phi2)


def _parts(case: IsochronousCase, t):
    s = np.asarray(t, dtype=float) - case.t0
    sn, cs = np.sin(s), np.cos(s)
    A = [float(a) for a in case.coefficients]
    S = sum(a * sn ** (2 * r) for r, a in enumerate(A))
    dS = sum(a * 2 * r * sn ** (2 * r - 1) * cs for r, a in enumerate(A) if r > 0)
    D = case.C - cs * S
    if np.any(D == 0) or (np.ndim(D) and np.any(np.sign(D) != np.sign(D.flat[0]))):
        raise PoleError(f"denominator C - cos(s) sum A_mr sin^2r(s) vanishes (C={case.C}, m={case.m})")
    return s, sn, cs, S, dS, D


def isochronous_x(case: IsochronousCase, t):
    """``x = sin^(2m+1)(s) / (C - cos(s) sum_r A_mr sin^(2r)(s))``, ``s = t - t0``."""
    _, sn, _, _, _, D = _parts(case, t)
    out = sn ** (2 * case.m + 1) / D
    return out.item() if np.ndim(out) == 0 else out


def isochronous_q(case: IsochronousCase, t):
    """Solution of the original oscillator, ``q = x^(1/(2m+1))`` (real root)."""
    x = np.asarray(isochronous_x(case, t), dtype=float)
    out = np.sign(x) * np.abs(x) ** (1.0 / (2 * case.m + 1))
    return out.item() if out.ndim == 0 else out


def isochronous_derivatives(case: IsochronousCase, t):
    """``(x, x', x'')`` of the closed form, differentiated analytically.

    Uses ``dD/ds = (2m+1) sin^(2m+1)(s)``.
    """
    _, sn, cs, _, _, D = _parts(case, t)
    n = 2 * case.m + 1
    N = sn**n
    dN = n * sn ** (n - 1) * cs
    d2N = n * ((n - 1) * sn ** (n - 2) * cs * cs - sn**n) if n > 1 else -sn
    dD = n * sn**n
    d2D = n * n * sn ** (n - 1) * cs
    x = N / D
    num = dN * D - N * dD
    v = num / D**2
    a = (d2N * D - N * d2D) / D**2 - 2.0 * dD * num / D**3
    return x, v, a
