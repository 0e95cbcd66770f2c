"""Gauss hypergeometric function on ``0 <= z < 1`` and the Fisher parametric
integrals ``E`` and ``R``."""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate, special

from .kernels import hyp2f1_direct, hyp2f1_log_sum

MAX_TERMS = 1_000_000


class ConvergenceError(ArithmeticError):
    pass


def _is_nonpositive_int(v: float) -> bool:
    return v <= 0 and v == math.floor(v)


def _checked(result, what):
    value, ok = result
    if not ok:
        raise ConvergenceError(f"{what} did not converge in {MAX_TERMS} terms")
    return value


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """``2F1(a, b; c; z)`` for real arguments and ``0 <= z < 1``.

    The power series is summed directly for ``z <= 1/2``.  Above that the
    ``z -> 1 - z`` connection formula is used, including its logarithmic form
    when ``c - a - b`` is an integer.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    if not 0.0 <= z < 1.0:
        raise ValueError(f"hyp2f1 needs 0 <= z < 1, got z={z}")
    if _is_nonpositive_int(c):
        raise ValueError(f"c = {c} is a non-positive integer")
    if z == 0.0:
        return 1.0
    if z <= 0.5 or _is_nonpositive_int(a) or _is_nonpositive_int(b):
        return _checked(hyp2f1_direct(a, b, c, z, MAX_TERMS), "2F1 series")

    w = 1.0 - z
    s = c - a - b
    m = round(s)
    if s == m:
        return _hyp2f1_integer_gap(a, b, c, z, int(m))
    if abs(s - m) < 1e-6:
        # the connection coefficients cancel catastrophically here
        return _checked(hyp2f1_direct(a, b, c, z, MAX_TERMS), "2F1 series")
    t1 = _checked(hyp2f1_direct(a, b, a + b - c + 1.0, w, MAX_TERMS), "2F1 series")
    t2 = _checked(hyp2f1_direct(c - a, c - b, s + 1.0, w, MAX_TERMS), "2F1 series")
    g = special.gamma
    rg = special.rgamma
    return g(c) * g(s) * rg(c - a) * rg(c - b) * t1 + w**s * g(c) * g(-s) * rg(a) * rg(b) * t2


def _hyp2f1_integer_gap(a: float, b: float, c: float, z: float, m: int) -> float:
    w = 1.0 - z
    psi = special.psi
    rg = special.rgamma
    if m >= 0:
        # c = a + b + m
        head = 0.0
        if m > 0:
            term = 1.0
            for k in range(m):
                head += term * math.factorial(m - k - 1) * (z - 1.0) ** k
                term *= (a + k) * (b + k) / (k + 1.0)
            head *= rg(a + m) * rg(b + m)
        tail = 0.0
        if rg(a) != 0.0 and rg(b) != 0.0:
            tail = _checked(
                hyp2f1_log_sum(a + m, b + m, float(m), w, psi(1.0), psi(m + 1.0), psi(a + m), psi(b + m), MAX_TERMS),
                "2F1 logarithmic series",
            )
            tail *= (z - 1.0) ** m * rg(a) * rg(b)
        return special.gamma(c) * (head - tail)
    n = -m
    # c = a + b - n
    head = 0.0
    term = 1.0
    for k in range(n):
        head += term * math.factorial(n - k - 1) * (z - 1.0) ** k
        term *= (a - n + k) * (b - n + k) / (k + 1.0)
    head *= w ** (-n) * rg(a) * rg(b)
    tail = 0.0
    if rg(a - n) != 0.0 and rg(b - n) != 0.0:
        tail = _checked(
            hyp2f1_log_sum(a, b, float(n), w, psi(1.0), psi(n + 1.0), psi(a), psi(b), MAX_TERMS),
            "2F1 logarithmic series",
        )
        tail *= (-1.0) ** n * rg(a - n) * rg(b - n)
    return special.gamma(c) * (head - tail)


@dataclass(frozen=True)
class FisherParametricState:
    """Point of the Fisher Abel parametrization.

    ``sign`` is the sign inside ``sqrt(1 +/- xi**(2+q))`` and ``C`` the
    additive constant of ``E``, whose integral runs from 0.
    """

    q: float
    xi: float
    sign: str = "+"
    C: float = 0.0

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError("q must be positive")
        if self.xi < 0:
            raise ValueError("xi must be non-negative")
        if self.sign not in ("+", "-"):
            raise ValueError(f"sign must be '+' or '-', got {self.sign!r}")
        if self.sign == "-" and self.xi ** (2.0 + self.q) >= 1.0:
            raise ValueError(f"1 - xi^(2+q) must be positive (xi={self.xi}, q={self.q})")

    @property
    def s(self) -> float:
        return 1.0 if self.sign == "+" else -1.0


def fisher_R(state: FisherParametricState) -> float:
    return math.sqrt(1.0 + state.s * state.xi ** (2.0 + state.q))


def fisher_E(state: FisherParametricState) -> float:
    if state.xi == 0.0:
        return state.C
    s, p = state.s, 2.0 + state.q
    val, _ = integrate.quad(lambda u: (1.0 + s * u**p) ** -0.5, 0.0, state.xi, epsabs=0.0, epsrel=1e-12, limit=200)
    return state.C + val
