"""Finite sums of power-law terms ``c * x**e`` with exact rational exponents.

Coefficients are floats (complex is allowed so that factor pairs with
imaginary shifts can be expanded); exponents are :class:`fractions.Fraction`
so that exponent cancellations are exact.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

ZERO_CUTOFF = 1e-14
MATCH_TOL = 1e-10

Scalar = Union[int, float, complex]
ExponentLike = Union[int, Fraction, str, float]


class DomainError(ValueError):
    """Fractional power of a non-positive argument."""


def as_exponent(value: ExponentLike, max_den: int = 10**6) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Floats are snapped to the nearest fraction with denominator at most
    ``max_den``; the snap must be within 1e-12 or a ValueError is raised.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, numbers.Real):
        frac = Fraction(float(value)).limit_denominator(max_den)
        if abs(float(frac) - float(value)) > 1e-12 * max(1.0, abs(float(value))):
            raise ValueError(f"exponent {value!r} is not a recognisable rational")
        return frac
    raise TypeError(f"cannot use {type(value).__name__} as an exponent")


def _format_exp(e: Fraction) -> str:
    return str(e.numerator) if e.denominator == 1 else f"({e})"


@dataclass(frozen=True)
class PowerTerm:
    coeff: Scalar
    exponent: Fraction

    def __post_init__(self):
        if self.coeff == 0:
            raise ValueError("zero terms are not stored")
        object.__setattr__(self, "exponent", as_exponent(self.exponent))


class PowerLawExpr:
    """Immutable sum of :class:`PowerTerm` with strictly increasing exponents."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable = ()):
        buckets: dict[Fraction, list] = {}
        for item in terms:
            if isinstance(item, PowerTerm):
                c, e = item.coeff, item.exponent
            else:
                c, e = item
                e = as_exponent(e)
            buckets.setdefault(e, []).append(c)
        out = []
        for e in sorted(buckets):
            parts = buckets[e]
            c = sum(parts[1:], parts[0])
            if isinstance(c, complex) and c.imag == 0:
                c = c.real
            if c == 0 or (len(parts) > 1 and abs(c) < ZERO_CUTOFF):
                continue
            out.append(PowerTerm(c, e))
        self._terms = tuple(out)

    # construction helpers
    @classmethod
    def monomial(cls, coeff: Scalar, exponent: ExponentLike = 1) -> "PowerLawExpr":
        return cls([(coeff, exponent)]) if coeff != 0 else cls()

    @classmethod
    def constant(cls, value: Scalar) -> "PowerLawExpr":
        return cls.monomial(value, 0)

    @classmethod
    def x(cls) -> "PowerLawExpr":
        return cls.monomial(1.0, 1)

    @classmethod
    def _coerce(cls, other) -> "PowerLawExpr":
        if isinstance(other, PowerLawExpr):
            return other
        if isinstance(other, numbers.Number):
            return cls.constant(other)
        return NotImplemented

    # accessors
    @property
    def terms(self) -> tuple[PowerTerm, ...]:
        return self._terms

    @property
    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(t.exponent for t in self._terms)

    def coeff(self, exponent: ExponentLike) -> Scalar:
        e = as_exponent(exponent)
        for t in self._terms:
            if t.exponent == e:
                return t.coeff
        return 0.0

    def as_dict(self) -> dict[Fraction, Scalar]:
        return {t.exponent: t.coeff for t in self._terms}

    def is_zero(self) -> bool:
        return not self._terms

    def is_complex(self) -> bool:
        return any(isinstance(t.coeff, complex) for t in self._terms)

    def max_imag(self) -> float:
        return max((abs(complex(t.coeff).imag) for t in self._terms), default=0.0)

    def real(self, tol: float = 1e-12) -> "PowerLawExpr":
        """Drop imaginary parts, which must all be below ``tol``."""
        if self.max_imag() >= tol:
            raise ValueError(f"expression has imaginary parts up to {self.max_imag():.3g}: {self}")
        return PowerLawExpr((complex(t.coeff).real, t.exponent) for t in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    # algebra
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PowerLawExpr(self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self):
        return PowerLawExpr((-t.coeff, t.exponent) for t in self._terms)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return self.scale(other)
        if not isinstance(other, PowerLawExpr):
            return NotImplemented
        return PowerLawExpr(
            (a.coeff * b.coeff, a.exponent + b.exponent) for a in self._terms for b in other._terms
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return self.scale(1.0 / other)
        return NotImplemented

    def scale(self, factor: Scalar) -> "PowerLawExpr":
        if factor == 0:
            return PowerLawExpr()
        return PowerLawExpr((t.coeff * factor, t.exponent) for t in self._terms)

    def shift(self, exponent: ExponentLike) -> "PowerLawExpr":
        """Multiply by ``x**exponent``."""
        e = as_exponent(exponent)
        return PowerLawExpr((t.coeff, t.exponent + e) for t in self._terms)

    def derivative(self) -> "PowerLawExpr":
        return PowerLawExpr(
            (t.coeff * t.exponent.numerator / t.exponent.denominator, t.exponent - 1)
            for t in self._terms
            if t.exponent != 0
        )

    # numerics
    def has_fractional_exponent(self) -> bool:
        return any(t.exponent.denominator != 1 for t in self._terms)

    def __call__(self, x):
        return evaluate(self, x)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Float coefficient and exponent arrays for the compiled kernels."""
        if self.is_complex():
            raise TypeError("kernels take real coefficients only")
        coeffs = np.array([float(t.coeff) for t in self._terms], dtype=float)
        exps = np.array([float(t.exponent) for t in self._terms], dtype=float)
        return coeffs, exps

    # comparison
    def __eq__(self, other):
        if not isinstance(other, PowerLawExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def approx_equal(self, other: "PowerLawExpr", tol: float = MATCH_TOL) -> bool:
        return max_abs_coeff(self - other) < tol

    def __repr__(self):
        return f"PowerLawExpr({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for t in self._terms:
            c = t.coeff
            if t.exponent == 0:
                parts.append(f"{c:g}" if not isinstance(c, complex) else f"({c:g})")
                continue
            mono = "x" if t.exponent == 1 else f"x^{_format_exp(t.exponent)}"
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            elif isinstance(c, complex):
                parts.append(f"({c:g})*{mono}")
            else:
                parts.append(f"{c:g}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # serialisation
    def to_json(self) -> list:
        """List of ``[coeff, exp_numerator, exp_denominator]`` triples."""
        if self.is_complex():
            raise TypeError("only real expressions are serialisable")
        return [[float(t.coeff), t.exponent.numerator, t.exponent.denominator] for t in self._terms]

    @classmethod
    def from_json(cls, triples: Sequence[Sequence]) -> "PowerLawExpr":
        terms = []
        for item in triples:
            if len(item) != 3:
                raise ValueError(f"expected [coeff, num, den], got {item!r}")
            c, num, den = item
            if int(den) <= 0:
                raise ValueError(f"exponent denominator must be positive in {item!r}")
            terms.append((float(c), Fraction(int(num), int(den))))
        return cls(terms)


def evaluate(expr: PowerLawExpr, x):
    """Value of ``expr`` at ``x`` (scalar or array).

    Raises :class:`DomainError` if any ``x <= 0`` meets a fractional exponent.
    """
    xs = np.asarray(x, dtype=float)
    if expr.has_fractional_exponent() and np.any(xs <= 0):
        raise DomainError("fractional exponents need x > 0")
    dtype = complex if expr.is_complex() else float
    out = np.zeros(xs.shape, dtype=dtype)
    with np.errstate(divide="ignore"):
        for t in expr.terms:
            if t.exponent.denominator == 1:
                out = out + t.coeff * xs ** int(t.exponent.numerator)
            else:
                out = out + t.coeff * xs ** float(t.exponent)
    if out.ndim == 0:
        return out.item()
    return out


def derivative(expr: PowerLawExpr) -> PowerLawExpr:
    return expr.derivative()


def add(a: PowerLawExpr, b) -> PowerLawExpr:
    return a + b


def mul(a: PowerLawExpr, b) -> PowerLawExpr:
    return a * b


def scale(a: PowerLawExpr, factor: Scalar) -> PowerLawExpr:
    return a.scale(factor)


def max_abs_coeff(expr: PowerLawExpr) -> float:
    return max((abs(t.coeff) for t in expr.terms), default=0.0)


def match_coefficients(lhs: PowerLawExpr, rhs: PowerLawExpr) -> dict[Fraction, tuple[Scalar, Scalar]]:
    """Align two expressions exponent by exponent; absent coefficients are 0."""
    left, right = lhs.as_dict(), rhs.as_dict()
    return {e: (left.get(e, 0.0), right.get(e, 0.0)) for e in sorted(set(left) | set(right))}


def from_mapping(coeffs: Mapping[ExponentLike, Scalar]) -> PowerLawExpr:
    return PowerLawExpr((c, e) for e, c in coeffs.items())


X = PowerLawExpr.x()
