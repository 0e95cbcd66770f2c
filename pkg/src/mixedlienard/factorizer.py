"""Mixed Lienard equations and their parametric factorizations.

A mixed Lienard equation ``x'' + mu x'^2/x + F(x) x' + G(x) = 0`` is
factorized as ``(D - phi2)(D - phi1) x**(mu+1) = 0``.  Expanding the product
gives the two conditions

    phi1 + phi2 + x phi1' / (mu+1) = -F
    phi1 * phi2                    = (mu+1) G / x

which this module expands, checks and solves for the split constant ``a1``
of the ansatz ``phi1 = a1 P``, ``phi2 = Q / a1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .powerexpr import (
    MATCH_TOL,
    PowerLawExpr,
    as_exponent,
    match_coefficients,
    max_abs_coeff,
)

X = PowerLawExpr.x()


class NoFactorizationError(ValueError):
    """The requested split admits no real split constant.

    ``violated`` lists the exponent classes whose coefficient equations
    could not be satisfied.
    """

    def __init__(self, message: str, violated: Iterable[Fraction] = ()):
        super().__init__(message)
        self.violated = tuple(violated)


def _as_mu(mu) -> Fraction:
    mu = as_exponent(mu)
    if mu == -1:
        raise ValueError("mu = -1 is excluded: the factorization acts on x**(mu+1)")
    return mu


@dataclass(frozen=True)
class MixedLienardEquation:
    """``x'' + mu x'^2/x + F(x) x' + G(x) = 0``.

    ``free_F`` holds exponents whose F coefficient is an unknown (for example
    the wave speed term of a travelling-wave reduction); they are solved for
    by :func:`find_factorization` and reported as constraints.
    """

    mu: Fraction
    F: PowerLawExpr
    G: PowerLawExpr
    free_F: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "mu", _as_mu(self.mu))
        free = tuple(sorted({as_exponent(e) for e in self.free_F}))
        clash = [e for e in free if self.F.coeff(e) != 0]
        if clash:
            raise ValueError(f"F already has a coefficient at free exponents {clash}")
        object.__setattr__(self, "free_F", free)

    def with_F_coefficients(self, values: dict) -> "MixedLienardEquation":
        """Fill free F coefficients, keyed by exponent."""
        extra = PowerLawExpr((c, e) for e, c in values.items())
        remaining = tuple(e for e in self.free_F if e not in {as_exponent(k) for k in values})
        return MixedLienardEquation(self.mu, self.F + extra, self.G, remaining)

    def acceleration(self, x, v):
        """``x''`` solved from the equation (numpy-vectorized)."""
        return -float(self.mu) * v * v / x - self.F(x) * v - self.G(x)

    def residual(self, x, v, a):
        return a + float(self.mu) * v * v / x + self.F(x) * v + self.G(x)

    def to_json(self) -> dict:
        F = self.F.to_json() + [[None, e.numerator, e.denominator] for e in self.free_F]
        return {"mu": float(self.mu), "mu_exact": str(self.mu), "F": F, "G": self.G.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "MixedLienardEquation":
        try:
            mu_raw = data.get("mu_exact", data["mu"])
            F_items = data.get("F", [])
            G_items = data.get("G", [])
        except (AttributeError, KeyError) as exc:
            raise ValueError(f"equation JSON needs 'mu', 'F', 'G': {exc}") from None
        free = [Fraction(int(n), int(d)) for c, n, d in F_items if c is None]
        F = PowerLawExpr.from_json([t for t in F_items if t[0] is not None])
        G = PowerLawExpr.from_json(G_items)
        return cls(as_exponent(mu_raw), F, G, tuple(free))

    def __str__(self):
        free = "".join(f" + ?*x^({e})" for e in self.free_F)
        return f"x'' + ({self.mu}) x'^2/x + [{self.F}{free}] x' + [{self.G}] = 0"


@dataclass(frozen=True)
class FactorPair:
    """``(D - phi2)(D - phi1) x**(mu+1) = 0``.

    Coefficients of ``phi1``/``phi2`` may be complex (the isochronous pair);
    such pairs are only built by hand and must expand to a real equation.
    """

    mu: Fraction
    phi1: PowerLawExpr
    phi2: PowerLawExpr
    a1: Optional[float] = None
    branch: Optional[str] = None
    constraints: dict = field(default_factory=dict)
    split: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "mu", _as_mu(self.mu))
        if self.phi1.is_zero() or self.phi2.is_zero():
            raise ValueError("phi1 and phi2 must be non-zero")
        if self.branch not in (None, "+", "-"):
            raise ValueError(f"branch must be '+' or '-', got {self.branch!r}")

    @property
    def is_complex(self) -> bool:
        return self.phi1.is_complex() or self.phi2.is_complex()

    @property
    def mu_plus_one(self) -> float:
        return float(self.mu + 1)

    def describe(self) -> dict:
        return {
            "mu": str(self.mu),
            "a1": self.a1,
            "branch": self.branch,
            "split": self.split,
            "phi1": str(self.phi1),
            "phi2": str(self.phi2),
            "constraints": {k: v for k, v in self.constraints.items()},
        }


@dataclass(frozen=True)
class ConditionReport:
    residual_sum: PowerLawExpr  # phi1 + phi2 + x phi1'/(mu+1) + F
    residual_product: PowerLawExpr  # phi1 phi2 - (mu+1) G/x
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol

    def as_dict(self) -> dict:
        return {
            "residual_sum": str(self.residual_sum),
            "residual_product": str(self.residual_product),
            "max_residual": self.max_residual,
            "tol": self.tol,
            "passed": self.passed,
        }


def _sum_operator(phi1: PowerLawExpr, mu: Fraction) -> PowerLawExpr:
    """``phi1 + x phi1' / (mu+1)``."""
    return phi1 + (X * phi1.derivative()).scale(1.0 / float(mu + 1))


def expand_factorization(pair: FactorPair, imag_tol: float = 1e-12) -> MixedLienardEquation:
    """Expand ``(D - phi2)(D - phi1) x**(mu+1)`` into ``(mu, F, G)``."""
    F = -(_sum_operator(pair.phi1, pair.mu) + pair.phi2)
    G = (X * pair.phi1 * pair.phi2).scale(1.0 / float(pair.mu + 1))
    if F.is_complex() or G.is_complex():
        F, G = F.real(imag_tol), G.real(imag_tol)
    return MixedLienardEquation(pair.mu, F, G)


def check_conditions(pair: FactorPair, eq: MixedLienardEquation, tol: float = MATCH_TOL) -> ConditionReport:
    if pair.mu != eq.mu:
        raise ValueError(f"pair has mu={pair.mu} but equation has mu={eq.mu}")
    if eq.free_F:
        eq = resolved_equation(eq, pair)
    r1 = _sum_operator(pair.phi1, pair.mu) + pair.phi2 + eq.F
    r2 = pair.phi1 * pair.phi2 - eq.G.shift(-1).scale(float(eq.mu + 1))
    worst = max(max_abs_coeff(r1), max_abs_coeff(r2))
    return ConditionReport(r1, r2, worst, tol)


def standard_conditions(phi1: PowerLawExpr, phi2: PowerLawExpr, f: PowerLawExpr, g: PowerLawExpr):
    """Residuals of the unparametrized conditions ``phi1 + phi2 + q phi1' = -f``,
    ``phi1 phi2 = g/q`` for ``(D - phi2)(D - phi1) q = 0``."""
    r1 = phi1 + phi2 + X * phi1.derivative() + f
    r2 = phi1 * phi2 - g.shift(-1)
    return r1, r2


def reduce_to_standard(pair: FactorPair, eq: Optional[MixedLienardEquation] = None, tol: float = MATCH_TOL):
    """Check a ``mu = 0`` pair against the standard (non-parametric) conditions."""
    if pair.mu != 0:
        raise ValueError(f"reduce_to_standard needs mu = 0, got mu = {pair.mu}")
    if eq is None:
        eq = expand_factorization(pair)
    r1, r2 = standard_conditions(pair.phi1, pair.phi2, eq.F, eq.G)
    return ConditionReport(r1, r2, max(max_abs_coeff(r1), max_abs_coeff(r2)), tol)


# ---------------------------------------------------------------------------
# Split search


@dataclass(frozen=True)
class Split:
    """Two factors with ``P * Q == (mu+1) G / x``; the ansatz is ``phi1 = a1 P``,
    ``phi2 = Q / a1``."""

    P: PowerLawExpr
    Q: PowerLawExpr
    name: str = "custom"


def product_target(eq: MixedLienardEquation) -> PowerLawExpr:
    """``(mu+1) G / x``."""
    return eq.G.shift(-1).scale(float(eq.mu + 1))


def canonical_splits(eq: MixedLienardEquation) -> list[Split]:
    """Splits of ``(mu+1) G / x`` for one- and two-term G.

    One term ``c x^e``: ``leading`` (P = c x^(e/2), Q = x^(e/2)) and
    ``symmetric`` (the magnitude shared evenly, sign carried by P).
    Two terms ``c1 x^e1 + c2 x^e2`` with ``c2/c1 < 0``: the difference-of-
    squares ``binomial`` split and its ``binomial-swapped`` mirror.
    """
    target = product_target(eq)
    terms = target.terms
    if not terms:
        return []
    if any(isinstance(t.coeff, complex) for t in terms):
        return []
    if len(terms) == 1:
        c, e = float(terms[0].coeff), terms[0].exponent
        half = PowerLawExpr.monomial(1.0, e / 2)
        root = math.sqrt(abs(c))
        return [
            Split(half.scale(c), half, "leading"),
            Split(half.scale(math.copysign(root, c)), half.scale(root), "symmetric"),
        ]
    if len(terms) == 2:
        (c1, e1), (c2, e2) = (float(terms[0].coeff), terms[0].exponent), (float(terms[1].coeff), terms[1].exponent)
        ratio = -c2 / c1
        if ratio <= 0:
            return []
        r = math.sqrt(ratio)
        root = math.sqrt(abs(c1))
        base = PowerLawExpr.monomial(1.0, e1 / 2)
        minus = base * PowerLawExpr([(1.0, 0), (-r, (e2 - e1) / 2)])
        plus = base * PowerLawExpr([(1.0, 0), (r, (e2 - e1) / 2)])
        sgn = math.copysign(root, c1)
        return [
            Split(minus.scale(sgn), plus.scale(root), "binomial"),
            Split(plus.scale(sgn), minus.scale(root), "binomial-swapped"),
        ]
    return []


def _roots(alpha: float, f: float, beta: float, tol: float):
    """Real nonzero roots of ``alpha a^2 + f a + beta = 0`` with branch tags.

    Tags follow the quadratic formula (``+`` for ``+sqrt(disc)``) except for
    the pure ``a^2 = const`` case where ``+`` is the positive root.
    Returns ``None`` for a contradictory constant equation.
    """
    scale = max(abs(alpha), abs(f), abs(beta), 1.0)
    if abs(alpha) > tol:
        disc = f * f - 4.0 * alpha * beta
        if disc < -tol * scale * scale:
            return []
        disc = max(disc, 0.0)
        sq = math.sqrt(disc)
        if abs(f) <= tol:
            r = sq / (2.0 * abs(alpha))
            out = [(r, "+"), (-r, "-")]
        else:
            out = [((-f + sq) / (2.0 * alpha), "+"), ((-f - sq) / (2.0 * alpha), "-")]
        if sq == 0.0:
            out = [(out[0][0], None)]
        return [(a, b) for a, b in out if a != 0.0]
    if abs(f) > tol:
        a = -beta / f
        return [(a, None)] if a != 0.0 else []
    if abs(beta) > tol:
        return None
    return []


def find_factorization(eq: MixedLienardEquation, split: Split, tol: float = MATCH_TOL) -> list[FactorPair]:
    """Solve the sum condition for ``a1`` under the ansatz given by ``split``.

    Each exponent class ``e`` contributes ``alpha_e a1^2 + f_e a1 + beta_e = 0``
    where ``alpha`` comes from ``P + x P'/(mu+1)``, ``beta`` from ``Q`` and
    ``f`` from ``F``.  Classes at free F exponents instead fix that
    coefficient, which is recorded in ``FactorPair.constraints``.

    Returns all real roots (possibly none).  Raises
    :class:`NoFactorizationError` for degenerate input or when the classes
    contradict each other.
    """
    target = product_target(eq)
    if target.is_zero():
        raise NoFactorizationError("no factorization under this split: G = 0 leaves the split undefined")
    if not (split.P * split.Q).approx_equal(target, tol):
        raise NoFactorizationError(
            f"no factorization under this split: P*Q = {split.P * split.Q} differs from (mu+1)G/x = {target}"
        )
    A = _sum_operator(split.P, eq.mu)
    table = match_coefficients(A, split.Q)
    for e, c in eq.F.as_dict().items():
        table.setdefault(e, (0.0, 0.0))
    for e in eq.free_F:
        table.setdefault(e, (0.0, 0.0))
    equations = []
    for e, (alpha, beta) in sorted(table.items()):
        if e in eq.free_F:
            continue
        f = float(eq.F.coeff(e))
        alpha, beta = float(alpha), float(beta)
        if max(abs(alpha), abs(f), abs(beta)) <= tol:
            continue
        equations.append((e, alpha, f, beta))
    if not equations:
        raise NoFactorizationError("no factorization under this split: the sum condition carries no information")

    # solve the highest-degree class, then verify the rest
    pivot = max(equations, key=lambda q: (abs(q[1]) > tol, abs(q[2]) > tol))
    roots = _roots(pivot[1], pivot[2], pivot[3], tol)
    if roots is None:
        raise NoFactorizationError("no factorization under this split", [pivot[0]])
    if not roots:
        return []

    pairs = []
    violated: set[Fraction] = set()
    for a1, tag in roots:
        bad = []
        for e, alpha, f, beta in equations:
            value = alpha * a1 + f + beta / a1
            scale = max(abs(alpha * a1), abs(f), abs(beta / a1), 1.0)
            if abs(value) > tol * scale:
                bad.append(e)
        if bad:
            violated.update(bad)
            continue
        constraints = {}
        for e in eq.free_F:
            alpha, beta = table[e]
            constraints[f"F[{e}]"] = -(float(alpha) * a1 + float(beta) / a1)
        pairs.append(
            FactorPair(
                eq.mu,
                split.P.scale(a1),
                split.Q.scale(1.0 / a1),
                a1=a1,
                branch=tag,
                constraints=constraints,
                split=split.name,
            )
        )
    if not pairs and violated:
        raise NoFactorizationError("no factorization under this split", sorted(violated))
    return pairs


def free_F_values(pair: FactorPair) -> dict[Fraction, float]:
    """Free F coefficients fixed by ``pair``, keyed by exponent."""
    out = {}
    for key, value in pair.constraints.items():
        if key.startswith("F[") and key.endswith("]"):
            out[Fraction(key[2:-1])] = value
    return out


def resolved_equation(eq: MixedLienardEquation, pair: FactorPair) -> MixedLienardEquation:
    """``eq`` with its free F coefficients filled from the pair's constraints."""
    if not eq.free_F:
        return eq
    values = free_F_values(pair)
    missing = [e for e in eq.free_F if e not in values]
    if missing:
        raise ValueError(f"pair does not fix F coefficients at {missing}")
    return eq.with_F_coefficients(values)


def factorize(eq: MixedLienardEquation, split: str = "auto", tol: float = MATCH_TOL) -> list[FactorPair]:
    """Run :func:`find_factorization` over canonical splits.

    ``split`` is a canonical split name, ``"auto"`` (the first canonical split
    for the shape of G) or ``"all"`` (every canonical split, duplicates of the
    same ``(phi1, phi2)`` removed).
    """
    candidates = canonical_splits(eq)
    if product_target(eq).is_zero():
        raise NoFactorizationError("no factorization under this split: G = 0 leaves the split undefined")
    if not candidates:
        raise NoFactorizationError("no canonical split applies to this G")
    if split == "auto":
        chosen = candidates[:1]
    elif split == "all":
        chosen = candidates
    else:
        chosen = [s for s in candidates if s.name == split]
        if not chosen:
            names = ", ".join(s.name for s in candidates)
            raise NoFactorizationError(f"split {split!r} does not apply; available: {names}")
    pairs: list[FactorPair] = []
    errors: list[NoFactorizationError] = []
    for s in chosen:
        try:
            found = find_factorization(eq, s, tol)
        except NoFactorizationError as exc:
            errors.append(exc)
            continue
        for p in found:
            if not any(p.phi1.approx_equal(o.phi1, tol) and p.phi2.approx_equal(o.phi2, tol) for o in pairs):
                pairs.append(p)
    if not pairs and errors and len(errors) == len(chosen):
        violated = sorted({e for exc in errors for e in exc.violated})
        raise NoFactorizationError(str(errors[0]), violated)
    return pairs


def with_branch(pairs: list[FactorPair], selector: str) -> FactorPair:
    """Pick a pair by ``"+"``/``"-"`` branch tag or integer index."""
    if selector in ("+", "-", "plus", "minus"):
        tag = {"plus": "+", "minus": "-"}.get(selector, selector)
        for p in pairs:
            if p.branch == tag:
                return p
        raise LookupError(f"no pair on branch {tag!r}")
    idx = int(selector)
    return pairs[idx]


__all__ = [
    "ConditionReport",
    "FactorPair",
    "MixedLienardEquation",
    "NoFactorizationError",
    "Split",
    "canonical_splits",
    "check_conditions",
    "expand_factorization",
    "factorize",
    "find_factorization",
    "free_F_values",
    "product_target",
    "reduce_to_standard",
    "resolved_equation",
    "standard_conditions",
    "with_branch",
]
