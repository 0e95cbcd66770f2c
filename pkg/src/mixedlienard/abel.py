"""Abel equations of the second kind behind the first-order factor.

With ``w(u) = -u^(mu+1) phi1(u)/(mu+1)`` the sum and product conditions
combine into

    w w' = F(u) u^mu w - G(u) u^(2 mu).

Along a particular solution ``w = -u^mu u'``, which gives an independent
way to sample ``w`` from a trajectory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .factorizer import FactorPair, MixedLienardEquation
from .powerexpr import PowerLawExpr
from .quadrature import SolutionCurve, write_csv
from .specialfn import FisherParametricState, fisher_E, fisher_R
from .verify import ResidualReport, _report, fd_derivatives


class PoleCrossingError(ValueError):
    """A parameter grid touches or crosses a pole of the parametric integrand."""

    def __init__(self, message: str, poles: tuple[float, ...]):
        super().__init__(message)
        self.poles = poles


@dataclass(frozen=True)
class AbelSystem:
    """``w w' = f(u) w + g(u)`` with ``f = F u^mu`` and ``g = -G u^(2 mu)``."""

    mu: float
    F: PowerLawExpr
    G: PowerLawExpr
    f: PowerLawExpr
    g: PowerLawExpr

    def rhs(self, u, w):
        """``w w'``."""
        return self.f(u) * w + self.g(u)

    def w_prime(self, u, w):
        w = np.asarray(w, dtype=float)
        if np.any(w == 0):
            raise ZeroDivisionError("w' is undefined where w = 0")
        out = self.rhs(u, w) / w
        return out.item() if np.ndim(out) == 0 else out


def reduce_to_abel(eq: MixedLienardEquation) -> AbelSystem:
    if eq.free_F:
        raise ValueError("equation has unresolved F coefficients")
    mu = eq.mu
    return AbelSystem(float(mu), eq.F, eq.G, eq.F.shift(mu), -eq.G.shift(2 * mu))


def w_expression(pair: FactorPair) -> PowerLawExpr:
    """``-u^(mu+1) phi1 / (mu+1)`` as a power-law expression."""
    w = pair.phi1.shift(pair.mu + 1).scale(-1.0 / pair.mu_plus_one)
    return w.real() if w.is_complex() else w


def w_from_curve(pair: FactorPair, curve: SolutionCurve) -> tuple[np.ndarray, np.ndarray]:
    """``(u, w)`` along a trajectory."""
    return curve.x.copy(), np.asarray(w_expression(pair)(curve.x), dtype=float)


def abel_residual(system: AbelSystem, u, w) -> ResidualReport:
    """``|w dw/du - f w - g|`` with ``dw/du`` from finite differences in ``u``.

    ``u`` must be strictly monotone; descending samples are reversed.
    """
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    if u[0] > u[-1]:
        u, w = u[::-1], w[::-1]
    uu, ww, dw, _ = fd_derivatives(u, w)
    return _report(uu, ww * dw - system.rhs(uu, ww))


def abel_residual_along_curve(system: AbelSystem, pair: FactorPair, curve: SolutionCurve) -> ResidualReport:
    """Abel residual of ``w(u)`` sampled along a solution curve.

    Derivatives are taken in time and combined by the chain rule, so the
    curve's own time grid is used and ``u`` need not be evenly spaced.
    """
    u, w = w_from_curve(pair, curve)
    t, uu, du, _ = fd_derivatives(curve.t, u)
    _, ww, dw, _ = fd_derivatives(curve.t, w)
    return _report(t, ww * dw / du - system.rhs(uu, ww))


@dataclass(frozen=True)
class CanonicalAbel:
    """``w dw/deta = w - A eta`` with ``eta = eta_coeff H^eta_exp``."""

    A: float
    eta_coeff: float
    eta_exp: float

    def eta(self, H):
        return self.eta_coeff * np.asarray(H, dtype=float) ** self.eta_exp

    def poles(self, printed: bool = False) -> tuple[float, ...]:
        c = -self.A if printed else self.A
        disc = 1.0 - 4.0 * c
        if disc < 0:
            return ()
        r = math.sqrt(disc)
        return ((1.0 - r) / 2.0, (1.0 + r) / 2.0) if r > 0 else (0.5,)

    def line_slopes(self) -> tuple[float, float]:
        """Slopes ``w/eta`` of the straight-line solutions, ``(1 -/+ sqrt(1-4A))/2``."""
        if self.A > 0.25:
            raise ValueError("no straight-line solutions for A > 1/4")
        r = math.sqrt(1.0 - 4.0 * self.A)
        return (1.0 - r) / 2.0, (1.0 + r) / 2.0


def is_canonicalize(alphas) -> CanonicalAbel:
    """Canonical form of the Israel-Stewart Abel equation.

    Accepts an object with ``alpha1``, ``alpha2`` and ``alpha3`` attributes.
    """
    a1, a2, a3 = float(alphas.alpha1), float(alphas.alpha2), float(alphas.alpha3)
    if a2 == 0:
        raise ValueError("alpha2 must be non-zero")
    if a1 == -2:
        raise ValueError("alpha1 = -2 makes the eta map constant")
    return CanonicalAbel(a3 * (2.0 + a1) / a2**2, a2 / (2.0 + a1), 2.0 + a1)


def canonical_from_A(A: float) -> CanonicalAbel:
    """Canonical equation with a prescribed ``A`` and unit eta map."""
    return CanonicalAbel(float(A), 1.0, 1.0)


@dataclass
class ParametricCurve:
    """Samples ``(param, first, w)``; ``first`` is ``u`` (Fisher) or ``eta``."""

    param: np.ndarray
    first: np.ndarray
    w: np.ndarray
    kind: str
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        self.param = np.asarray(self.param, dtype=float)
        self.first = np.asarray(self.first, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        d = np.diff(self.param)
        if self.param.size > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("param must be strictly monotone")

    def header(self) -> list[str]:
        return ["param", "u", "w"] if self.kind == "fisher" else ["tau", "eta", "w"]

    def to_csv(self, path) -> Path:
        return write_csv(path, self.header(), [self.param, self.first, self.w])


def _log_integral(tau: np.ndarray, c: float) -> np.ndarray:
    """An antiderivative of ``tau / (tau^2 - tau + c)``."""
    disc = 1.0 - 4.0 * c
    if disc > 0:
        r = math.sqrt(disc)
        rp, rm = (1.0 + r) / 2.0, (1.0 - r) / 2.0
        return (rp * np.log(np.abs(tau - rp)) - rm * np.log(np.abs(tau - rm))) / (rp - rm)
    if disc == 0:
        return np.log(np.abs(tau - 0.5)) - 0.5 / (tau - 0.5)
    s = math.sqrt(-disc)
    return 0.5 * np.log(tau * tau - tau + c) + np.arctan((2.0 * tau - 1.0) / s) / s


def abel_parametric(
    canonical: CanonicalAbel,
    C: float,
    tau_grid,
    tau_ref: Optional[float] = None,
    printed: bool = False,
) -> ParametricCurve:
    """Parametric solution ``eta = C exp(-I(tau))``, ``w = tau eta`` of the
    canonical equation.

    ``I`` is the antiderivative of ``tau/(tau^2 - tau + A)``, anchored so that
    ``eta(tau_ref) = C`` (``tau_ref`` defaults to the first grid point).  The
    poles of this integrand are the straight-line slopes.  ``printed=True``
    uses ``tau^2 - tau - A`` instead, whose curves solve
    ``w dw/deta = w + A eta``.
    """
    tau = np.asarray(tau_grid, dtype=float)
    if tau.size == 0:
        raise ValueError("empty tau grid")
    c = -canonical.A if printed else canonical.A
    poles = canonical.poles(printed)
    lo, hi = float(tau.min()), float(tau.max())
    hit = [p for p in poles if lo <= p <= hi]
    if hit:
        raise PoleCrossingError(
            f"tau grid [{lo}, {hi}] crosses the pole(s) {', '.join(f'{p:.12g}' for p in poles)}", poles
        )
    ref = float(tau[0]) if tau_ref is None else float(tau_ref)
    if any((ref - p) * (lo - p) <= 0 for p in poles):
        raise PoleCrossingError(f"tau_ref = {ref} is not on the grid's side of the poles", poles)
    I = _log_integral(tau, c) - _log_integral(np.array([ref]), c)[0]
    eta = C * np.exp(-I)
    return ParametricCurve(
        tau, eta, tau * eta, "canonical", {"A": canonical.A, "C": C, "tau_ref": ref, "printed": printed, "poles": poles}
    )


def canonical_residual(curve: ParametricCurve, A: float) -> ResidualReport:
    """``|w dw/deta - (w - A eta)|`` with ``dw/deta = (dw/dtau)/(deta/dtau)``."""
    tau, w = curve.param, curve.w
    eta = curve.first
    if tau[0] > tau[-1]:
        tau, w, eta = tau[::-1], w[::-1], eta[::-1]
    t, ww, dw, _ = fd_derivatives(tau, w)
    _, ee, de, _ = fd_derivatives(tau, eta)
    return _report(t, ww * dw / de - (ww - A * ee))


# Fisher travelling waves, handbook parametric form


def fisher_constants(q: float) -> dict:
    """``a``, ``k`` and ``omega`` for which the handbook parametrization applies."""
    q = float(q)
    a = (4.0 + q) / q * (2.0 / q) ** (2.0 / q)
    k = (4.0 + q) / math.sqrt(2.0 * (2.0 + q))
    omega = (4.0 + q) ** 2 / (4.0 + 2.0 * q)
    return {"a": a, "k": k, "omega": omega, "speed": omega / k}


def fisher_parametric(q: float, sign: str, C: float, xi_grid) -> ParametricCurve:
    """``u = ((q+4)/q) a xi E^(2/q)``, ``w = a E^(2/q) (R E + (2/q) xi)``,
    with ``E = C + int_0^xi (1 +/- s^(2+q))^(-1/2) ds`` and
    ``R = sqrt(1 +/- xi^(2+q))``, evaluated exactly as stated."""
    q = float(q)
    consts = fisher_constants(q)
    a = consts["a"]
    xi = np.asarray(xi_grid, dtype=float)
    u = np.empty_like(xi)
    w = np.empty_like(xi)
    for i, x in enumerate(xi):
        st = FisherParametricState(q, float(x), sign, C)
        E, R = fisher_E(st), fisher_R(st)
        Ep = abs(E) ** (2.0 / q) if E < 0 else E ** (2.0 / q)
        u[i] = (q + 4.0) / q * a * x * Ep
        w[i] = a * Ep * (R * E + 2.0 / q * x)
    return ParametricCurve(xi, u, w, "fisher", {"q": q, "sign": sign, "C": C, **consts})


def fisher_parametric_residual(curve: ParametricCurve, m: float) -> ResidualReport:
    """Residual of ``w w' - (omega/k^2) w + u^(p-m)/k^2 - u^(p-m+q)/k^2`` with
    ``p = 1 - m``, ``w' = dw/du`` by the chain rule in the parameter."""
    q = curve.constants["q"]
    k, omega = curve.constants["k"], curve.constants["omega"]
    p = 1.0 - m
    xi, u, w = curve.param, curve.first, curve.w
    t, uu, du, _ = fd_derivatives(xi, u)
    _, ww, dw, _ = fd_derivatives(xi, w)
    k2 = k * k
    r = ww * dw / du - omega / k2 * ww + uu ** (p - m) / k2 - uu ** (p - m + q) / k2
    return _report(t, r)


def fisher_parametric_verdict(q: float, sign: str = "+", C: float = 1.0, m_values=None, xi_grid=None) -> dict:
    """Smallest handbook residual over candidate ``m`` values, with a pass flag at 1e-6."""
    if xi_grid is None:
        xi_grid = np.linspace(0.05, 0.6, 400)
    if m_values is None:
        m_values = [0.25, 0.5, q / 2.0, -q / 2.0, 1.0]
    curve = fisher_parametric(q, sign, C, xi_grid)
    reports = {float(m): fisher_parametric_residual(curve, float(m)) for m in m_values}
    best = min(reports, key=lambda m: reports[m].max_abs)
    return {
        "q": q,
        "sign": sign,
        "C": C,
        "best_m": best,
        "residuals": {str(m): r.as_dict() for m, r in reports.items()},
        "passed": reports[best].passed(1e-6),
    }
