"""Independent numerical checks.

Nothing here touches factor pairs: the oracle integrates the full
second-order equation from ``(mu, F, G)`` alone, and residuals are measured
with finite differences on whatever samples a solver produced.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicSpline

from .factorizer import MixedLienardEquation
from .kernels import RK_FLOOR, RK_MAXSTEPS, RK_NONFINITE, RK_OK, RK_UNDERFLOW, dopri_lienard
from .powerexpr import PowerLawExpr
from .quadrature import SolutionCurve

_EVENTS = {
    RK_OK: "ok",
    RK_FLOOR: "floor",
    RK_UNDERFLOW: "step-underflow",
    RK_NONFINITE: "non-finite",
    RK_MAXSTEPS: "max-steps",
}

# 4th-order centred stencils on offsets -2..2 (integer weights, divided by 12 h^k)
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0])
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0])


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    rms: float
    n_points: int
    worst_t: float

    def passed(self, tol: float) -> bool:
        return self.n_points > 0 and self.max_abs < tol

    def as_dict(self) -> dict:
        return asdict(self)


def _report(t: np.ndarray, r: np.ndarray) -> ResidualReport:
    r = np.abs(np.asarray(r, dtype=float))
    if r.size == 0:
        return ResidualReport(math.nan, math.nan, 0, math.nan)
    if not np.all(np.isfinite(r)):
        i = int(np.argmax(~np.isfinite(r)))
        return ResidualReport(math.inf, math.inf, int(r.size), float(t[i]))
    i = int(np.argmax(r))
    return ResidualReport(float(r[i]), float(np.sqrt(np.mean(r**2))), int(r.size), float(t[i]))


def to_power_coordinates(eq: MixedLienardEquation) -> MixedLienardEquation:
    """The same dynamics in ``y = x**(mu+1)``.

    ``y'' = (mu+1) x**mu (x'' + mu x'^2/x)`` removes the quadratic damping
    term, leaving ``y'' + F(x) y' + (mu+1) x**mu G(x) = 0`` with
    ``x = y**(1/(mu+1))``, again a power-law Lienard equation (``mu = 0``).
    """
    p = 1 / (eq.mu + 1)
    F = PowerLawExpr((t.coeff, t.exponent * p) for t in eq.F.terms)
    G = PowerLawExpr((t.coeff * float(eq.mu + 1), (t.exponent + eq.mu) * p) for t in eq.G.terms)
    return MixedLienardEquation(0, F, G)


def rk_integrate(
    eq: MixedLienardEquation,
    x0: float,
    v0: float,
    t_eval,
    rel_tol: float = 1e-10,
    abs_tol: Optional[float] = None,
    x_floor: Optional[float] = 1e-12,
    max_steps: int = 5_000_000,
    coordinates: str = "x",
) -> SolutionCurve:
    """Dormand-Prince 5(4) integration of ``x'' = -mu x'^2/x - F(x) x' - G(x)``.

    ``t_eval`` is monotone and starts at the initial time; it may run
    backwards.  Integration stops at ``x <= x_floor`` (pass ``None`` for
    sign-changing solutions) or on step-size underflow; the returned curve
    then holds the samples reached so far and ``metadata['event']`` says why.

    ``coordinates="power"`` integrates in ``y = x**(mu+1)`` instead (see
    :func:`to_power_coordinates`), which stays regular where ``x`` passes
    through zero; ``1/(mu+1)`` must then be an odd integer for negative
    ``x`` to make sense.
    """
    if coordinates == "power":
        if eq.free_F:
            raise ValueError("equation has unresolved F coefficients")
        p = 1 / (eq.mu + 1)
        odd = p.denominator == 1 and p.numerator % 2 == 1
        if x0 < 0 and not odd:
            raise ValueError("negative x0 needs 1/(mu+1) to be an odd integer")
        yp = float(1 / p)
        y0 = math.copysign(abs(x0) ** yp, x0)
        w0 = yp * abs(x0) ** (yp - 1.0) * v0 if x0 != 0 else 0.0
        floor_y = None if x_floor is None else math.copysign(abs(x_floor) ** yp, x_floor)
        inner = rk_integrate(to_power_coordinates(eq), y0, w0, t_eval, rel_tol, abs_tol, floor_y, max_steps)
        y, w = inner.x, inner.v
        pf = float(p)
        x = np.sign(y) * np.abs(y) ** pf
        with np.errstate(divide="ignore", invalid="ignore"):
            v = pf * np.abs(y) ** (pf - 1.0) * w
        meta = dict(inner.metadata, coordinates="power")
        return SolutionCurve(inner.t, x, "rk-oracle", meta, v)
    if coordinates != "x":
        raise ValueError(f"unknown coordinates {coordinates!r}")
    if eq.free_F:
        raise ValueError("equation has unresolved F coefficients")
    if not 1e-12 <= rel_tol <= 1e-3:
        raise ValueError("rel_tol must lie in [1e-12, 1e-3]")
    if x_floor is not None and x0 <= 0:
        raise ValueError("x0 must be positive while the positivity floor is active")
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval.size > 1:
        d = np.diff(t_eval)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("t_eval must be strictly monotone")
    backward = t_eval.size > 1 and t_eval[1] < t_eval[0]
    fc, fe = eq.F.as_arrays()
    gc, ge = eq.G.as_arrays()
    s = t_eval
    if backward:
        # s = -t flips the sign of every odd derivative
        fc, v0, s = -fc, -v0, -t_eval
    atol = rel_tol * 1e-3 if abs_tol is None else abs_tol
    xs, vs, n_done, status = dopri_lienard(
        float(eq.mu), fc, fe, gc, ge, float(x0), float(v0), s, rel_tol, atol,
        -1.0 if x_floor is None else float(x_floor), max_steps,
    )
    t, x, v = t_eval[:n_done], xs[:n_done], vs[:n_done]
    if backward:
        t, x, v = t[::-1], x[::-1], -v[::-1]
    meta = {"event": _EVENTS[int(status)], "rel_tol": rel_tol, "abs_tol": atol, "x_floor": x_floor}
    return SolutionCurve(t, x, "rk-oracle", meta, v)


def _fornberg(x0: float, xs: np.ndarray, order: int) -> np.ndarray:
    """Finite-difference weights for derivatives up to ``order`` at ``x0``."""
    n = xs.size
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def fd_derivatives(t, x):
    """First and second derivatives at interior points ``2..n-3`` by
    5-point (4th-order) stencils.  Returns ``(t_int, x_int, dx, d2x)``."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if t.size < 7:
        raise ValueError("need at least 7 samples")
    h = np.diff(t)
    if h.min() <= 0:
        raise ValueError("t must be strictly increasing")
    ratio = np.max(np.maximum(h[1:] / h[:-1], h[:-1] / h[1:])) if h.size > 1 else 1.0
    if ratio > 10.0:
        raise ValueError(f"neighbouring sample spacings differ by a factor {ratio:.3g} (limit 10)")
    idx = np.arange(2, t.size - 2)
    if np.allclose(h, h[0], rtol=1e-9, atol=0):
        hh = (t[-1] - t[0]) / (t.size - 1)
        win = np.stack([x[idx + k] for k in range(-2, 3)], axis=1)
        dx = win @ _D1 / (12.0 * hh)
        d2x = win @ _D2 / (12.0 * hh * hh)
    else:
        dx = np.empty(idx.size)
        d2x = np.empty(idx.size)
        for n, i in enumerate(idx):
            w = _fornberg(t[i], t[i - 2 : i + 3], 2)
            dx[n] = w[:, 1] @ x[i - 2 : i + 3]
            d2x[n] = w[:, 2] @ x[i - 2 : i + 3]
    return t[idx], x[idx], dx, d2x


def residual_from_derivatives(eq: MixedLienardEquation, t, x, v, a) -> ResidualReport:
    """Pointwise ``a + mu v^2/x + F(x) v + G(x)`` from known derivatives."""
    if eq.free_F:
        raise ValueError("equation has unresolved F coefficients")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    r = a + float(eq.mu) * v * v / x + eq.F(x) * v + eq.G(x)
    return _report(np.asarray(t, dtype=float), r)


def residual_norm(eq: MixedLienardEquation, curve: SolutionCurve) -> ResidualReport:
    """Residual of the full equation with finite-difference derivatives."""
    t, x, dx, d2x = fd_derivatives(curve.t, curve.x)
    return residual_from_derivatives(eq, t, x, dx, d2x)


def first_order_residual(rhs: PowerLawExpr, curve: SolutionCurve) -> ResidualReport:
    """``|x' - rhs(x)|`` along a curve, ``x'`` by finite differences."""
    t, x, dx, _ = fd_derivatives(curve.t, curve.x)
    return _report(t, dx - rhs(x))


def period_estimate(curve: SolutionCurve) -> float:
    """Mean spacing of upward crossings of ``x - mean(x)``.

    Each crossing is located on the degree-7 polynomial through the eight
    surrounding samples; the high degree keeps crossings accurate where the
    curve is flat (``x`` may vanish to third order there).
    """
    t, y = curve.t, curve.x - np.mean(curve.x)
    ups = np.nonzero((y[:-1] < 0) & (y[1:] >= 0))[0]
    crossings = []
    for i in ups:
        if y[i + 1] == 0.0:
            crossings.append(t[i + 1])
            continue
        lo = min(max(i - 3, 0), max(t.size - 8, 0))
        hi = min(lo + 8, t.size)
        h = t[i + 1] - t[i]
        s = (t[lo:hi] - t[i]) / h
        coef = np.polyfit(s, y[lo:hi], min(7, hi - lo - 1))
        guess = y[i] / (y[i] - y[i + 1])
        if np.polyval(coef, 0.0) * np.polyval(coef, 1.0) < 0:
            root = optimize.brentq(lambda z: np.polyval(coef, z), 0.0, 1.0, xtol=1e-15)
        else:
            # rounding moved the interpolant's sign at an end point
            r = np.roots(coef)
            r = r[(np.abs(r.imag) < 1e-9) & (r.real > -0.5) & (r.real < 1.5)].real
            root = r[np.argmin(np.abs(r - guess))] if r.size else guess
        crossings.append(t[i] + root * h)
    if len(crossings) < 2:
        raise ValueError("need at least two upward crossings to estimate a period")
    return float(np.mean(np.diff(crossings)))


def sup_norm_difference(a: SolutionCurve, b: SolutionCurve) -> float:
    """``max |x_a - x_b|`` over the common time window.

    Samples of ``a`` are compared directly when ``b`` has the same times,
    otherwise ``b`` is interpolated with a cubic spline.
    """
    lo, hi = max(a.t[0], b.t[0]), min(a.t[-1], b.t[-1])
    keep = (a.t >= lo) & (a.t <= hi)
    ta, xa = a.t[keep], a.x[keep]
    if ta.size == 0:
        raise ValueError("curves do not overlap")
    kb = (b.t >= lo) & (b.t <= hi)
    if kb.sum() == ta.size and np.allclose(b.t[kb], ta, rtol=0, atol=1e-12):
        xb = b.x[kb]
    else:
        xb = CubicSpline(b.t, b.x)(ta)
    return float(np.max(np.abs(xa - xb)))
