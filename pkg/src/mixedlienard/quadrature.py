"""Particular solutions from the compatible first-order factor.

``(D - phi1) x**(mu+1) = 0`` is the autonomous flow ``x' = x phi1(x)/(mu+1)``,
so ``t - t0 = (mu+1) * integral dx / (x phi1(x))``.  Time is tabulated along
the monotone segment between equilibria (roots of ``phi1``, 0 or infinity)
and inverted per requested time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from .factorizer import FactorPair
from .kernels import gl_integral, invert_time_table, recip_flow
from .powerexpr import PowerLawExpr, evaluate

X = PowerLawExpr.x()

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_SHRINK = 0.9  # node spacing toward a finite end of the segment
_GROW = 1.1  # node spacing toward infinity
_MAX_NODES = 4000
QUAD_RTOL = 1e-12


class SegmentError(ValueError):
    """The integration path crosses or ends on an equilibrium of the flow."""


class TimeRangeError(ValueError):
    """A requested time lies outside what the monotone segment can reach."""

    def __init__(self, message: str, attainable: tuple[float, float]):
        super().__init__(message)
        self.attainable = attainable


@dataclass
class SolutionCurve:
    """Sampled trajectory with strictly increasing ``t``."""

    t: np.ndarray
    x: np.ndarray
    method: str
    metadata: dict = field(default_factory=dict)
    v: Optional[np.ndarray] = None  # velocities, when the producer knows them

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        if self.t.shape != self.x.shape or self.t.ndim != 1:
            raise ValueError("t and x must be 1-d arrays of equal length")
        if self.v is not None:
            self.v = np.asarray(self.v, dtype=float)
        if self.t.size > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("t must be strictly increasing")
        if self.method not in {"quadrature", "closed-form", "rk-oracle", "parametric"}:
            raise ValueError(f"unknown method tag {self.method!r}")

    def __len__(self):
        return self.t.size

    def require_positive(self) -> "SolutionCurve":
        if np.any(~(self.x > 0)):
            raise ValueError("curve leaves the positive domain")
        return self

    def window(self, t_lo: float, t_hi: float) -> "SolutionCurve":
        keep = (self.t >= t_lo) & (self.t <= t_hi)
        v = None if self.v is None else self.v[keep]
        return SolutionCurve(self.t[keep], self.x[keep], self.method, dict(self.metadata), v)

    def to_csv(self, path) -> Path:
        return write_csv(path, ["t", "x"], [self.t, self.x])


def write_csv(path, header: list[str], columns: list[np.ndarray]) -> Path:
    """Write columns with 12 significant digits, LF endings, atomically."""
    path = Path(path)
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(f"{float(v):.12g}" for v in row))
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    tmp.replace(path)
    return path


def first_order_rhs(pair: FactorPair) -> PowerLawExpr:
    """Right side of ``x' = x phi1(x) / (mu+1)``."""
    rhs = (X * pair.phi1).scale(1.0 / pair.mu_plus_one)
    return rhs.real() if rhs.is_complex() else rhs


def positive_roots(expr: PowerLawExpr, lo: float = 1e-12, hi: float = 1e12, n: int = 4001) -> list[float]:
    """Sign changes of ``expr`` on a log grid over ``[lo, hi]``, refined by brentq."""
    xs = np.geomspace(lo, hi, n)
    vals = evaluate(expr, xs)
    roots = [float(x) for x, v in zip(xs, vals) if v == 0.0]
    for i in np.nonzero(vals[:-1] * vals[1:] < 0)[0]:
        roots.append(optimize.brentq(lambda z: evaluate(expr, z), xs[i], xs[i + 1], xtol=1e-15, rtol=4e-16))
    return sorted(roots)


class FlowSegment:
    """The monotone segment of ``x' = x phi1/(mu+1)`` containing ``x0``.

    Work happens in ``y = x**(1/power)``; ``power > 1`` is used when the
    segment reaches 0 and ``1/(x phi1)`` has an integrable singularity there,
    which makes the integrand regular at ``y = 0``.
    """

    def __init__(self, pair: FactorPair, x0: float, t0: float = 0.0):
        if pair.is_complex:
            raise TypeError("quadrature needs a real factor pair")
        if x0 < 0:
            raise ValueError("x0 must be non-negative")
        self.pair = pair
        self.phi1 = pair.phi1
        self.scale = pair.mu_plus_one
        self.x0 = float(x0)
        self.t0 = float(t0)
        self.pc, self.pe = pair.phi1.as_arrays()
        roots = positive_roots(pair.phi1)
        if any(abs(r - x0) <= 1e-14 * max(1.0, x0) for r in roots):
            raise SegmentError(f"x0 = {x0} is an equilibrium of the first-order flow")
        self.x_lo = max([r for r in roots if r < x0], default=0.0)
        self.x_hi = min([r for r in roots if r > x0], default=math.inf)

        e_min = pair.phi1.terms[0].exponent
        e_max = pair.phi1.terms[-1].exponent
        self.power = 1.0
        self.reaches_zero = False
        if self.x_lo == 0.0 and -1 < e_min < 0:
            self.power = float(Fraction(-1) / e_min)
            self.reaches_zero = True
        if self.x0 == 0.0 and not self.reaches_zero:
            raise SegmentError("x0 = 0 is not reachable in finite time")
        self.reaches_inf = self.x_hi == math.inf and e_max > 0
        self.y0 = self.to_y(self.x0)
        probe = self.x0 if self.x0 > 0 else 0.5 * min(self.x_hi, 1.0)
        self.speed_sign = math.copysign(1.0, float(evaluate(first_order_rhs(pair), probe)))

    def to_y(self, x):
        return np.asarray(x, dtype=float) ** (1.0 / self.power) if self.power != 1.0 else np.asarray(x, dtype=float)

    def to_x(self, y):
        return np.asarray(y, dtype=float) ** self.power if self.power != 1.0 else np.asarray(y, dtype=float)

    def _integrand(self, y):
        return recip_flow(y, self.pc, self.pe, self.scale, self.power)

    def integral(self, y_a: float, y_b: float) -> float:
        if y_a == y_b:
            return 0.0
        val, _ = integrate.quad(self._integrand, y_a, y_b, epsabs=0.0, epsrel=QUAD_RTOL, limit=400)
        return val

    def integral_to_inf(self, y_a: float) -> float:
        """``integral(y_a, inf)`` computed in ``s = 1/y``."""
        val, _ = integrate.quad(
            lambda s: self._integrand(1.0 / s) / (s * s), 0.0, 1.0 / y_a, epsabs=0.0, epsrel=QUAD_RTOL, limit=400
        )
        return val

    def contains(self, x: float) -> bool:
        lo_ok = x > self.x_lo or (x == 0.0 and self.reaches_zero)
        return lo_ok and x < self.x_hi

    def time_of_state(self, x: float) -> float:
        if not self.contains(x):
            raise SegmentError(
                f"segment from x0={self.x0} to x={x} crosses or ends on an equilibrium "
                f"(segment is ({self.x_lo}, {self.x_hi}))"
            )
        return self.t0 + self.integral(float(self.y0), float(self.to_y(x)))

    def _end_y(self, forward: bool) -> float:
        toward_hi = (self.speed_sign > 0) == forward
        return float(self.to_y(self.x_hi)) if toward_hi else float(self.to_y(self.x_lo))

    def _branch(self, forward: bool, t_needed: float):
        """Nodes from y0 toward the segment end in the chosen time direction.

        Returns ``(ts, ys, t_limit)``; ``t_limit`` is the time at which the end
        is reached (finite for finite-time arrival, otherwise +/-inf).
        """
        end = self._end_y(forward)
        y_prev, t_prev = float(self.y0), self.t0
        ts, ys = [], []
        sgn = 1.0 if forward else -1.0
        finite_end = math.isfinite(end)
        reachable = (end == 0.0 and self.reaches_zero) or (not finite_end and self.reaches_inf)
        for k in range(1, _MAX_NODES + 1):
            if sgn * (t_prev - t_needed) >= 0 and k > 1:
                break
            if finite_end:
                y = end + (float(self.y0) - end) * _SHRINK**k
                if abs(y - end) <= 1e-15 * max(abs(end), 1.0):
                    if reachable:
                        y = end
                    else:
                        break
            else:
                y = float(self.y0) * _GROW**k if self.y0 > 0 else _GROW ** (k - 60)
                if y > 1e150:
                    break
            t = t_prev + self.integral(y_prev, y)
            if not math.isfinite(t):
                break
            ts.append(t)
            ys.append(y)
            y_prev, t_prev = y, t
            if y == end:
                break
        if reachable and ys and ys[-1] == end:
            limit = ts[-1]
        elif reachable and not finite_end:
            limit = t_prev + self.integral_to_inf(y_prev)
        else:
            limit = sgn * math.inf
        return ts, ys, limit

    def table(self, t_min: float, t_max: float):
        bt, by, lim_lo = self._branch(False, t_min) if t_min < self.t0 and self.x0 > 0 else ([], [], -math.inf)
        ft, fy, lim_hi = self._branch(True, t_max) if t_max > self.t0 else ([], [], math.inf)
        if t_min < self.t0 and self.x0 == 0.0:
            lim_lo = self.t0
        ts = np.array(bt[::-1] + [self.t0] + ft)
        ys = np.array(by[::-1] + [float(self.y0)] + fy)
        return ts, ys, (lim_lo, lim_hi)

    def solve(self, t_grid) -> np.ndarray:
        t_grid = np.asarray(t_grid, dtype=float)
        t_min, t_max = float(t_grid.min()), float(t_grid.max())
        ts, ys, (lim_lo, lim_hi) = self.table(t_min, t_max)
        lo_ok = ts[0] <= t_min or math.isclose(ts[0], t_min, rel_tol=0, abs_tol=1e-13)
        hi_ok = ts[-1] >= t_max or math.isclose(ts[-1], t_max, rel_tol=0, abs_tol=1e-13)
        if not (lo_ok and hi_ok) or (self.x0 == 0.0 and t_min < self.t0):
            lo = self.t0 if self.x0 == 0.0 else lim_lo
            raise TimeRangeError(
                f"requested t in [{t_min}, {t_max}] but the segment reaches only ({lo}, {lim_hi})",
                (lo, lim_hi),
            )
        targets = np.clip(t_grid, ts[0], ts[-1])
        y = invert_time_table(ts, ys, targets, self.pc, self.pe, self.scale, self.power, _GL_NODES, _GL_WEIGHTS)
        return self.to_x(y)


def time_of_state(pair: FactorPair, x0: float, t0: float, x: float) -> float:
    """``t0 + (mu+1) * integral_{x0}^{x} ds / (s phi1(s))``."""
    return FlowSegment(pair, x0, t0).time_of_state(x)


def quadrature_solve(pair: FactorPair, x0: float, t0: float, t_grid, metadata: Optional[dict] = None) -> SolutionCurve:
    """Particular solution through ``x(t0) = x0`` sampled on ``t_grid``."""
    seg = FlowSegment(pair, x0, t0)
    t_grid = np.asarray(t_grid, dtype=float)
    x = seg.solve(t_grid)
    meta = {
        "t0": float(t0),
        "x0": float(x0),
        "branch": pair.branch,
        "a1": pair.a1,
        "mu": str(pair.mu),
        "segment": [seg.x_lo, seg.x_hi],
    }
    meta.update(metadata or {})
    return SolutionCurve(t_grid, x, "quadrature", meta)


def gl_time_increment(seg: FlowSegment, y_a: float, y_b: float) -> float:
    """Fixed-order Gauss-Legendre version of :meth:`FlowSegment.integral`."""
    return gl_integral(y_a, y_b, seg.pc, seg.pe, seg.scale, seg.power, _GL_NODES, _GL_WEIGHTS)
