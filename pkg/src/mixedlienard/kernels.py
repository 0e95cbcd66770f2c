"""Numeric inner loops.

Every function here takes only floats and float arrays so that it compiles
under ``numba.njit``.  With ``MIXEDLIENARD_DISABLE_NUMBA=1`` the same source
runs as ordinary Python, which is how the benchmark and the kernel tests
compare the two paths.
"""
import math

import numpy as np

from ._jit import njit

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

RK_OK = 0
RK_FLOOR = 1
RK_UNDERFLOW = 2
RK_NONFINITE = 3
RK_MAXSTEPS = 4


@njit
def powerlaw_value(coeffs, exps, x):
    """Sum of ``c * x**e``; NaN for a fractional power of a non-positive base."""
    total = 0.0
    for i in range(coeffs.shape[0]):
        e = exps[i]
        if x <= 0.0 and e != math.floor(e):
            return math.nan
        if x == 0.0:
            if e == 0.0:
                total += coeffs[i]
            elif e < 0.0:
                return math.inf
            continue
        total += coeffs[i] * x**e
    return total


@njit
def powerlaw_eval(coeffs, exps, xs):
    out = np.empty(xs.shape[0])
    for j in range(xs.shape[0]):
        out[j] = powerlaw_value(coeffs, exps, xs[j])
    return out


@njit
def lienard_accel(mu, fc, fe, gc, ge, x, v):
    return -mu * v * v / x - powerlaw_value(fc, fe, x) * v - powerlaw_value(gc, ge, x)


@njit
def _err_norm(e0, e1, y0, y1, n0, n1, rtol, atol):
    s0 = atol + rtol * max(abs(y0), abs(n0))
    s1 = atol + rtol * max(abs(y1), abs(n1))
    return math.sqrt(0.5 * ((e0 / s0) ** 2 + (e1 / s1) ** 2))


@njit
def dopri_lienard(mu, fc, fe, gc, ge, x0, v0, t_out, rtol, atol, x_floor, max_steps):
    """Integrate ``x'' = -mu x'^2/x - F(x) x' - G(x)`` forward in time.

    Steps are clipped so that every entry of ``t_out`` (increasing, starting
    at the initial time) is hit exactly.  Returns ``(xs, vs, n_done, status)``
    where only the first ``n_done`` samples are valid.
    """
    n = t_out.shape[0]
    xs = np.full(n, math.nan)
    vs = np.full(n, math.nan)
    xs[0] = x0
    vs[0] = v0
    x = x0
    v = v0
    t = t_out[0]
    span = t_out[n - 1] - t_out[0]
    if n == 1 or span <= 0.0:
        return xs, vs, 1, RK_OK
    h = min(1e-3 * span, 1e-2)
    k1x = v
    k1v = lienard_accel(mu, fc, fe, gc, ge, x, v)
    idx = 1
    steps = 0
    while idx < n:
        target = t_out[idx]
        if steps >= max_steps:
            return xs, vs, idx, RK_MAXSTEPS
        if h < 1e-14 * max(abs(t), 1.0):
            return xs, vs, idx, RK_UNDERFLOW
        hit = False
        hh = h
        if t + hh >= target:
            hh = target - t
            hit = True
        xa = x + hh * _A21 * k1x
        va = v + hh * _A21 * k1v
        k2x = va
        k2v = lienard_accel(mu, fc, fe, gc, ge, xa, va)
        xa = x + hh * (_A31 * k1x + _A32 * k2x)
        va = v + hh * (_A31 * k1v + _A32 * k2v)
        k3x = va
        k3v = lienard_accel(mu, fc, fe, gc, ge, xa, va)
        xa = x + hh * (_A41 * k1x + _A42 * k2x + _A43 * k3x)
        va = v + hh * (_A41 * k1v + _A42 * k2v + _A43 * k3v)
        k4x = va
        k4v = lienard_accel(mu, fc, fe, gc, ge, xa, va)
        xa = x + hh * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x)
        va = v + hh * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v)
        k5x = va
        k5v = lienard_accel(mu, fc, fe, gc, ge, xa, va)
        xa = x + hh * (_A61 * k1x + _A62 * k2x + _A63 * k3x + _A64 * k4x + _A65 * k5x)
        va = v + hh * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v)
        k6x = va
        k6v = lienard_accel(mu, fc, fe, gc, ge, xa, va)
        xn = x + hh * (_B1 * k1x + _B3 * k3x + _B4 * k4x + _B5 * k5x + _B6 * k6x)
        vn = v + hh * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v)
        k7x = vn
        k7v = lienard_accel(mu, fc, fe, gc, ge, xn, vn)
        ex = hh * (_E1 * k1x + _E3 * k3x + _E4 * k4x + _E5 * k5x + _E6 * k6x + _E7 * k7x)
        ev = hh * (_E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v + _E6 * k6v + _E7 * k7v)
        steps += 1
        err = _err_norm(ex, ev, x, v, xn, vn, rtol, atol)
        if not math.isfinite(err):
            h = 0.25 * hh
            if h < 1e-14 * max(abs(t), 1.0):
                return xs, vs, idx, RK_NONFINITE
            continue
        if err <= 1.0:
            t = target if hit else t + hh
            x = xn
            v = vn
            k1x = k7x
            k1v = k7v
            if hit:
                xs[idx] = x
                vs[idx] = v
                idx += 1
            if x_floor >= 0.0 and x <= x_floor:
                return xs, vs, idx, RK_FLOOR
            fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err**-0.2)
            # a clipped step says nothing about the natural step size
            if not hit or fac < 1.0:
                h = hh * fac
        else:
            h = hh * max(0.2, 0.9 * err**-0.2)
    return xs, vs, n, RK_OK


@njit
def hyp2f1_direct(a, b, c, z, max_terms):
    """Gauss series; returns ``(value, converged)``."""
    term = 1.0
    total = 1.0
    small = 0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if term == 0.0:
            return total, True
        if abs(term) <= 1e-17 * abs(total):
            small += 1
            if small >= 2:
                return total, True
        else:
            small = 0
    return total, False


@njit
def hyp2f1_log_sum(alpha, beta, m, w, psi1, psim1, psia, psib, max_terms):
    """``sum_k (alpha)_k (beta)_k / (k! (k+m)!) w^k [ln w - psi(k+1) - psi(k+m+1)
    + psi(alpha+k) + psi(beta+k)]`` with digamma values seeded at ``k = 0``.

    Returns ``(value, converged)``.
    """
    lnw = math.log(w)
    coef = 1.0 / math.gamma(m + 1.0)
    p1 = psi1
    pm = psim1
    pa = psia
    pb = psib
    total = coef * (lnw - p1 - pm + pa + pb)
    small = 0
    for k in range(max_terms):
        coef *= (alpha + k) * (beta + k) / ((k + 1.0) * (k + m + 1.0)) * w
        p1 += 1.0 / (k + 1.0)
        pm += 1.0 / (k + m + 1.0)
        pa += 1.0 / (alpha + k)
        pb += 1.0 / (beta + k)
        term = coef * (lnw - p1 - pm + pa + pb)
        total += term
        if coef == 0.0:
            return total, True
        if abs(term) <= 1e-17 * abs(total):
            small += 1
            if small >= 2:
                return total, True
        else:
            small = 0
    return total, False


@njit
def recip_flow(y, pc, pe, scale, power):
    """Integrand of ``dt/dy`` for the flow ``x' = x*phi1(x)/scale`` with ``x = y**power``."""
    x = y**power
    return scale * power * y ** (power - 1.0) / (x * powerlaw_value(pc, pe, x))


@njit
def gl_integral(a, b, pc, pe, scale, power, nodes, weights):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    total = 0.0
    for i in range(nodes.shape[0]):
        total += weights[i] * recip_flow(mid + half * nodes[i], pc, pe, scale, power)
    return half * total


@njit
def invert_time_table(t_table, y_table, targets, pc, pe, scale, power, nodes, weights):
    """Solve ``t(y) = target`` for each target.

    ``t_table`` is increasing and ``y_table`` monotone; between nodes ``t`` is
    continued by Gauss-Legendre integration from the left node.  A Newton step
    is taken when it stays inside the current bracket, bisection otherwise.
    """
    out = np.empty(targets.shape[0])
    m = t_table.shape[0]
    for j in range(targets.shape[0]):
        tt = targets[j]
        k = np.searchsorted(t_table, tt) - 1
        if k < 0:
            k = 0
        if k > m - 2:
            k = m - 2
        if tt == t_table[k]:
            out[j] = y_table[k]
            continue
        if tt == t_table[k + 1]:
            out[j] = y_table[k + 1]
            continue
        y0 = y_table[k]
        lo = y_table[k]
        hi = y_table[k + 1]
        # f(lo) < 0 < f(hi) along the table direction
        y = lo + (hi - lo) * (tt - t_table[k]) / (t_table[k + 1] - t_table[k])
        for _ in range(200):
            f = t_table[k] + gl_integral(y0, y, pc, pe, scale, power, nodes, weights) - tt
            if f < 0.0:
                lo = y
            else:
                hi = y
            d = recip_flow(y, pc, pe, scale, power)
            step = f / d if d != 0.0 and math.isfinite(d) else math.nan
            y_new = y - step
            if not math.isfinite(y_new) or (y_new - lo) * (y_new - hi) > 0.0:
                y_new = 0.5 * (lo + hi)
            if abs(y_new - y) <= 1e-15 * max(abs(y), 1e-300) or y_new == lo or y_new == hi:
                y = y_new
                break
            y = y_new
        out[j] = y
    return out
