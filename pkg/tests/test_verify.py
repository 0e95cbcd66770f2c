import math

import numpy as np
import pytest

from mixedlienard.cases import (
    IsochronousCase,
    is_alphas,
    is_equation,
    is_particular,
    isochronous_derivatives,
    isochronous_equation,
)
from mixedlienard.factorizer import MixedLienardEquation
from mixedlienard.powerexpr import PowerLawExpr
from mixedlienard.quadrature import SolutionCurve
from mixedlienard.verify import (
    fd_derivatives,
    first_order_residual,
    period_estimate,
    residual_norm,
    rk_integrate,
    sup_norm_difference,
    to_power_coordinates,
)

HARMONIC = MixedLienardEquation(0, PowerLawExpr(), PowerLawExpr.monomial(1.0, 1))


def test_harmonic_oscillator():
    t = np.linspace(0.0, 2 * math.pi, 401)
    curve = rk_integrate(HARMONIC, 1.0, 0.0, t, x_floor=None)
    assert curve.metadata["event"] == "ok"
    assert np.max(np.abs(curve.x - np.cos(t))) < 1e-8
    assert np.max(np.abs(curve.v + np.sin(t))) < 1e-8


def test_backward_integration():
    t = np.linspace(0.0, -3.0, 61)
    curve = rk_integrate(HARMONIC, 1.0, 0.0, t, x_floor=None)
    assert curve.t[0] == -3.0
    assert np.max(np.abs(curve.x - np.cos(curve.t))) < 1e-8
    assert np.max(np.abs(curve.v + np.sin(curve.t))) < 1e-8


def test_floor_event_truncates():
    # x' = -1 from x = 1 reaches the floor at t = 1
    eq = MixedLienardEquation(0, PowerLawExpr(), PowerLawExpr())
    curve = rk_integrate(eq, 1.0, -1.0, np.linspace(0, 2, 21), x_floor=1e-3)
    assert curve.metadata["event"] == "floor"
    assert curve.t[-1] <= 1.0
    with pytest.raises(ValueError):
        rk_integrate(eq, -1.0, 0.0, [0.0, 1.0])


def test_tolerance_range():
    with pytest.raises(ValueError):
        rk_integrate(HARMONIC, 1.0, 0.0, [0.0, 1.0], rel_tol=1e-14)


def test_israel_stewart_oracle():
    a = is_alphas(0.5, 0.75, 0.75)
    sol = is_particular(a, 1.0, 0.0, "+")
    t = np.linspace(0.0, 10.0, 501)
    curve = rk_integrate(is_equation(a), 1.0, float(sol.dH(0.0)), t)
    assert np.max(np.abs(curve.x - sol.H(t))) < 1e-8


def test_isochronous_in_power_coordinates():
    case = IsochronousCase(1, 2.5, 0.0)
    t = np.linspace(math.pi / 2, math.pi / 2 + 2 * math.pi, 2001)
    x, v, _ = isochronous_derivatives(case, t)
    curve = rk_integrate(isochronous_equation(1), float(x[0]), float(v[0]), t, x_floor=None, coordinates="power")
    assert curve.metadata["event"] == "ok"
    assert np.max(np.abs(curve.x - x)) < 1e-8


def test_power_coordinates_map():
    eq = to_power_coordinates(isochronous_equation(1))
    assert eq.mu == 0
    assert eq.F == PowerLawExpr.monomial(5.0, 3)
    # (mu+1) x^mu G(x) = x^(1/3) + x^(7/3)
    assert eq.G.approx_equal(PowerLawExpr([(1.0, 1), (1.0, 7)]))


def test_residual_of_exact_and_perturbed_curves():
    t = np.arange(0.0, 6.0, 1e-3)
    exact = SolutionCurve(t, 2.0 + np.cos(t), "closed-form")
    eq = MixedLienardEquation(0, PowerLawExpr(), PowerLawExpr([(1.0, 1), (-2.0, 0)]))
    assert residual_norm(eq, exact).max_abs < 1e-6
    bumped = SolutionCurve(t, exact.x + 0.01, "closed-form")
    assert residual_norm(eq, bumped).max_abs > 1e-3


def test_equilibrium_has_zero_residual():
    t = np.linspace(0, 1, 50)
    eq = MixedLienardEquation(0, PowerLawExpr.monomial(1.0, 1), PowerLawExpr([(1.0, 1), (-1.0, 2)]))
    rep = residual_norm(eq, SolutionCurve(t, np.ones_like(t), "closed-form"))
    assert rep.max_abs == 0.0
    assert rep.max_abs >= rep.rms >= 0.0


def test_fd_convergence_order():
    errs = []
    for h in (0.2, 0.1):
        t = np.arange(0.0, 10.0, h)
        _, _, dx, d2x = fd_derivatives(t, np.sin(t))
        errs.append(np.max(np.abs(d2x + np.sin(t[2:-2]))))
    assert errs[0] / errs[1] > 10  # fourth order halves to roughly 1/16


def test_fd_non_uniform_grid():
    t = np.cumsum(np.r_[0.0, np.tile([1e-3, 2e-3], 200)])
    _, _, dx, d2x = fd_derivatives(t, np.exp(t))
    assert np.max(np.abs(dx - np.exp(t[2:-2]))) < 1e-8
    bad = np.r_[np.linspace(0, 1, 10), 1.0 + np.linspace(0.2, 2.0, 10)]
    with pytest.raises(ValueError, match="spacing"):
        fd_derivatives(np.sort(np.r_[bad, 1.001]), np.zeros(21))


def test_first_order_residual():
    t = np.linspace(0.0, 2.0, 400)
    curve = SolutionCurve(t, np.exp(-t), "closed-form")
    assert first_order_residual(PowerLawExpr.monomial(-1.0, 1), curve).max_abs < 1e-9


def test_period_estimate():
    t = np.linspace(0.0, 20.0, 4001)
    assert period_estimate(SolutionCurve(t, np.cos(t), "closed-form")) == pytest.approx(2 * math.pi, abs=1e-8)
    with pytest.raises(ValueError):
        period_estimate(SolutionCurve(t[:300], np.cos(t[:300]), "closed-form"))


def test_sup_norm_difference_interpolates():
    t = np.linspace(0, 1, 101)
    a = SolutionCurve(t, np.sin(t), "closed-form")
    b = SolutionCurve(np.linspace(0, 1, 57), np.sin(np.linspace(0, 1, 57)), "closed-form")
    assert sup_norm_difference(a, a) == 0.0
    assert sup_norm_difference(a, b) < 1e-7
