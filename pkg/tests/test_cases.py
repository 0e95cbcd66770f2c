import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from mixedlienard.cases import (
    DegenerateParameterError,
    FormVerificationError,
    IsochronousCase,
    PoleError,
    fisher_implicit_tau,
    fisher_kink,
    fisher_setup,
    form_verdicts,
    is_alphas,
    is_dynamic_relation,
    is_equation,
    is_particular,
    isochronous_A,
    isochronous_derivatives,
    isochronous_equation,
    isochronous_q,
    isochronous_x,
)
from mixedlienard.factorizer import NoFactorizationError
from mixedlienard.powerexpr import PowerLawExpr
from mixedlienard.quadrature import SolutionCurve
from mixedlienard.verify import residual_from_derivatives, residual_norm

# isochronous oscillators


def test_isochronous_coefficients():
    assert isochronous_A(0) == [1]
    assert isochronous_A(1) == [2, 1]
    assert isochronous_A(2) == [Fraction(8, 3), Fraction(4, 3), 1]
    assert all(isinstance(a, Fraction) for a in isochronous_A(5))
    with pytest.raises(ValueError):
        isochronous_A(-1)


def test_isochronous_equation_coefficients():
    eq = isochronous_equation(1)
    assert eq.mu == Fraction(-2, 3)
    assert eq.F == PowerLawExpr.monomial(5.0, 1)
    assert eq.G == PowerLawExpr([(3.0, 1), (3.0, 3)])
    eq0 = isochronous_equation(0)
    assert eq0.mu == 0 and eq0.F == PowerLawExpr.monomial(3.0, 1)


def test_isochronous_values():
    case = IsochronousCase(1, 2.5, 0.3)
    assert isochronous_x(case, 0.3) == 0.0
    assert isochronous_x(case, 0.3 + math.pi / 2) == pytest.approx(0.4, rel=1e-15)
    t = np.linspace(0, 5, 17)
    assert np.allclose(isochronous_x(case, t + 2 * math.pi), isochronous_x(case, t), atol=1e-14)
    assert isochronous_q(case, 0.3 + math.pi / 2) == pytest.approx(0.4 ** (1 / 3))
    assert isochronous_q(case, 0.3 - math.pi / 2) == pytest.approx(-(0.4 ** (1 / 3)), rel=1e-15)


def test_isochronous_periodic_flag_and_pole():
    assert IsochronousCase(1, 2.5).periodic
    assert not IsochronousCase(1, 1.5).periodic
    with pytest.raises(PoleError):
        isochronous_x(IsochronousCase(1, 1.5), np.linspace(0, 2 * math.pi, 100))


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("factor", [1.5, 3.0, 10.0])
def test_isochronous_closed_form_solves_equation(m, factor):
    case = IsochronousCase(m, factor * float(isochronous_A(m)[0]), 0.1)
    t = np.linspace(0.2, 6.0, 500)
    x, v, a = isochronous_derivatives(case, t)
    rep = residual_from_derivatives(isochronous_equation(m), t, x, v, a)
    assert rep.max_abs < 1e-10


def test_isochronous_derivatives_against_mpmath():
    case = IsochronousCase(2, 4.0, 0.0)
    f = lambda s: mpmath.sin(s) ** 5 / (4 - mpmath.cos(s) * (mpmath.mpf(8) / 3 + mpmath.mpf(4) / 3 * mpmath.sin(s) ** 2 + mpmath.sin(s) ** 4))
    for s in (0.4, 1.3, 2.9, 4.4):
        x, v, a = isochronous_derivatives(case, s)
        assert x == pytest.approx(float(f(s)), rel=1e-13)
        assert v == pytest.approx(float(mpmath.diff(f, s)), rel=1e-12)
        assert a == pytest.approx(float(mpmath.diff(f, s, 2)), rel=1e-11)


# Fisher travelling waves


def test_fisher_setup_constants():
    c = fisher_setup(0.25, 2, 1.0, "+")
    assert c.p == Fraction(3, 4) and c.p + c.m == 1
    assert c.a1 == pytest.approx(math.sqrt(5 / 8), abs=1e-12)
    assert c.omega == pytest.approx(-3 / math.sqrt(2), abs=1e-12)
    assert c.speed == pytest.approx(3 / math.sqrt(2), abs=1e-12)
    minus = fisher_setup(0.25, 2, 1.0, "-")
    assert minus.a1 == pytest.approx(-c.a1) and minus.omega == pytest.approx(-c.omega)


@pytest.mark.parametrize("m,q,k", [(0.5, 1, 1.0), (0.25, 4, 2.0), (1.0, 0.5, 0.7)])
def test_fisher_speed_formula(m, q, k):
    c = fisher_setup(m, q, k, "+")
    assert c.a1 == pytest.approx(math.sqrt(2 * (1 + m) / (2 + q)), rel=1e-12)
    assert c.velocity == pytest.approx(-(q + 4) / math.sqrt(2 * (q + 2)), rel=1e-12)


def test_fisher_speed_limits():
    assert fisher_setup(0.25, 1e-3, 1.0).speed == pytest.approx(2.0, abs=1e-3)
    assert fisher_setup(0.25, 1000, 1.0).speed > 20


def test_fisher_derived_form_closed_expression():
    c = fisher_setup(0.25, 2, 1.0)
    for u in (1e-6, 0.1, 0.5, 0.9, 0.999):
        s = u**0.25
        ref = math.sqrt(2) * (2 * math.atanh(s) + 2 * math.atan(s))
        assert fisher_implicit_tau(c, u, 0.0, "derived") == pytest.approx(ref, rel=1e-12)


def test_fisher_printed_form_value():
    c = fisher_setup(0.25, 2, 1.0)
    u = 0.3
    ref = float(u**0.5 * mpmath.hyp2f1(1, 0.5, 1.5, u) / (0.5 * mpmath.sqrt(0.5)))
    assert fisher_implicit_tau(c, u, 0.0, "printed") == pytest.approx(ref, rel=1e-12)


def test_fisher_kink_properties():
    c = fisher_setup(0.25, 2, 1.0)
    tau = np.linspace(0.1, 20.0, 1991)
    kink = fisher_kink(c, tau)
    assert kink.metadata["form"] == "derived"
    assert kink.metadata["verdicts"]["printed"]["passed"] is False
    assert np.all(np.diff(kink.x) > 0)
    assert kink.x[0] > 0 and kink.x[-1] < 1
    assert residual_norm(c.equation, kink).max_abs < 1e-6


def test_fisher_kink_minus_branch_runs_backwards():
    c = fisher_setup(0.25, 2, 1.0, "-")
    tau = np.linspace(-10.0, -0.1, 991)
    kink = fisher_kink(c, tau)
    assert np.all(np.diff(kink.x) < 0)
    assert residual_norm(c.equation, kink).max_abs < 1e-6
    with pytest.raises(ValueError):
        fisher_kink(c, np.linspace(0.1, 1, 10), form="derived")


def test_fisher_form_verdicts_general_parameters():
    c = fisher_setup(0.5, 1, 1.5)
    v = form_verdicts(c, span=(0.2, 8.0), h=0.01)
    assert v["derived"].max_abs < 1e-6
    assert v["printed"].max_abs > 1e-3


def test_fisher_kink_fails_loudly_when_no_form_works():
    c = fisher_setup(0.25, 2, 1.0)
    with pytest.raises(FormVerificationError):
        # too coarse for the residual check of either form to pass
        fisher_kink(c, np.linspace(0.1, 20.0, 12))


# Israel-Stewart


def test_is_alphas_exact():
    a = is_alphas(0.5, 0.75, 0.75)
    assert a.delta == Fraction(9, 8)
    assert a.alpha1 == Fraction(-4, 3)
    assert a.alpha2 == pytest.approx(4.299038105676658, rel=1e-12)
    assert a.alpha3 == pytest.approx(3.7665857377724805, rel=1e-12)


def test_is_alphas_inviscid():
    w = 0.3
    a = is_alphas(w, 0.0, 1.0)
    d = 0.75 * (1 + w) / (0.5 + w)
    assert a.alpha2 == pytest.approx(1.5 + 3 * (1 + w) - 9 / (4 * d) * (1 + w))
    assert a.alpha3 == pytest.approx(2.25 * (1 + w))


def test_is_alphas_degeneracy_and_domain():
    with pytest.raises(DegenerateParameterError, match="alpha1 = -1"):
        is_alphas(0, 0.75, 0.75)
    assert float(is_alphas(1e-9, 0.75, 0.75).alpha1) == pytest.approx(-1.0, abs=1e-8)
    with pytest.raises(ValueError):
        is_alphas(1.0, 0.75, 0.75)
    with pytest.raises(ValueError):
        is_alphas(0.5, 0.75, 0.0)


def test_is_particular_constants():
    a = is_alphas(0.5, 0.75, 0.75)
    plus, minus = is_particular(a, 1.0, 0.0, "+"), is_particular(a, 1.0, 0.0, "-")
    assert plus.a1 == pytest.approx(-0.27763, abs=1e-5)
    assert minus.a1 == pytest.approx(-1.43441, abs=1e-5)
    qa, qb = a.alpha3 * (2 + float(a.alpha1)), a.alpha2
    roots = [(-qb + sg * math.sqrt(qb * qb - 4 * qa)) / (2 * qa) for sg in (1, -1)]
    assert plus.A == pytest.approx(-1 / (roots[0] * a.alpha3), rel=1e-12)
    assert minus.A == pytest.approx(-1 / (roots[1] * a.alpha3), rel=1e-12)
    assert (plus.A, minus.A) == pytest.approx((0.95627, 0.18509), abs=1e-5)
    assert plus.H(0.0) == 1.0
    sol = is_particular(a, 2.5, 3.0, "+")
    assert sol.H(3.0) == pytest.approx(2.5, rel=1e-15)


def test_is_particular_no_real_root():
    # large alpha3 makes the discriminant negative
    a = is_alphas(0.5, 0.75, 0.75)
    from dataclasses import replace

    bad = replace(a, alpha3=10.0)
    with pytest.raises(NoFactorizationError, match="no real factorization"):
        is_particular(bad, 1.0)
    with pytest.raises(ValueError):
        is_particular(a, 0.0)


@pytest.mark.parametrize("w", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_is_particular_solves_equation(w):
    a = is_alphas(w, 0.75, 0.75)
    for branch in "+-":
        sol = is_particular(a, 1.0, 0.0, branch)
        t = sol.t_star + np.linspace(0.1, 10, 1000)
        rep = residual_from_derivatives(is_equation(a), t, sol.H(t), sol.dH(t), sol.d2H(t))
        assert rep.max_abs < 1e-9


def test_dynamic_relation_report():
    a = is_alphas(0.5, 0.75, 0.75)
    for branch in "+-":
        rep = is_dynamic_relation(a, is_particular(a, 1.0, 0.0, branch))
        assert rep["agrees"]["first_order"] and rep["agrees"]["derived_eta"]
        assert not rep["agrees"]["printed_same"] and not rep["agrees"]["printed_other"]
        assert rep["printed_ratio_other"] == pytest.approx(2.0, rel=1e-12)
