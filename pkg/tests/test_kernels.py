"""Compiled kernels agree with their pure-Python bodies."""
import numpy as np
import pytest

from mixedlienard import kernels
from mixedlienard._jit import HAS_NUMBA, python_version

pytestmark = pytest.mark.skipif(not HAS_NUMBA, reason="numba disabled")


def test_powerlaw_eval():
    c = np.array([2.0, -1.0, 0.5])
    e = np.array([-0.25, 1.0, 3.0])
    xs = np.linspace(0.1, 3.0, 50)
    assert np.allclose(kernels.powerlaw_eval(c, e, xs), python_version(kernels.powerlaw_eval)(c, e, xs), rtol=1e-15)
    assert np.isnan(kernels.powerlaw_value(c, e, -1.0))


def test_dopri_matches_python_body():
    fc, fe = np.array([0.0]), np.array([0.0])
    gc, ge = np.array([1.0]), np.array([1.0])
    t = np.linspace(0.0, 3.0, 31)
    args = (0.0, fc, fe, gc, ge, 1.0, 0.0, t, 1e-10, 1e-13, -1.0, 100000)
    xs, vs, n, status = kernels.dopri_lienard(*args)
    xp, vp, n2, status2 = python_version(kernels.dopri_lienard)(*args)
    assert n == n2 == t.size and status == status2 == kernels.RK_OK
    assert np.allclose(xs, xp, rtol=1e-13, atol=1e-15)
    assert np.allclose(xs, np.cos(t), atol=1e-9)


def test_hyp2f1_series_kernels():
    v1 = kernels.hyp2f1_direct(1.0, 0.5, 1.5, 0.3, 10000)
    v2 = python_version(kernels.hyp2f1_direct)(1.0, 0.5, 1.5, 0.3, 10000)
    assert v1[1] and v2[1]
    assert v1[0] == pytest.approx(v2[0], rel=1e-15)


def test_time_table_inversion():
    # phi1 = 1 - x (logistic with scale 1): t(y) = log(y/(1-y)) - log(y0/(1-y0))
    pc, pe = np.array([1.0, -1.0]), np.array([0.0, 1.0])
    nodes, weights = np.polynomial.legendre.leggauss(24)
    ys = np.linspace(0.2, 0.8, 13)
    ts = np.log(ys / (1 - ys)) - np.log(0.25)
    targets = np.linspace(ts[0], ts[-1], 40)
    got = kernels.invert_time_table(ts, ys, targets, pc, pe, 1.0, 1.0, nodes, weights)
    ref = python_version(kernels.invert_time_table)(ts, ys, targets, pc, pe, 1.0, 1.0, nodes, weights)
    exact = 1.0 / (1.0 + np.exp(-(targets + np.log(0.25))))
    assert np.allclose(got, ref, rtol=1e-14)
    assert np.allclose(got, exact, rtol=1e-12)
