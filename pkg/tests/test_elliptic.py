import mpmath
import numpy as np
import pytest
from scipy.special import ellipj

from sigmasurf import jets
from sigmasurf.elliptic import jacobi_sn_cn_dn, sn

U_SWEEP = np.linspace(-10, 10, 41)
M_SWEEP = (0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0)


def sn_series(u, m):
    """sn from Jacobi theta series in the nome (independent of the AGM)."""
    with mpmath.workdps(30):
        m = mpmath.mpf(m)
        K = mpmath.ellipk(m)
        q = mpmath.exp(-mpmath.pi * mpmath.ellipk(1 - m) / K)
        z = mpmath.pi * mpmath.mpf(u) / (2 * K)
        t2, t3 = mpmath.jtheta(2, 0, q), mpmath.jtheta(3, 0, q)
        return float(t3 / t2 * mpmath.jtheta(1, z, q) / mpmath.jtheta(4, z, q))


@pytest.mark.parametrize("m", M_SWEEP)
def test_identities(m):
    s, c, d = jacobi_sn_cn_dn(U_SWEEP, m)
    np.testing.assert_allclose(s**2 + c**2, 1, atol=1e-12)
    np.testing.assert_allclose(d**2 + m * s**2, 1, atol=1e-12)


@pytest.mark.parametrize("m", [m for m in M_SWEEP if 0 < m < 1])
def test_series_oracle(m):
    got = jacobi_sn_cn_dn(U_SWEEP, m)[0]
    want = np.array([sn_series(u, m) for u in U_SWEEP])
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_degenerate_moduli():
    u = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(jacobi_sn_cn_dn(u, 0.0)[0], np.sin(u), atol=1e-15)
    np.testing.assert_allclose(jacobi_sn_cn_dn(u, 1.0)[0], np.tanh(u), atol=1e-15)
    np.testing.assert_allclose(jacobi_sn_cn_dn(u, 1.0)[1], 1 / np.cosh(u), atol=1e-15)


def test_against_scipy():
    u = np.linspace(-10, 10, 201)
    for m in (0.2, 0.75):
        s, c, d, _ = ellipj(u, m)
        got = jacobi_sn_cn_dn(u, m)
        np.testing.assert_allclose(got, (s, c, d), atol=1e-13)


def test_complex_argument_against_mpmath():
    for u, m in [(0.3 + 0.4j, 0.5), (-1.2 + 0.7j, 0.9), (2.0 - 0.3j, 0.2)]:
        got = jacobi_sn_cn_dn(u, m)
        for g, kind in zip(got, ("sn", "cn", "dn")):
            assert complex(g) == pytest.approx(complex(mpmath.ellipfun(kind, u, m=m)), abs=1e-13)


def test_modulus_out_of_range():
    with pytest.raises(ValueError):
        jacobi_sn_cn_dn(0.5, 1.5)
    with pytest.raises(ValueError):
        jacobi_sn_cn_dn(0.5, -0.1)


def test_sn_jet_derivatives():
    m = 0.6
    L, R = jets.variables(0.4, 0.0)
    j = sn(L, m)
    s, c, d = jacobi_sn_cn_dn(0.4, m)
    assert j.l == pytest.approx(c * d)
    assert j.ll == pytest.approx(-s * d * d - m * s * c * c)
