import numpy as np
import pytest

from sigmasurf import families as fam
from sigmasurf.elliptic import jacobi_sn_cn_dn
from sigmasurf.geometry import metric
from sigmasurf.projector import FD, el_residual, projector_residuals

from conftest import grid

FIELDS = {
    "tanh": (fam.tanh_family, (-2, 2)),
    "expwell": (fam.expwell_family, (-40, 40)),
    "elliptic": (fam.elliptic_family, (-3, 3)),
    "piette": (fam.piette_family, (-3, 3)),
    "dressed": (fam.dress, (-3, 3)),
}


@pytest.mark.parametrize("name", FIELDS)
def test_family_is_chebyshev_solution(name):
    make, (lo, hi) = FIELDS[name]
    f = make()
    xl, xr = grid(lo, hi, 21, 0.0137)
    ok = f.in_domain(xl, xr)
    xl, xr = xl[ok], xr[ok]
    assert el_residual(f, xl, xr).max() < 1e-10
    assert max(r.max() for r in projector_residuals(f(xl, xr))) < 1e-12
    m = metric(f, xl, xr)
    np.testing.assert_allclose(m.J_L, 1, atol=1e-9)
    np.testing.assert_allclose(m.J_R, 1, atol=1e-9)


def test_parameter_validation():
    with pytest.raises(ValueError):
        fam.Tanh(a=0)
    with pytest.raises(ValueError):
        fam.ExpWell(p=-0.5)
    with pytest.raises(ValueError):
        fam.Elliptic(K=0.1)
    with pytest.raises(ValueError):
        fam.Piette(lam=2.0)
    with pytest.raises(ValueError):
        fam.Piette(lam=1j)
    with pytest.raises(ValueError):
        fam.Dressed(lam=2.0)


def test_tanh_angles():
    a, b = fam.tanh_angles(0.5, -0.5)
    assert (a, b) == pytest.approx((1.0, 0.0))


def test_rescale_chain_rule(tanh):
    f = fam.rescale(tanh, 2.0, 0.5)
    m = metric(f, 0.2, 0.3)
    assert m.J_L == pytest.approx(4.0) and m.J_R == pytest.approx(0.25)
    assert el_residual(f, 0.2, 0.3) < 1e-13


def test_rescale_analytic_matches_fd(tanh):
    f = fam.rescale(tanh, 2.0, 0.5)
    a = metric(f, 0.2, 0.3)
    b = metric(f.with_mode(FD), 0.2, 0.3)
    assert a.G_LR == pytest.approx(b.G_LR, abs=1e-7)


def test_chebyshev_normalise_rejects_non_constant(control):
    with pytest.raises(ValueError):
        fam.chebyshev_normalise(control)


def test_elliptic_unnormalised_has_constant_scale():
    f = fam.elliptic_family(normalise=False)
    m = metric(f, *grid(-1, 1, 5))
    assert np.ptp(m.J_L) < 1e-9 * m.J_L.mean()
    assert abs(m.J_L.mean() - 1) > 1e-3


def test_elliptic_w_uses_sn():
    p, q, a, b = fam.elliptic_constants(-1 / 20)
    assert p / q < 1
    f = fam.elliptic_family(normalise=False)
    w = f.wfield(0.0, 0.0)
    kq = np.sqrt(-1 / 20 * q + 0j)
    want = np.sqrt(-p) * jacobi_sn_cn_dn(kq * 0.0, p / q)[0]
    assert complex(w) == pytest.approx(complex(want), abs=1e-14)


def test_piette_comoving_velocity():
    assert fam.piette_comoving_velocity(-2 + 2j) == pytest.approx(0.4444, abs=5e-5)


def test_vacuum_is_degenerate():
    m = metric(fam.vacuum(), *grid(-1, 1, 5))
    np.testing.assert_allclose(m.det_G, 0, atol=1e-14)


def test_embed_block(tanh):
    f = fam.embed_block(tanh, 3)
    P = f(0.1, 0.2)
    assert P.shape == (3, 3)
    np.testing.assert_allclose(P[:2, :2], tanh(0.1, 0.2))
    assert el_residual(f, 0.1, 0.2) < 1e-13
    with pytest.raises(ValueError):
        fam.embed_block(tanh, 2)


def test_build_dispatch():
    assert fam.build(fam.Tanh()).name == "tanh"
    with pytest.raises((TypeError, ValueError)):
        fam.build(object())
