import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmasurf import families as fam
from sigmasurf.cp1 import (
    boost_factor,
    cp1_fundamental_forms,
    jl_jr,
    lab_to_lightcone,
    lightcone_to_lab,
    mean_curvature_scalar,
    projector_from_w,
    sg_phase,
    sg_residual,
    sg_residual_at,
    surface_angle,
    unit_normal,
    velocity_from_factor,
    w_from_projector,
)
from sigmasurf.projector import SingularPointError, derivatives, projector_residuals

from conftest import grid


def test_projector_from_w_examples():
    np.testing.assert_allclose(projector_from_w(0), [[0, 0], [0, 1]])
    np.testing.assert_allclose(projector_from_w(1), [[0.5, -0.5], [-0.5, 0.5]])
    np.testing.assert_allclose(projector_from_w(1e12), [[1, 0], [0, 0]], atol=1e-12)


@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False))
@settings(max_examples=80, deadline=None)
def test_projector_from_w_is_rank_one_projector(w):
    P = projector_from_w(w)
    idem, herm = projector_residuals(P)
    assert idem < 1e-12 and herm < 1e-12
    assert np.trace(P).real == pytest.approx(1.0)
    if 1e-3 < abs(w) < 1e3:
        assert complex(w_from_projector(P)) == pytest.approx(w, rel=1e-9)


def test_jl_jr_on_tanh():
    jl, jr = jl_jr(fam.tanh_w(), *grid(-2, 2, 9))
    np.testing.assert_allclose(jl, 1, atol=1e-13)
    np.testing.assert_allclose(jr, 1, atol=1e-13)


def test_surface_angle_agrees_with_w_chart(tanh):
    xl, xr = grid(-1, 1, 5, 0.03)
    theta = surface_angle(tanh, xl, xr)
    w, wl, wr = fam.tanh_w().partials(xl, xr)
    # the conjugate phase is the ratio -d_L w / d_R w
    np.testing.assert_allclose(np.exp(-1j * theta), -wl / wr, atol=1e-12)


def test_phase_at_reference_point(tanh):
    ph = sg_phase(tanh, np.array([0.5, 0.6]), np.array([-0.5, -0.4]))
    assert ph.phi[0, 0] == pytest.approx(2.60352, abs=1e-5)


def test_phase_is_anchored_and_continuous(tanh):
    g = np.linspace(-1, 1, 81)
    ph = sg_phase(tanh, g, g, basepoint=(40, 40))
    assert 0 <= ph.phi[40, 40] < 2 * np.pi
    assert np.abs(np.diff(ph.phi, axis=0)).max() < 0.5
    assert np.abs(np.diff(ph.phi, axis=1)).max() < 0.5


def test_grid_and_pointwise_residuals_agree(tanh):
    g = np.linspace(-0.5, 0.5, 101)
    grid_res = sg_residual(sg_phase(tanh, g, g))
    assert np.abs(grid_res).max() < 1e-5
    pts = sg_residual_at(tanh, *grid(-0.5, 0.5, 6), h=5e-3)
    assert np.abs(pts).max() < 1e-5


def test_sg_phase_refuses_non_chebyshev_field():
    f = fam.rescale(fam.tanh_family(), 2.0, 1.0)
    with pytest.raises(SingularPointError):
        sg_phase(f, np.linspace(0, 1, 5), np.linspace(0, 1, 5))


def test_mean_curvature_scalar(tanh):
    xl, xr = grid(-1, 1, 7, 0.021)
    H = mean_curvature_scalar(tanh, xl, xr)
    theta = surface_angle(tanh, xl, xr)
    assert np.abs(H.imag).max() < 1e-10
    np.testing.assert_allclose(H.real, -2 / np.tan(theta), rtol=1e-9)


def test_mean_curvature_singular_where_angle_vanishes(tanh):
    # xi_L = xi_R gives the degenerate direction of the tanh surface
    with pytest.raises(SingularPointError):
        mean_curvature_scalar(tanh, 0.3, 0.3)


def test_fundamental_forms(tanh):
    (E, F, G), ii, ii_direct = cp1_fundamental_forms(tanh, 0.4, -0.3)
    assert E == G == 1
    b = derivatives(tanh, 0.4, -0.3)
    assert F == pytest.approx(-0.5 * np.real(np.trace(b.L @ b.R)), abs=1e-12)
    assert ii == pytest.approx(ii_direct, abs=1e-12)


def test_unit_normal_squares_to_minus_one(rng):
    P = projector_from_w(0.3 - 0.7j)
    n = unit_normal(P)
    np.testing.assert_allclose(n @ n, -np.eye(2), atol=1e-14)


@given(st.floats(-0.95, 0.95), st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=50, deadline=None)
def test_lab_coordinates_round_trip(V, X, T):
    xl, xr = lab_to_lightcone(X, T, V)
    X2, T2 = lightcone_to_lab(xl, xr, V)
    assert X2 == pytest.approx(X, abs=1e-10) and T2 == pytest.approx(T, abs=1e-10)


def test_boost_factor_round_trip():
    for V in (-0.5, 0.0, 0.4444):
        assert velocity_from_factor(boost_factor(V)) == pytest.approx(V)
    with pytest.raises(ValueError):
        boost_factor(1.0)
