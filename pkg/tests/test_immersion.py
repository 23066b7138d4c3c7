import numpy as np
import pytest

from sigmasurf import families as fam
from sigmasurf.algebra import random_special_unitary
from sigmasurf.immersion import (
    _simpson_weights,
    closedness_residual,
    integrate_surface,
    integrate_to_points,
    path_independence,
    pca3,
    procrustes_align,
    tanh_surface_reference,
)
from sigmasurf.projector import constant_field, gauge_transform

from conftest import grid


def test_simpson_weights_integrate_cubics_exactly():
    w = _simpson_weights(4) / 4
    t = np.linspace(0, 1, 5)
    assert w @ t**3 == pytest.approx(0.25)
    with pytest.raises(ValueError):
        _simpson_weights(3)


def test_constant_projector_gives_a_point():
    f = constant_field(np.diag([0.0, 1.0]))
    g = np.linspace(-1, 1, 9)
    mesh = integrate_surface(f, g, g, (0.0, 0.0), base_value=[1.0, 2.0, 3.0])
    np.testing.assert_array_equal(mesh.X, np.broadcast_to([1.0, 2.0, 3.0], mesh.X.shape))


def test_base_value_translates(tanh):
    g = np.linspace(-1, 1, 11)
    a = integrate_surface(tanh, g, g, (0.0, 0.0))
    b = integrate_surface(tanh, g, g, (0.0, 0.0), base_value=[0.5, -1.0, 2.0])
    np.testing.assert_allclose(b.X - a.X, np.broadcast_to([0.5, -1.0, 2.0], a.X.shape), atol=1e-14)
    np.testing.assert_array_equal(a.X[5, 5], 0.0)


def test_basepoint_must_be_a_node(tanh):
    g = np.linspace(-1, 1, 11)
    with pytest.raises(ValueError):
        integrate_surface(tanh, g, g, (0.05, 0.0))


def test_distances_invariant_under_conjugation(piette, rng):
    U = random_special_unitary(2, rng)
    g = np.linspace(-0.5, 0.5, 9)
    a = integrate_surface(piette, g, g, (0.0, 0.0)).vertices()
    b = integrate_surface(gauge_transform(piette, U), g, g, (0.0, 0.0)).vertices()
    da = np.linalg.norm(a[:, None] - a[None], axis=-1)
    db = np.linalg.norm(b[:, None] - b[None], axis=-1)
    np.testing.assert_allclose(da, db, atol=1e-12)


def test_discrete_first_form(tanh):
    g = np.linspace(-0.5, 0.5, 201)
    E, F, G = integrate_surface(tanh, g, g, (0.0, 0.0)).first_form()
    np.testing.assert_allclose(E, 1, atol=1e-2)
    np.testing.assert_allclose(G, 1, atol=1e-2)


def _panel_change(field, n):
    g = np.linspace(-1, 1, n)
    a = integrate_surface(field, g, g, (0.0, 0.0), panels=4)
    b = integrate_surface(field, g, g, (0.0, 0.0), panels=8)
    return np.abs(a.X - b.X).max()


def test_quadrature_converges(tanh, piette):
    assert _panel_change(tanh, 81) < 1e-8
    # composite Simpson: halving the spacing divides the error by about 16
    ratio = _panel_change(piette, 41) / _panel_change(piette, 81)
    assert 12 < ratio < 20


def test_grid_and_scattered_integration_agree(piette):
    g = np.linspace(-1, 1, 41)
    mesh = integrate_surface(piette, g, g, (0.0, 0.0), panels=8)
    pt = integrate_to_points(piette, g[35], g[7], (0.0, 0.0), step=0.01)
    np.testing.assert_allclose(pt, mesh.X[35, 7], atol=1e-8)


def test_path_independence(tanh, piette):
    assert path_independence(tanh, (0.8, -0.6), (0.0, 0.0)) < 1e-8
    assert path_independence(piette, (0.8, -0.6), (0.0, 0.0)) < 1e-6


def test_path_dependence_off_shell(control):
    assert path_independence(control, (0.8, -0.6), (0.0, 0.0)) > 1e-3


def test_closedness(tanh, control):
    assert closedness_residual(tanh, *grid(-1, 1, 5, 0.01)).max() < 1e-8
    assert closedness_residual(control, 0.7, 0.6) > 1e-1


def test_pca3_keeps_three_dimensional_data():
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((50, 3)) @ rng.standard_normal((3, 8))
    proj, frac = pca3(pts)
    assert proj.shape == (50, 3)
    assert frac == pytest.approx(1.0)
    d0 = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    d1 = np.linalg.norm(proj[:, None] - proj[None], axis=-1)
    np.testing.assert_allclose(d0, d1, atol=1e-10)
    np.testing.assert_array_equal(pca3(pts)[0], proj)


def test_procrustes_recovers_rigid_motion():
    rng = np.random.default_rng(2)
    B = rng.standard_normal((30, 3))
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    A = B @ Q + [1.0, -2.0, 0.5]
    aligned, rms = procrustes_align(A, B)
    assert rms < 1e-12
    np.testing.assert_allclose(aligned, B, atol=1e-12)


def test_reference_surface_has_unit_speed_coordinates():
    h = 1e-6
    a, b = 0.7, 0.3
    dA = (tanh_surface_reference(a + h, b) - tanh_surface_reference(a - h, b)) / (2 * h)
    dB = (tanh_surface_reference(a, b + h) - tanh_surface_reference(a, b - h)) / (2 * h)
    # in (alpha, beta) the pseudosphere has I = tanh^2(2a) da^2 + sech^2(2a)/4 db^2
    assert dA @ dA == pytest.approx(np.tanh(2 * a) ** 2, rel=1e-7)
    assert dB @ dB == pytest.approx(1 / (4 * np.cosh(2 * a) ** 2), rel=1e-7)
    assert dA @ dB == pytest.approx(0, abs=1e-9)
    np.testing.assert_allclose(tanh_surface_reference(1.0, 0.0), 0, atol=1e-15)


def test_tanh_surface_is_a_pseudosphere(tanh):
    a = np.linspace(0.3, 1.5, 9)
    b = np.linspace(-1.0, 1.0, 9)
    A, B = np.meshgrid(a, b, indexing="ij")
    xl, xr = (A + B / 2) / 2, (B / 2 - A) / 2
    X = integrate_to_points(tanh, xl, xr, (0.5, -0.5), step=0.02)
    _, rms = procrustes_align(X, tanh_surface_reference(A, B))
    assert rms < 1e-6
