import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmasurf.algebra import (
    AlgebraElement,
    coords,
    from_coords,
    gram,
    inner,
    is_algebra_element,
    project_to_algebra,
    random_algebra_element,
    random_special_unitary,
    standard_basis,
)


def test_inner_of_c1_with_itself():
    c1 = 1j * np.diag([1.0, -1.0])
    assert inner(c1, c1) == pytest.approx(1.0)


def test_inner_dimension_mismatch():
    with pytest.raises(ValueError):
        inner(np.zeros((2, 2)), np.zeros((3, 3)))


def test_inner_with_zero(rng):
    x = random_algebra_element(3, rng)
    assert inner(np.zeros((3, 3)), x) == 0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_standard_basis_is_orthonormal(n):
    b = standard_basis(n)
    assert len(b) == n * n - 1
    np.testing.assert_allclose(gram(b.elements), np.eye(n * n - 1), atol=1e-14)
    assert all(is_algebra_element(e) for e in b.elements)


def test_su2_basis_explicit():
    b = standard_basis(2)
    assert b.labels == (("A", 1, 2), ("B", 1, 2), ("C", 1))
    np.testing.assert_array_equal(b.elements[0], [[0, 1j], [1j, 0]])
    np.testing.assert_array_equal(b.elements[1], [[0, 1], [-1, 0]])
    np.testing.assert_allclose(b.elements[2], 1j * np.diag([1, -1]))


def test_su3_label_order():
    labels = standard_basis(3).labels
    assert labels[:3] == (("A", 1, 2), ("A", 1, 3), ("A", 2, 3))
    assert labels[-2:] == (("C", 1), ("C", 2))


def test_standard_basis_rejects_small_n():
    with pytest.raises(ValueError):
        standard_basis(1)


@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_coords_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    b = standard_basis(n)
    a = random_algebra_element(n, rng)
    np.testing.assert_allclose(from_coords(coords(a, b), b), a, atol=1e-12)


@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_inner_symmetric_and_positive(n, seed):
    rng = np.random.default_rng(seed)
    a, c = random_algebra_element(n, rng), random_algebra_element(n, rng)
    assert inner(a, c) == pytest.approx(inner(c, a), abs=1e-12)
    assert inner(a, a) > 0
    # the inner product is the Euclidean one in basis coordinates
    b = standard_basis(n)
    assert inner(a, c) == pytest.approx(coords(a, b) @ coords(c, b), abs=1e-10)


def test_adjoint_action_is_orthogonal(rng):
    U = random_special_unitary(3, rng)
    b = standard_basis(3)
    a = random_algebra_element(3, rng)
    va = coords(a, b)
    vb = coords(U @ a @ U.conj().T, b)
    assert np.linalg.norm(vb) == pytest.approx(np.linalg.norm(va), rel=1e-12)
    assert np.linalg.det(U) == pytest.approx(1.0)


def test_algebra_element_validation():
    e = AlgebraElement(1j * np.diag([1.0, -1.0]))
    assert e.n == 2
    with pytest.raises(ValueError):
        AlgebraElement(np.eye(2))
    with pytest.raises(ValueError):
        AlgebraElement(1j * np.eye(2))  # not traceless


def test_project_to_algebra_is_idempotent(rng):
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    p = project_to_algebra(m)
    assert is_algebra_element(p)
    np.testing.assert_allclose(project_to_algebra(p), p, atol=1e-15)
