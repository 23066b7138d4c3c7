"""su(N) as the Euclidean space R^(N^2 - 1).

The scalar product is ``(A, B) = -1/2 tr(A B)``.  The standard basis is
ordered A-block, B-block, C-block, each in lexicographic order, so exported
coordinates are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TOL = 1e-12


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def commutator(a, b):
    return a @ b - b @ a


def inner(a, b):
    """``-1/2 tr(a b)`` (real part), vectorised over leading axes."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[-2:] != b.shape[-2:]:
        raise ValueError(f"dimension mismatch: {a.shape[-2:]} vs {b.shape[-2:]}")
    return -0.5 * np.real(np.einsum("...ij,...ji->...", a, b))


def is_algebra_element(a, tol=TOL) -> bool:
    a = np.asarray(a)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    return bool(
        np.all(np.abs(a + dagger(a)) <= tol * scale)
        and np.all(np.abs(np.trace(a, axis1=-2, axis2=-1)) <= tol * scale)
    )


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """An anti-Hermitian traceless matrix, validated at construction."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 2:
            raise ValueError("entries must be a square matrix of size >= 2")
        if not is_algebra_element(entries):
            raise ValueError("matrix is not anti-Hermitian and traceless")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def project_to_algebra(a):
    """Closest anti-Hermitian traceless matrix (explicit repair, never implicit)."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[-1]
    ah = 0.5 * (a - dagger(a))
    tr = np.trace(ah, axis1=-2, axis2=-1)
    return ah - tr[..., None, None] / n * np.eye(n)


@dataclass(frozen=True, eq=False)
class BasisSet:
    n: int
    elements: np.ndarray  # (n*n - 1, n, n)
    labels: tuple

    def __len__(self):
        return len(self.labels)


@lru_cache(maxsize=None)
def _standard_basis(n: int) -> BasisSet:
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    elems, labels = [], []
    for j, k in pairs:
        a = np.zeros((n, n), dtype=complex)
        a[j, k] = a[k, j] = 1j
        elems.append(a)
        labels.append(("A", j + 1, k + 1))
    for j, k in pairs:
        b = np.zeros((n, n), dtype=complex)
        b[j, k], b[k, j] = 1.0, -1.0
        elems.append(b)
        labels.append(("B", j + 1, k + 1))
    for p in range(1, n):
        c = np.zeros((n, n), dtype=complex)
        c[np.arange(p), np.arange(p)] = 1.0
        c[p, p] = -p
        elems.append(1j * np.sqrt(2.0 / (p * (p + 1))) * c)
        labels.append(("C", p))
    arr = np.array(elems)
    arr.setflags(write=False)
    return BasisSet(n=n, elements=arr, labels=tuple(labels))


def standard_basis(n: int) -> BasisSet:
    """Orthonormal basis ``A_jk, B_jk (j < k), C_p`` of su(n)."""
    if int(n) != n or n < 2:
        raise ValueError("n must be an integer >= 2")
    return _standard_basis(int(n))


def gram(elements) -> np.ndarray:
    e = np.asarray(elements)
    return inner(e[:, None], e[None, :])


def coords(a, basis: BasisSet) -> np.ndarray:
    """Coordinates of ``a`` (shape ``(..., n, n)``) in ``basis``; shape ``(..., n^2 - 1)``."""
    a = np.asarray(a)
    if a.shape[-2:] != (basis.n, basis.n):
        raise ValueError(f"matrix size {a.shape[-2:]} does not match basis dimension {basis.n}")
    return inner(a[..., None, :, :], basis.elements)


def from_coords(v, basis: BasisSet) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != len(basis):
        raise ValueError(f"expected {len(basis)} coordinates, got {v.shape[-1]}")
    return np.einsum("...i,ijk->...jk", v, basis.elements)


def random_special_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return q / np.linalg.det(q) ** (1.0 / n)


def random_algebra_element(n: int, rng: np.random.Generator) -> np.ndarray:
    return from_coords(rng.standard_normal(n * n - 1), standard_basis(n))
