"""Integration of the closed 1-form ``X_L dxi_L + X_R dxi_R`` into the immersion ``X``.

Paths are rectilinear: first along ``xi_L`` at the base ``xi_R``, then along
``xi_R``.  Each segment is integrated with composite Simpson on a uniform
subdivision, so the output is deterministic for a given grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import coords, standard_basis
from .projector import _D1, ProjectorField, fro, tangents

PANELS_PER_EDGE = 4


def _simpson_weights(m: int) -> np.ndarray:
    """Composite Simpson weights for ``m`` (even) panels of unit width."""
    if m % 2:
        raise ValueError("Simpson needs an even number of panels")
    w = np.ones(m + 1)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return w / 3


def _tangent_coords(field: ProjectorField, xl, xr):
    """Basis coordinates of ``X_L`` and ``X_R``; trailing axis of length N^2 - 1."""
    field.check_points(xl, xr)
    XL, XR = tangents(field, np.asarray(xl, float), np.asarray(xr, float))
    basis = standard_basis(field.n)
    return coords(XL, basis), coords(XR, basis)


def _segment_integrals(field, start, end, fixed, direction, panels):
    """Integrals of the relevant tangent along straight segments.

    ``start``, ``end``, ``fixed`` are arrays of equal shape; the moving
    coordinate goes from ``start`` to ``end`` with the other held at ``fixed``.
    """
    start, end, fixed = np.broadcast_arrays(*(np.asarray(a, float) for a in (start, end, fixed)))
    t = np.linspace(0.0, 1.0, panels + 1)
    pts = start[..., None] + (end - start)[..., None] * t
    other = np.broadcast_to(fixed[..., None], pts.shape)
    if direction == "L":
        vals = _tangent_coords(field, pts, other)[0]
    else:
        vals = _tangent_coords(field, other, pts)[1]
    w = _simpson_weights(panels) / panels
    return np.einsum("...kc,k->...c", vals, w) * (end - start)[..., None]


@dataclass
class SurfaceMesh:
    xl: np.ndarray  # (nL,)
    xr: np.ndarray  # (nR,)
    X: np.ndarray  # (nL, nR, N^2 - 1)
    basepoint: tuple
    base_value: np.ndarray
    K: np.ndarray | None = None
    phi: np.ndarray | None = None

    @property
    def shape(self):
        return self.X.shape[:2]

    def vertices(self) -> np.ndarray:
        return self.X.reshape(-1, self.X.shape[-1])

    def first_form(self):
        """Discrete ``(E, F, G)`` from forward differences, at cell corners ``[:-1, :-1]``."""
        dL = np.diff(self.X, axis=0)[:, :-1] / np.diff(self.xl)[:, None, None]
        dR = np.diff(self.X, axis=1)[:-1] / np.diff(self.xr)[None, :, None]
        return (dL * dL).sum(-1), (dL * dR).sum(-1), (dR * dR).sum(-1)


def _grid_index(grid, value, name):
    idx = np.flatnonzero(np.isclose(grid, value, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(grid)))))
    if idx.size == 0:
        raise ValueError(f"basepoint {name}={value} is not a grid node")
    return int(idx[0])


def integrate_surface(field: ProjectorField, xl, xr, basepoint, base_value=None,
                      panels: int = PANELS_PER_EDGE) -> SurfaceMesh:
    """Immersion on the tensor grid ``xl x xr`` (both increasing), path L-then-R from ``basepoint``."""
    xl, xr = np.asarray(xl, float), np.asarray(xr, float)
    if np.any(np.diff(xl) <= 0) or np.any(np.diff(xr) <= 0):
        raise ValueError("grid coordinates must be strictly increasing")
    i0, j0 = _grid_index(xl, basepoint[0], "xi_L"), _grid_index(xr, basepoint[1], "xi_R")
    dim = field.n**2 - 1
    base = np.zeros(dim) if base_value is None else np.asarray(base_value, float)
    if base.shape != (dim,):
        raise ValueError(f"base_value must have length {dim}")

    # first leg: along xi_L at xi_R = xr[j0]
    edges = _segment_integrals(field, xl[:-1], xl[1:], np.full(len(xl) - 1, xr[j0]), "L", panels)
    cum = np.concatenate([np.zeros((1, dim)), np.cumsum(edges, axis=0)])
    row = base + cum - cum[i0]

    # second leg: along xi_R for every xi_L
    L = np.broadcast_to(xl[:, None], (len(xl), len(xr) - 1))
    edges = _segment_integrals(field, np.broadcast_to(xr[:-1], L.shape), np.broadcast_to(xr[1:], L.shape), L, "R", panels)
    cum = np.concatenate([np.zeros((len(xl), 1, dim)), np.cumsum(edges, axis=1)], axis=1)
    X = row[:, None, :] + cum - cum[:, j0 : j0 + 1]
    return SurfaceMesh(xl, xr, X, (float(xl[i0]), float(xr[j0])), base)


def integrate_to_points(field: ProjectorField, xl, xr, basepoint, base_value=None, step: float = 0.05,
                        order: str = "LR") -> np.ndarray:
    """Immersion at scattered points along rectilinear paths from ``basepoint``.

    ``order`` is ``"LR"`` (move in ``xi_L`` first) or ``"RL"``.  Every segment
    uses the same number of Simpson panels, chosen so that no panel is longer
    than ``step``.
    """
    xl, xr = np.broadcast_arrays(np.asarray(xl, float), np.asarray(xr, float))
    l0, r0 = float(basepoint[0]), float(basepoint[1])
    dim = field.n**2 - 1
    base = np.zeros(dim) if base_value is None else np.asarray(base_value, float)
    longest = max(np.max(np.abs(xl - l0), initial=0.0), np.max(np.abs(xr - r0), initial=0.0))
    panels = max(2, 2 * int(np.ceil(longest / step / 2)))
    if order == "LR":
        first = _segment_integrals(field, np.full(xl.shape, l0), xl, np.full(xl.shape, r0), "L", panels)
        second = _segment_integrals(field, np.full(xr.shape, r0), xr, xl, "R", panels)
    elif order == "RL":
        first = _segment_integrals(field, np.full(xr.shape, r0), xr, np.full(xr.shape, l0), "R", panels)
        second = _segment_integrals(field, np.full(xl.shape, l0), xl, xr, "L", panels)
    else:
        raise ValueError("order must be 'LR' or 'RL'")
    return base + first + second


def path_independence(field: ProjectorField, point, basepoint, step: float = 0.01) -> float:
    """Max-norm difference between the L-then-R and R-then-L immersions at ``point``."""
    a = integrate_to_points(field, point[0], point[1], basepoint, step=step, order="LR")
    b = integrate_to_points(field, point[0], point[1], basepoint, step=step, order="RL")
    return float(np.max(np.abs(a - b)))


def closedness_residual(field: ProjectorField, xl, xr, h: float = 1e-3, order: int = 4) -> np.ndarray:
    """``||d_L X_R - d_R X_L||`` by central differences of the tangent fields."""
    offs, w = _D1[order]
    xl, xr = np.asarray(xl, float), np.asarray(xr, float)
    dL_XR = 0
    dR_XL = 0
    for o, wi in zip(offs, w):
        dL_XR = dL_XR + wi * tangents(field, xl + o * h, xr)[1]
        dR_XL = dR_XL + wi * tangents(field, xl, xr + o * h)[0]
    return fro((dL_XR - dR_XL) / h)


def pca3(X: np.ndarray):
    """Project points onto their top three principal axes (visualisation only, not isometric).

    Returns the projected points and the fraction of variance retained.
    """
    pts = X.reshape(-1, X.shape[-1])
    centred = pts - pts.mean(axis=0)
    _, s, vt = np.linalg.svd(centred, full_matrices=False)
    axes = vt[:3]
    # deterministic sign: largest-modulus component of each axis positive
    signs = np.sign(axes[np.arange(len(axes)), np.argmax(np.abs(axes), axis=1)])
    axes = axes * signs[:, None]
    proj = centred @ axes.T
    var = s**2
    return proj.reshape(*X.shape[:-1], len(axes)), float(var[:3].sum() / var.sum()) if var.sum() else 1.0


def procrustes_align(A: np.ndarray, B: np.ndarray):
    """Rigid motion (rotation or reflection, plus translation) taking ``A`` closest to ``B``.

    Returns the aligned copy of ``A`` and the RMS distance to ``B``.
    """
    A = A.reshape(-1, A.shape[-1])
    B = B.reshape(-1, B.shape[-1])
    ca, cb = A.mean(axis=0), B.mean(axis=0)
    u, _, vt = np.linalg.svd((A - ca).T @ (B - cb))
    Q = u @ vt
    aligned = (A - ca) @ Q + cb
    return aligned, float(np.sqrt(np.mean(np.sum((aligned - B) ** 2, axis=1))))


def tanh_surface_reference(alpha, beta) -> np.ndarray:
    """Closed-form pseudosphere for the normalised tanh solution, in ``(alpha, beta)``."""
    alpha, beta = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta, float))
    c = np.cosh(2 * alpha)
    return np.stack(
        [
            -np.cos(beta) / (2 * c) + 1 / (2 * np.cosh(2.0)),
            -np.sin(beta) / (2 * c),
            (np.tanh(2 * alpha) - np.tanh(2.0)) / 2 + 1 - alpha,
        ],
        axis=-1,
    )
