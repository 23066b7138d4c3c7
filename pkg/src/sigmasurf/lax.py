"""Lax pairs for the CP^1 model and their zero-curvature residuals.

Two connections are provided: one built from the ``w`` chart with the spectral
parameter inside the off-diagonal entries, and one with the parameter as an
overall factor in front of the projector tangents ``M_D = [d_D P, P]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .algebra import commutator
from .cp1 import WField, wjet_for
from .projector import _D1, ProjectorField, derivatives, fro

SPECTRAL = "spectral"
OVERALL = "overall"

# fixed sample sets used by the verification suite
SPECTRAL_LAMBDAS = (2.0, 0.5, 1 + 1j, -3j)
OVERALL_LAMBDAS = (0.0, 2.0, 1 + 1j)


@dataclass(frozen=True)
class LaxPairSample:
    U: np.ndarray
    V: np.ndarray
    lam: complex
    kind: str


def _spectral_matrices(w, wl, wr, lam):
    wb, wlb, wrb = np.conj(w), np.conj(wl), np.conj(wr)
    d = 1.0 / (1.0 + w * wb)

    def block(a11, a12, a21):
        return np.stack([np.stack([a11, a12], -1), np.stack([a21, -a11], -1)], -2) * d[..., None, None]

    U = block(0.5 * (w * wlb - wb * wl), -lam * wlb, wl)
    V = block(0.5 * (w * wrb - wb * wr), -wrb, wr / lam)
    return U, V


def _as_wjet(source):
    if isinstance(source, WField):
        return source.jet
    if isinstance(source, ProjectorField):
        return wjet_for(source)
    return source


def lax_spectral(wfield, xl, xr, lam: complex) -> LaxPairSample:
    """Spectral-entry pair ``(U_lam, V_lam)`` at points; ``lam = 1`` is the frame connection."""
    lam = complex(lam)
    if lam == 0:
        raise ValueError("spectral parameter must be nonzero")
    j = _as_wjet(wfield)(np.asarray(xl, float), np.asarray(xr, float))
    w, wl, wr = (np.asarray(c, dtype=complex) for c in (j.v, j.l, j.r))
    if not np.all(np.isfinite(w)):
        raise ValueError("w is not finite at the requested point(s)")
    U, V = _spectral_matrices(w, wl, wr, lam)
    return LaxPairSample(U, V, lam, SPECTRAL)


def lax_overall(field: ProjectorField, xl, xr, lam: complex) -> LaxPairSample:
    """Overall-factor pair ``(2/(1+lam) M_L, 2/(1-lam) M_R)`` with ``M_D = [d_D P, P]``."""
    lam = complex(lam)
    if lam in (1, -1):
        raise ValueError("spectral parameter must differ from +-1")
    b = derivatives(field, np.asarray(xl, float), np.asarray(xr, float))
    ML = commutator(b.L, b.P)
    MR = commutator(b.R, b.P)
    return LaxPairSample(2 / (1 + lam) * ML, 2 / (1 - lam) * MR, lam, OVERALL)


def _pair(kind, source, xl, xr, lam):
    if kind == SPECTRAL:
        return lax_spectral(source, xl, xr, lam)
    if kind == OVERALL:
        return lax_overall(source, xl, xr, lam)
    raise ValueError(f"unknown pair kind {kind!r}")


def _exact_derivatives(kind, source, xl, xr, lam):
    """``(d_R U, d_L V)`` from second-order jets (first-order propagation through the pair)."""
    if kind == OVERALL:
        lam = complex(lam)
        b = derivatives(source, xl, xr)
        dR_ML = commutator(b.LR, b.P) + commutator(b.L, b.R)
        dL_MR = commutator(b.LR, b.P) + commutator(b.R, b.L)
        return 2 / (1 + lam) * dR_ML, 2 / (1 - lam) * dL_MR
    j = _as_wjet(source)(xl, xr)
    z = np.zeros_like(j.v)
    # first-order jets of w, d_L w, d_R w; second-order slots are unused
    W = jets.Jet(j.v, j.l, j.r, z, z, z)
    WL = jets.Jet(j.l, j.ll, j.lr, z, z, z)
    WR = jets.Jet(j.r, j.lr, j.rr, z, z, z)
    d = 1 / (1 + W * W.conj())
    a = 0.5 * (W * WL.conj() - W.conj() * WL) * d
    U = [[a, -lam * WL.conj() * d], [WL * d, -a]]
    a = 0.5 * (W * WR.conj() - W.conj() * WR) * d
    V = [[a, -WR.conj() * d], [WR * d / lam, -a]]
    dR_U = np.stack([np.stack([e.r for e in row], -1) for row in U], -2)
    dL_V = np.stack([np.stack([e.l for e in row], -1) for row in V], -2)
    return dR_U, dL_V


def zero_curvature_matrix(kind: str, source, xl, xr, lam: complex, h: float = 1e-3, order: int = 4,
                          method: str = "fd") -> np.ndarray:
    """``d_R U - d_L V + [U, V]``.

    Outer derivatives are central differences (``method="fd"``) or exact
    through the field's jets (``method="analytic"``).  The w-chart pair is
    poorly conditioned for FD near poles of ``w``.
    """
    if method == "analytic":
        xl, xr = np.broadcast_arrays(np.asarray(xl, float), np.asarray(xr, float))
        p = _pair(kind, source, xl, xr, lam)
        dR_U, dL_V = _exact_derivatives(kind, source, xl, xr, p.lam)
        return dR_U - dL_V + commutator(p.U, p.V)
    if method != "fd":
        raise ValueError("method must be 'fd' or 'analytic'")
    offs, w = _D1[order]
    xl, xr = np.broadcast_arrays(np.asarray(xl, float), np.asarray(xr, float))
    dR_U = sum(wi * _pair(kind, source, xl, xr + o * h, lam).U for o, wi in zip(offs, w)) / h
    dL_V = sum(wi * _pair(kind, source, xl + o * h, xr, lam).V for o, wi in zip(offs, w)) / h
    p = _pair(kind, source, xl, xr, lam)
    return dR_U - dL_V + commutator(p.U, p.V)


def zero_curvature_residual(kind: str, source, xl, xr, lam: complex, h: float = 1e-3, order: int = 4,
                            method: str = "fd") -> np.ndarray:
    """Frobenius norm of the zero-curvature expression."""
    return fro(zero_curvature_matrix(kind, source, xl, xr, lam, h, order, method))


def eom_defect(wfield, xl, xr) -> np.ndarray:
    """``d_L d_R w (1 + |w|^2) - 2 conj(w) d_L w d_R w`` (vanishes on solutions)."""
    j = _as_wjet(wfield)(np.asarray(xl, float), np.asarray(xr, float))
    return j.lr * (1 + np.abs(j.v) ** 2) - 2 * np.conj(j.v) * j.l * j.r


def defect_entry(wfield, xl, xr, lam: complex, **kwargs) -> np.ndarray:
    """Lower-left entry of the spectral zero-curvature matrix.

    Equals ``(lam - 1) / lam * eom_defect / (1 + |w|^2)^2``.
    """
    return zero_curvature_matrix(SPECTRAL, wfield, xl, xr, lam, **kwargs)[..., 1, 0]


def predicted_defect_entry(wfield, xl, xr, lam: complex) -> np.ndarray:
    j = _as_wjet(wfield)(np.asarray(xl, float), np.asarray(xr, float))
    return (lam - 1) / lam * eom_defect(wfield, xl, xr) / (1 + np.abs(j.v) ** 2) ** 2
