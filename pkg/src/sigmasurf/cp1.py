"""CP^1 specialisation: the w-chart, the sine-Gordon phase and its standard form.

A CP^1 projector is written through an inhomogeneous coordinate ``w`` as

    P = 1/(1 + |w|^2) [[|w|^2, -conj(w)], [-w, 1]].

Two angles appear on a Chebyshev-gauged CP^1 surface and they are complex
conjugate to each other:

* the *surface angle* ``theta`` with ``exp(i theta) = -tr(d_L P P d_R P)``;
  the fundamental forms are ``I = dL^2 + 2 cos(theta) dL dR + dR^2`` and
  ``II = 4 sin(theta) dL dR`` for the unit normal ``-i(1 - 2P)``;
* the *sine-Gordon phase* ``phi = -theta`` with
  ``exp(i phi) = -d_L w / d_R w = -tr(d_R P P d_L P)``.

Both solve ``d_L d_R u = 4 sin u``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import jets
from .algebra import commutator, inner
from .projector import (
    FD,
    DerivativeBundle,
    ProjectorField,
    SingularPointError,
    _D1,
    derivatives,
)

log = logging.getLogger(__name__)

GAUGE_TOL = 1e-6


@dataclass(frozen=True)
class WField:
    """Inhomogeneous coordinate ``w(xi_L, xi_R)`` given as a complex jet closure."""

    jet: Callable
    name: str = "w"

    def __call__(self, xl, xr):
        return self.jet(xl, xr).v

    def partials(self, xl, xr):
        j = self.jet(xl, xr)
        return j.v, j.l, j.r


def projector_from_w(w) -> np.ndarray:
    """Rank-one projector for (array of) finite ``w``; uses the ``1/w`` chart for ``|w| > 1``."""
    w = np.asarray(w, dtype=complex)
    out = np.empty(w.shape + (2, 2), dtype=complex)
    small = np.abs(w) <= 1
    ws = w[small]
    d = 1.0 / (1.0 + np.abs(ws) ** 2)
    out[small] = np.stack(
        [np.stack([np.abs(ws) ** 2 * d, -np.conj(ws) * d], -1), np.stack([-ws * d, d], -1)], -2
    )
    z = 1.0 / w[~small]
    d = 1.0 / (1.0 + np.abs(z) ** 2)
    out[~small] = np.stack(
        [np.stack([d, -z * d], -1), np.stack([-np.conj(z) * d, np.abs(z) ** 2 * d], -1)], -2
    )
    return out


def projector_jet_from_w(w: jets.Jet) -> jets.Jet:
    ww = w * w.conj()
    d = 1 / (1 + ww)
    wbar = w.conj()
    return jets.matrix([[ww * d, -wbar * d], [-w * d, d]])


def field_from_w(wfield: WField, **kwargs) -> ProjectorField:
    """Projector field backed by a w-chart, with jet-based analytic derivatives."""

    def sample(xl, xr):
        return projector_from_w(wfield(xl, xr))

    def jet(xl, xr):
        return projector_jet_from_w(wfield.jet(xl, xr))

    kwargs.setdefault("name", wfield.name)
    return ProjectorField(n=2, sample=sample, jet=jet, wfield=wfield, **kwargs)


def w_from_projector(P):
    """Recover ``w = -P_21 / P_22`` (array or jet)."""
    if isinstance(P, jets.Jet):
        return -P[..., 1, 0] / P[..., 1, 1]
    P = np.asarray(P)
    return -P[..., 1, 0] / P[..., 1, 1]


def wjet_for(field: ProjectorField) -> Callable:
    """A w-jet closure for any analytic CP^1 field (the field's own chart if it has one)."""
    if field.wfield is not None:
        return field.wfield.jet
    if field.n != 2 or field.jet is None:
        raise ValueError("a CP^1 field with analytic derivatives is required")
    return lambda xl, xr: w_from_projector(field.jet(xl, xr))


def jl_jr(wfield: WField, xl, xr):
    """``J_L = |d_L w|^2 / (1 + |w|^2)^2`` and the same for R.

    The chart switch ``w -> 1/w`` leaves the expression invariant, so for
    ``|w| > 1`` it is evaluated in the ``1/w`` chart.
    """
    w, wl, wr = wfield.partials(xl, xr)
    big = np.abs(w) > 1
    z = np.where(big, 1.0 / np.where(big, w, 1.0), w)
    zl = np.where(big, -wl / np.where(big, w, 1.0) ** 2, wl)
    zr = np.where(big, -wr / np.where(big, w, 1.0) ** 2, wr)
    den = (1 + np.abs(z) ** 2) ** 2
    return np.abs(zl) ** 2 / den, np.abs(zr) ** 2 / den


# -- angles ---------------------------------------------------------------------


def lr_trace(b: DerivativeBundle) -> np.ndarray:
    """``tr(d_L P . P . d_R P)``."""
    return np.trace(b.L @ b.P @ b.R, axis1=-2, axis2=-1)


def surface_angle(field, xl=None, xr=None, check_gauge: bool = True) -> np.ndarray:
    """Wrapped angle ``theta`` in (-pi, pi] with ``exp(i theta) = -tr(d_L P P d_R P)``."""
    b = field if isinstance(field, DerivativeBundle) else derivatives(field, xl, xr)
    t = lr_trace(b)
    if check_gauge:
        _check_modulus(t)
    return np.angle(-t)


def _check_modulus(t):
    dev = np.max(np.abs(np.abs(t) - 1.0), initial=0.0)
    if dev > GAUGE_TOL:
        raise SingularPointError(
            f"|tr(d_L P P d_R P)| deviates from 1 by {dev:.3g}; field is not in Chebyshev gauge"
        )


def unit_normal(P) -> np.ndarray:
    """``n = -i (1 - 2P)``."""
    P = np.asarray(P)
    return -1j * (np.eye(P.shape[-1]) - 2 * P)


def mean_curvature_scalar(field, xl=None, xr=None, threshold: float = 1e-6) -> np.ndarray:
    """``H = 2i (1 + t^2) / (1 - t^2)`` with ``t = tr(d_L P P d_R P)``; equals ``-2 cot(theta)``.

    Returns the complex value; its imaginary part vanishes on Chebyshev-gauged
    solutions.  Raises where ``|sin theta| < threshold``.
    """
    b = field if isinstance(field, DerivativeBundle) else derivatives(field, xl, xr)
    t = lr_trace(b)
    if np.any(np.abs(np.sin(np.angle(-t))) < threshold):
        raise SingularPointError("sin(theta) ~ 0: mean curvature diverges")
    return 2j * (1 + t * t) / (1 - t * t)


def cp1_fundamental_forms(field, xl=None, xr=None):
    """First and second fundamental forms of a Chebyshev-gauged CP^1 surface.

    Returns ``(E, F, G), M`` where ``I = E dL^2 + 2F dL dR + G dR^2`` and
    ``II = 2M dL dR``; here ``E = G = 1``, ``F = cos(theta)``, ``2M = 4 sin(theta)``.
    Also returns the direct value ``2 (2 [d_L P, d_R P], n)`` used as a cross-check.
    """
    b = field if isinstance(field, DerivativeBundle) else derivatives(field, xl, xr)
    theta = surface_angle(b)
    one = np.ones_like(theta)
    ii = 4 * np.sin(theta)
    ii_direct = inner(2 * commutator(b.L, b.R), unit_normal(b.P))
    return (one, np.cos(theta), one), ii, ii_direct


# -- sine-Gordon phase on a grid ----------------------------------------------------


@dataclass
class PhaseField:
    """Unwrapped sine-Gordon phase on a rectangular (xi_L, xi_R) grid."""

    xl: np.ndarray  # (nL,)
    xr: np.ndarray  # (nR,)
    phi: np.ndarray  # (nL, nR)
    offsets: np.ndarray = dc_field(default=None)  # 2*pi multiples added per vertex

    @property
    def step(self):
        return self.xl[1] - self.xl[0], self.xr[1] - self.xr[0]


def _unwrap_grid(phi0):
    """Row-then-column unwrapping: first row along xi_R, then each column along xi_L."""
    out = np.array(phi0, dtype=float)
    out[0, :] = np.unwrap(out[0, :])
    out = np.unwrap(out, axis=0)
    return out


def sg_phase(field: ProjectorField, xl, xr, basepoint=None, cross_check: bool = True,
             check_gauge: bool = True) -> PhaseField:
    """Sine-Gordon phase ``phi`` with ``exp(i phi) = -tr(d_R P P d_L P)`` on the grid ``xl x xr``.

    The wrapped phase is unwrapped along the first grid row and then down each
    column, and shifted by a multiple of 2 pi so that ``phi(basepoint)`` lies in
    ``[0, 2 pi)`` (``basepoint`` is a grid index pair, default the first vertex).
    For fields with a w-chart the result is checked against ``-d_L w / d_R w``.
    ``check_gauge=False`` skips the ``|tr| = 1`` check (used for negative controls).
    """
    xl = np.asarray(xl, dtype=float)
    xr = np.asarray(xr, dtype=float)
    XL, XR = np.meshgrid(xl, xr, indexing="ij")
    b = derivatives(field, XL, XR)
    t = np.conj(lr_trace(b))
    if check_gauge:
        _check_modulus(t)
    phi0 = np.angle(-t)
    if cross_check and check_gauge and field.wfield is not None:
        w, wl, wr = field.wfield.partials(XL, XR)
        if np.any(wr == 0):
            raise SingularPointError("d_R w = 0 on the grid")
        ratio = -wl / wr
        dev = np.max(np.abs(np.exp(1j * phi0) - ratio))
        tol = 1e-8 if field.effective_mode != FD else 1e-4
        if dev > tol:
            raise AssertionError(f"trace and w routes to exp(i phi) disagree by {dev:.3g}")
    phi = _unwrap_grid(phi0)
    i0, j0 = (0, 0) if basepoint is None else basepoint
    phi -= 2 * np.pi * np.floor(phi[i0, j0] / (2 * np.pi))
    offsets = np.rint((phi - phi0) / (2 * np.pi)).astype(int)
    return PhaseField(xl=xl, xr=xr, phi=phi, offsets=offsets)


def phase_from_values(xl, xr, phi) -> PhaseField:
    return PhaseField(np.asarray(xl, float), np.asarray(xr, float), np.asarray(phi, float))


def mixed_derivative_grid(values, hl, hr, order: int = 4) -> np.ndarray:
    """Cross derivative ``d_L d_R`` of gridded data at interior vertices (tensor stencil)."""
    offs, w = _D1[order]
    reach = int(np.max(np.abs(offs)))
    nL, nR = values.shape
    out = np.zeros((nL - 2 * reach, nR - 2 * reach))
    for oa, wa in zip(offs, w):
        for ob, wb in zip(offs, w):
            out += wa * wb * values[reach + oa : nL - reach + oa, reach + ob : nR - reach + ob]
    return out / (hl * hr)


def sg_residual(phase: PhaseField, order: int = 4) -> np.ndarray:
    """``d_L d_R phi - 4 sin(phi)`` at interior grid vertices."""
    hl, hr = phase.step
    reach = 2 if order == 4 else 1
    inner_phi = phase.phi[reach:-reach, reach:-reach]
    return mixed_derivative_grid(phase.phi, hl, hr, order) - 4 * np.sin(inner_phi)


def sg_residual_at(field: ProjectorField, xl, xr, h: float = 5e-3, order: int = 4,
                   check_gauge: bool = True) -> np.ndarray:
    """``d_L d_R phi - 4 sin(phi)`` at scattered points from a local tensor stencil of step ``h``.

    The phase on each stencil is unwrapped relative to its centre, so no
    global unwrapping (and no grid) is needed.
    """
    offs, w = _D1[order]
    xl, xr = np.broadcast_arrays(np.asarray(xl, float), np.asarray(xr, float))
    oL, oR = np.meshgrid(offs * h, offs * h, indexing="ij")
    t = np.conj(lr_trace(derivatives(field, xl[..., None, None] + oL, xr[..., None, None] + oR)))
    tc = np.conj(lr_trace(derivatives(field, xl, xr)))
    if check_gauge:
        _check_modulus(t)
        _check_modulus(tc)
    phi_c = np.angle(-tc)
    rel = np.angle(t * np.conj(tc)[..., None, None])
    mixed = np.einsum("...ab,a,b->...", rel, w, w) / (h * h)
    return mixed - 4 * np.sin(phi_c)


# -- standard (laboratory) form ----------------------------------------------------


def lab_to_lightcone(X, T, V: float = 0.0):
    """Map boosted laboratory coordinates ``(X~, T~)`` back to ``(xi_L, xi_R)``."""
    _check_velocity(V)
    gamma = 1.0 / np.sqrt(1 - V * V)
    Xl = gamma * (np.asarray(X) + V * np.asarray(T))
    Tl = gamma * (np.asarray(T) + V * np.asarray(X))
    eta_l = 0.5 * (Xl - Tl)
    eta_r = 0.5 * (Xl + Tl)
    return 0.5 * eta_l, 0.5 * eta_r


def lightcone_to_lab(xl, xr, V: float = 0.0):
    """``eta = 2 xi``, ``X = eta_L + eta_R``, ``T = eta_R - eta_L``, then a boost by ``V``."""
    _check_velocity(V)
    eta_l, eta_r = 2 * np.asarray(xl), 2 * np.asarray(xr)
    X, T = eta_l + eta_r, eta_r - eta_l
    gamma = 1.0 / np.sqrt(1 - V * V)
    return gamma * (X - V * T), gamma * (T - V * X)


def _check_velocity(V):
    if not abs(V) < 1:
        raise ValueError(f"boost velocity |V| = {abs(V)} must be < 1")


@dataclass
class LabPhase:
    X: np.ndarray  # (nX,)
    T: np.ndarray  # (nT,)
    phi: np.ndarray  # (nX, nT), NaN outside the source grid
    V: float


def to_standard_form(source, V: float, X, T, method: str = "linear") -> LabPhase:
    """Phase on a rectangular boosted laboratory grid ``(X~, T~)``.

    ``source`` is a :class:`PhaseField`, resampled with
    :class:`scipy.interpolate.RegularGridInterpolator` (``method`` "linear" is
    bilinear, "cubic" is also accepted); points outside the light-cone grid
    are NaN.  ``source`` may instead be a CP^1 :class:`ProjectorField`, in
    which case the phase is evaluated at the boosted points directly and
    unwrapped on the laboratory grid (anchored in ``[0, 2 pi)`` at the first
    vertex).
    """
    X = np.asarray(X, dtype=float)
    T = np.asarray(T, dtype=float)
    XX, TT = np.meshgrid(X, T, indexing="ij")
    ql, qr = lab_to_lightcone(XX, TT, V)
    if isinstance(source, ProjectorField):
        t = np.conj(lr_trace(derivatives(source, ql, qr)))
        _check_modulus(t)
        phi = _unwrap_grid(np.angle(-t))
        phi -= 2 * np.pi * np.floor(phi[0, 0] / (2 * np.pi))
        return LabPhase(X=X, T=T, phi=phi, V=V)
    interp = RegularGridInterpolator(
        (source.xl, source.xr), source.phi, method=method, bounds_error=False, fill_value=np.nan
    )
    phi = interp(np.stack([ql, qr], axis=-1))
    return LabPhase(X=X, T=T, phi=phi, V=V)


def lab_residual(lab: LabPhase) -> np.ndarray:
    """``phi_TT - phi_XX + sin(phi)`` by second-order central differences (NaN-aware)."""
    hX, hT = lab.X[1] - lab.X[0], lab.T[1] - lab.T[0]
    p = lab.phi
    c = p[1:-1, 1:-1]
    ptt = (p[1:-1, 2:] - 2 * c + p[1:-1, :-2]) / hT**2
    pxx = (p[2:, 1:-1] - 2 * c + p[:-2, 1:-1]) / hX**2
    return ptt - pxx + np.sin(c)


def boost_factor(V: float) -> float:
    """The light-cone rescaling ``xi_L -> alpha xi_L``, ``xi_R -> xi_R / alpha`` of a boost."""
    _check_velocity(V)
    return float(np.sqrt((1 + V) / (1 - V)))


def velocity_from_factor(alpha: float) -> float:
    a2 = alpha * alpha
    return (a2 - 1) / (a2 + 1)
