"""Closed-form solutions of the CP^1 sigma model and helpers for building test fields.

Every family returns a :class:`~sigmasurf.projector.ProjectorField` whose
analytic derivatives come from jets.  Families that are not already in
Chebyshev gauge with their natural parameters (the elliptic solution, dressed
solitons) are rescaled by the measured constant factors at construction.
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import jets
from .cp1 import WField, field_from_w, jl_jr, projector_jet_from_w
from .elliptic import sn
from .projector import ProjectorField, derivatives

log = logging.getLogger(__name__)

_SIGMA3 = np.diag([1.0, -1.0]).astype(complex)


# -- parameters --------------------------------------------------------------------


@dataclass(frozen=True)
class Tanh:
    a: float = 0.25
    b: float = 0.25
    c: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        if self.a == 0 or self.b == 0:
            raise ValueError("tanh family needs a != 0 and b != 0")


@dataclass(frozen=True)
class ExpWell:
    p: float = -1.5
    chi0: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        if not self.p < -1:
            raise ValueError("exponential well needs p < -1")


@dataclass(frozen=True)
class Elliptic:
    K: float = -1.0 / 20
    xi0: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        if not -1.0 / 16 < self.K < 0:
            raise ValueError("elliptic family needs K in (-1/16, 0)")


@dataclass(frozen=True)
class Piette:
    lam: complex = 1.1 + 1.1j

    def __post_init__(self):
        lam = complex(self.lam)
        if abs(abs(lam) - 1) < 1e-12 or abs(lam.imag) < 1e-12:
            raise ValueError("Piette family needs |lambda| != 1 and Im(lambda) != 0")


@dataclass(frozen=True)
class Dressed:
    lam: complex = (1 + 1j) / np.sqrt(2)
    alpha: complex = -np.sqrt(2)
    beta: complex = 1 + 1j

    def __post_init__(self):
        lam = complex(self.lam)
        if abs(abs(lam) - 1) > 1e-12:
            raise ValueError("dressing needs |lambda| = 1")
        if abs(lam - 1) < 1e-12 or abs(lam + 1) < 1e-12:
            raise ValueError("dressing needs lambda != +-1")
        if abs(self.alpha) == 0 or abs(abs(self.alpha) - abs(self.beta)) > 1e-12 * abs(self.alpha):
            raise ValueError("dressing needs |alpha| = |beta| != 0")


FamilyParams = Union[Tanh, ExpWell, Elliptic, Piette, Dressed]


# -- helpers ------------------------------------------------------------------------


def rescale(field: ProjectorField, kl: float, kr: float, name: str | None = None) -> ProjectorField:
    """The field ``P~(xl, xr) = P(kl * xl, kr * xr)`` (a conformal reparametrisation)."""
    kl, kr = float(kl), float(kr)

    def sample(xl, xr):
        return field.sample(kl * np.asarray(xl), kr * np.asarray(xr))

    def scale_jet(j):
        return jets.Jet(j.v, kl * j.l, kr * j.r, kl * kl * j.ll, kl * kr * j.lr, kr * kr * j.rr)

    jet = None
    if field.jet is not None:
        jet = lambda xl, xr: scale_jet(field.jet(kl * np.asarray(xl), kr * np.asarray(xr)))

    wfield = None
    if field.wfield is not None:
        inner_w = field.wfield
        wfield = WField(lambda xl, xr: scale_jet(inner_w.jet(kl * np.asarray(xl), kr * np.asarray(xr))), inner_w.name)

    excluded = None
    if field.excluded is not None:
        excluded = lambda xl, xr: field.excluded(kl * np.asarray(xl), kr * np.asarray(xr))

    domain = None
    if field.domain is not None:
        l0, l1, r0, r1 = field.domain
        domain = tuple(sorted((l0 / kl, l1 / kl))) + tuple(sorted((r0 / kr, r1 / kr)))

    return dataclasses.replace(
        field, sample=sample, jet=jet, wfield=wfield, excluded=excluded, domain=domain,
        name=name or field.name,
    )


def _jl_jr_field(field: ProjectorField, xl, xr):
    b = derivatives(field.with_mode("analytic"), xl, xr)
    jl = 0.5 * np.real(np.trace(b.L @ b.L, axis1=-2, axis2=-1))
    jr = 0.5 * np.real(np.trace(b.R @ b.R, axis1=-2, axis2=-1))
    return jl, jr


def chebyshev_normalise(field: ProjectorField, probe=None, rtol: float = 1e-9) -> ProjectorField:
    """Rescale a field with constant ``J_L, J_R`` so that ``J_L = J_R = 1``.

    ``probe`` is a pair of coordinate arrays where ``J`` is measured; the
    constancy of ``J`` over the probe is required.
    """
    if probe is None:
        g = np.linspace(-1.0, 1.0, 5)
        probe = np.meshgrid(g, g, indexing="ij")
    jl, jr = _jl_jr_field(field, *probe)
    for j, side in ((jl, "L"), (jr, "R")):
        if np.ptp(j) > rtol * np.mean(np.abs(j)):
            raise ValueError(f"J_{side} is not constant on the probe set; cannot rescale")
    jl0, jr0 = float(np.mean(jl)), float(np.mean(jr))
    if abs(jl0 - 1) <= rtol and abs(jr0 - 1) <= rtol:
        return field
    log.info("%s: applying constant Chebyshev rescale (J_L=%.12g, J_R=%.12g)", field.name, jl0, jr0)
    return rescale(field, 1 / np.sqrt(jl0), 1 / np.sqrt(jr0))


# -- families -----------------------------------------------------------------------


def tanh_w(params: Tanh = Tanh()) -> WField:
    a, b, c, d = params.a, params.b, params.c, params.d

    def w(xl, xr):
        L, R = jets.variables(xl, xr)
        alpha = 0.25 * (L / a - R / b - c)
        beta = 0.5 * (L / a + R / b - d)
        return jets.tanh(alpha) * jets.expi(beta)

    return WField(w, "tanh")


def tanh_family(params: Tanh = Tanh()) -> ProjectorField:
    """``w = tanh(alpha) exp(i beta)``; the defaults ``a = b = 1/4`` give ``J_L = J_R = 1``."""
    return field_from_w(tanh_w(params), name="tanh")


def tanh_angles(xl, xr, params: Tanh = Tanh()):
    """The ``(alpha, beta)`` parametrisation of the tanh solution."""
    xl, xr = np.asarray(xl), np.asarray(xr)
    alpha = 0.25 * (xl / params.a - xr / params.b - params.c)
    beta = 0.5 * (xl / params.a + xr / params.b - params.d)
    return alpha, beta


def expwell_scales(p: float) -> tuple[float, float]:
    s = np.sqrt(-p)
    return (p - 2 * s - 1) / (4 * (p - 1)), (p + 2 * s - 1) / (4 * (p - 1))


def _expwell_parts(params: ExpWell, L, R):
    p, chi0 = params.p, params.chi0
    a, b = expwell_scales(p)
    s = np.sqrt(-p)
    chi = L / a - R / b
    g = (p + 1) * (chi - chi0) / (2 * (p - 1))
    # R^2 = ((p-1) cosh g + (p+1)) / ((p-1) cosh g - (p+1)), rewritten with sech g
    sech = jets.sech(g) if isinstance(g, jets.Jet) else jets.sech(jets.Jet.constant(g)).v
    c = (p + 1) / (p - 1)
    r2 = (1 + c * sech) / (1 - c * sech)
    return a, b, s, chi, g, r2


def expwell_family(params: ExpWell = ExpWell()) -> ProjectorField:
    """Exponential-well solution ``w = R(chi) exp(i (xi_L/a - f(chi)))``, ``chi = xi_L/a - xi_R/b``."""
    p, chi0, d = params.p, params.chi0, params.d

    def w(xl, xr):
        L, R = jets.variables(xl, xr)
        a, b, s, chi, g, r2 = _expwell_parts(params, L, R)
        f = (
            jets.arctan((p + 1) / (2 * s) * jets.tanh(g))
            + ((p + 2 * s - 1) * chi - 2 * s * chi0) / (2 * (p - 1))
            + d
        )
        return jets.sqrt(r2) * jets.expi(L / a - f)

    def excluded(xl, xr):
        r2 = _expwell_parts(params, np.asarray(xl, float), np.asarray(xr, float))[-1]
        return ~(np.isfinite(r2) & (r2 >= 0))

    return field_from_w(WField(w, "expwell"), excluded=excluded, name="expwell")


def elliptic_constants(K: float):
    """``p, q`` and the nominal scales ``a, b`` of the elliptic solution."""
    r = np.sqrt(1 + 16 * K)
    p = (1 + 8 * K - r) / (8 * K)
    q = (1 + 8 * K + r) / (8 * K)
    a, b = expwell_scales(p)
    return p, q, a, b


def elliptic_family(params: Elliptic = Elliptic(), normalise: bool = True) -> ProjectorField:
    """Jacobi-sn solution ``w = sqrt(-p) sn(sqrt(Kq)(xi0 - xi_L/a + xi_R/b) | p/q) exp(...)``.

    The nominal ``a, b`` do not give ``J_L = J_R = 1``; with ``normalise`` the
    measured constant rescale is applied.
    """
    p, q, a, b = elliptic_constants(params.K)
    m = p / q
    amp = np.sqrt(-p)
    kq = np.sqrt(params.K * q + 0j)
    if abs(kq.imag) < 1e-15:
        kq = kq.real

    def w(xl, xr):
        L, R = jets.variables(xl, xr)
        u = kq * (params.xi0 - L / a + R / b)
        return amp * sn(u, m) * jets.expi(0.5 * (L / a + R / b - params.d))

    field = field_from_w(WField(w, "elliptic"), name="elliptic")
    return chebyshev_normalise(field) if normalise else field


def _piette_jet(lam: complex):
    lam = complex(lam)
    lb = lam.conjugate()
    ll = abs(lam) ** 2
    re, im = lam.real, lam.imag

    def parts(xl, xr):
        L, R = jets.variables(xl, xr)
        sig = 2 * (L + R)
        tau = 2 * (L / (1 + lb) + R / (1 - lb))
        u = 2 * tau.real
        v = 2 * tau.imag
        lam2 = ll * (4 * jets.cos(u - sig) ** 2 / (1 - ll) ** 2 + jets.cosh(v) ** 2 / im**2)
        return sig, u, v, lam2

    def P(xl, xr):
        sig, u, v, lam2 = parts(xl, xr)
        g11 = jets.cos(sig) - (
            (re * jets.sin(sig) * jets.sinh(2 * v) + im * jets.cos(sig) * jets.cosh(2 * v)) / im
            + (jets.cos(2 * u - 3 * sig) - ll * jets.cos(2 * u - sig)) / (ll - 1)
        ) / lam2
        bracket = (
            (re * jets.cos(sig) * jets.sinh(2 * v) - im * jets.sin(sig) * jets.cosh(2 * v)) / im
            + (jets.sin(2 * u - 3 * sig) + ll * jets.sin(2 * u - sig)) / (ll - 1)
            + 2j * (
                re / im * jets.sin(u - sig) * jets.cosh(v)
                - (ll + 1) / (ll - 1) * jets.cos(u - sig) * jets.sinh(v)
            )
        )
        # prefactor 1/Lambda^2; with 1/lambda^2 the result is not a projector
        g12 = -jets.sin(sig) - bracket / lam2
        return jets.matrix([[0.5 * (1 - g11), -0.5 * g12], [-0.5 * g12.conj(), 0.5 * (1 + g11)]])

    return P, parts


def piette_family(params: Piette = Piette()) -> ProjectorField:
    """Piette's one-soliton family, already rescaled to ``J_L = J_R = 1``."""
    P, parts = _piette_jet(params.lam)

    def sample(xl, xr):
        return P(xl, xr).v.astype(complex)

    def excluded(xl, xr):
        lam2 = parts(xl, xr)[3].v
        return ~(np.isfinite(lam2) & (lam2 >= 1e-12))

    return ProjectorField(n=2, sample=sample, jet=P, excluded=excluded, name=f"piette({complex(params.lam)})")


def piette_comoving_velocity(lam: complex) -> float:
    """Boost velocity that makes the periodic factor ``u - sigma`` depend on ``X~`` only."""
    lb = complex(lam).conjugate()
    cl = 4 * (1 / (1 + lb)).real - 2
    cr = 4 * (1 / (1 - lb)).real - 2
    if cl * cr <= 0:
        cl = 4 * (1 / (1 + lb)).imag
        cr = 4 * (1 / (1 - lb)).imag
        ratio = -cl / cr
    else:
        ratio = cl / cr
    from .cp1 import velocity_from_factor

    return velocity_from_factor(np.sqrt(abs(ratio)))


def _rotation(t):
    return jets.matrix([[jets.cos(t), jets.sin(t)], [-jets.sin(t), jets.cos(t)]])


def vacuum_g(xl, xr) -> jets.Jet:
    L, R = jets.variables(xl, xr)
    return _rotation(0.5 * (L + R))


def vacuum() -> ProjectorField:
    """Vacuum ``P = (1 - g sigma_3) / 2`` with ``g`` the rotation by ``(xi_L + xi_R)/2``."""

    def P(xl, xr):
        g = vacuum_g(xl, xr)
        return 0.5 * (jets.Jet.constant(np.eye(2, dtype=complex)) - jets.matmul(g, _SIGMA3))

    return ProjectorField(n=2, sample=lambda xl, xr: P(xl, xr).v, jet=P, name="vacuum")


def dressing_psi(lam: complex, xl, xr) -> jets.Jet:
    """Wave function solving ``d_L psi = (d_L g g^-1) psi / (1 + lam)``, ``d_R psi = (d_R g g^-1) psi / (1 - lam)``.

    For the vacuum ``g`` it is the rotation by ``xi_L/(2(1+lam)) + xi_R/(2(1-lam))``.
    """
    lam = complex(lam)
    L, R = jets.variables(xl, xr)
    return _rotation(L / (2 * (1 + lam)) + R / (2 * (1 - lam)))


def dressed_g(params: Dressed, xl, xr) -> jets.Jet:
    """Dressed group element ``lam U g`` (``U`` normalised to unit determinant)."""
    lam = complex(params.lam)
    lb = lam.conjugate()
    psi = dressing_psi(lb, xl, xr)
    ab = np.array([params.alpha, params.beta], dtype=complex)
    M1 = psi[..., 0, 0] * ab[0] + psi[..., 0, 1] * ab[1]
    M2 = psi[..., 1, 0] * ab[0] + psi[..., 1, 1] * ab[1]
    norm = M1 * M1.conj() + M2 * M2.conj()
    if np.any(np.abs(norm.v) < 1e-300):
        raise ZeroDivisionError("M^dagger M is singular")
    R = jets.matrix([[M1 * M1.conj(), M1 * M2.conj()], [M2 * M1.conj(), M2 * M2.conj()]]) / norm[..., None, None]
    U = jets.Jet.constant(np.eye(2, dtype=complex)) + ((lb - lam) / lam) * R
    return lam * jets.matmul(U, vacuum_g(xl, xr))


def dress(params: Dressed = Dressed(), normalise: bool = True) -> ProjectorField:
    """One-soliton projector ``(1 - g~ sigma_3)/2`` dressed from the vacuum."""

    def P(xl, xr):
        g = dressed_g(params, xl, xr)
        return 0.5 * (jets.Jet.constant(np.eye(2, dtype=complex)) - jets.matmul(g, _SIGMA3))

    field = ProjectorField(n=2, sample=lambda xl, xr: P(xl, xr).v, jet=P, name="dressed")
    return chebyshev_normalise(field) if normalise else field


def control_field() -> ProjectorField:
    """Negative control: ``w = xi_L * xi_R`` does not solve the equation of motion."""

    def w(xl, xr):
        L, R = jets.variables(xl, xr)
        return (L * R) * (1 + 0j)

    return field_from_w(WField(w, "control"), name="control")


def embed_block(field: ProjectorField, N: int) -> ProjectorField:
    """``P -> diag(P, 0)`` in ``C^{N x N}``."""
    if N <= field.n:
        raise ValueError(f"target size {N} must exceed the field size {field.n}")
    n = field.n

    def pad(a):
        shape = a.shape[:-2] + (N, N)
        out = np.zeros(shape, dtype=complex)
        out[..., :n, :n] = a
        return out

    def sample(xl, xr):
        return pad(field.sample(xl, xr))

    jet = None
    if field.jet is not None:
        jet = lambda xl, xr: jets.Jet(*(pad(np.asarray(c)) for c in field.jet(xl, xr).components()))

    return dataclasses.replace(field, n=N, sample=sample, jet=jet, wfield=None, name=f"{field.name}[su({N})]")


def build(params) -> ProjectorField:
    """Field for a parameter object."""
    if isinstance(params, Tanh):
        return tanh_family(params)
    if isinstance(params, ExpWell):
        return expwell_family(params)
    if isinstance(params, Elliptic):
        return elliptic_family(params)
    if isinstance(params, Piette):
        return piette_family(params)
    if isinstance(params, Dressed):
        return dress(params)
    raise TypeError(f"unknown family parameters {params!r}")


__all__ = [
    "Tanh", "ExpWell", "Elliptic", "Piette", "Dressed", "FamilyParams",
    "tanh_family", "tanh_w", "tanh_angles", "expwell_family", "expwell_scales", "elliptic_family",
    "elliptic_constants", "piette_family", "piette_comoving_velocity", "vacuum", "vacuum_g",
    "dressing_psi", "dressed_g", "dress", "control_field", "embed_block", "rescale",
    "chebyshev_normalise", "build", "jl_jr", "projector_jet_from_w",
]
