"""Projector-valued fields, their derivatives and the sigma-model residuals.

All evaluation functions are vectorised: ``xl`` and ``xr`` may be scalars or
arrays of a common shape ``S`` and matrix results have shape ``S + (n, n)``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import jets
from .algebra import commutator

ANALYTIC = "analytic"
FD = "fd"

# first-derivative stencils: offsets and weights (divide by h)
_D1 = {
    2: (np.array([-1, 1]), np.array([-0.5, 0.5])),
    4: (np.array([-2, -1, 1, 2]), np.array([1, -8, 8, -1]) / 12.0),
}
# second-derivative stencils (divide by h**2)
_D2 = {
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0])),
    4: (np.array([-2, -1, 0, 1, 2]), np.array([-1, 16, -30, 16, -1]) / 12.0),
}


class SingularPointError(ValueError):
    """Raised when an operation is requested at an excluded or degenerate point."""


class DomainError(ValueError):
    """Raised when a point or stencil leaves the field's domain."""


@dataclass(frozen=True)
class DerivativeBundle:
    """``P`` and its first and second partial derivatives at a set of points."""

    P: np.ndarray
    L: np.ndarray
    R: np.ndarray
    LL: np.ndarray
    LR: np.ndarray
    RR: np.ndarray

    @classmethod
    def from_jet(cls, jet: jets.Jet) -> "DerivativeBundle":
        shape = jet.shape
        parts = [np.broadcast_to(c, shape).astype(complex) for c in jet.components()]
        return cls(*parts)

    def __getitem__(self, idx) -> "DerivativeBundle":
        return DerivativeBundle(*(getattr(self, f.name)[idx] for f in dataclasses.fields(self)))

    def first(self, d: str) -> np.ndarray:
        return {"L": self.L, "R": self.R}[d]

    def get(self, index: str) -> np.ndarray:
        """Derivative by multi-index, e.g. ``"L"``, ``"RR"``, ``"LR"`` (order-insensitive)."""
        key = "".join(sorted(index.upper()))
        table = {"L": self.L, "R": self.R, "LL": self.LL, "LR": self.LR, "RR": self.RR}
        if key not in table:
            raise ValueError(f"unsupported derivative multi-index {index!r}")
        return table[key]


@dataclass(frozen=True)
class ProjectorField:
    """A map ``(xi_L, xi_R) -> P`` onto Hermitian projectors in ``C^{n x n}``.

    ``sample`` evaluates ``P`` (vectorised).  ``jet``, when given, evaluates ``P``
    as a :class:`~sigmasurf.jets.Jet` and backs the analytic derivative mode.
    ``excluded`` flags points where the field is undefined.  ``wfield`` is set
    for CP^1 fields built from an inhomogeneous coordinate ``w``.
    """

    n: int
    sample: Callable
    jet: Optional[Callable] = None
    mode: str = ANALYTIC
    fd_step: float = 1e-4
    fd_order: int = 4
    domain: Optional[tuple] = None  # (l_min, l_max, r_min, r_max)
    excluded: Optional[Callable] = None
    wfield: Optional[object] = None
    name: str = "field"

    def __post_init__(self):
        if self.mode not in (ANALYTIC, FD):
            raise ValueError(f"unknown derivative mode {self.mode!r}")
        if self.fd_order not in (2, 4):
            raise ValueError("fd_order must be 2 or 4")
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")

    def with_mode(self, mode: str, fd_step: float | None = None, fd_order: int | None = None):
        return dataclasses.replace(
            self,
            mode=mode,
            fd_step=self.fd_step if fd_step is None else fd_step,
            fd_order=self.fd_order if fd_order is None else fd_order,
        )

    @property
    def effective_mode(self) -> str:
        return self.mode if self.jet is not None else FD

    def __call__(self, xl, xr) -> np.ndarray:
        xl, xr = np.broadcast_arrays(np.asarray(xl, dtype=float), np.asarray(xr, dtype=float))
        self.check_points(xl, xr)
        return self.sample(xl, xr)

    def in_domain(self, xl, xr) -> np.ndarray:
        xl, xr = np.broadcast_arrays(np.asarray(xl, dtype=float), np.asarray(xr, dtype=float))
        ok = np.isfinite(xl) & np.isfinite(xr)
        if self.domain is not None:
            l0, l1, r0, r1 = self.domain
            ok &= (xl >= l0) & (xl <= l1) & (xr >= r0) & (xr <= r1)
        if self.excluded is not None:
            ok &= ~np.asarray(self.excluded(xl, xr), dtype=bool)
        return ok

    def check_points(self, xl, xr):
        ok = self.in_domain(xl, xr)
        if not np.all(ok):
            bad = np.argwhere(~np.atleast_1d(ok))
            raise DomainError(f"{self.name}: {len(bad)} point(s) outside the domain or excluded")


def constant_field(P, name="constant") -> ProjectorField:
    """A constant projector; every derivative vanishes."""
    P = np.asarray(P, dtype=complex)
    n = P.shape[-1]

    def sample(xl, xr):
        shape = np.broadcast(np.asarray(xl), np.asarray(xr)).shape
        return np.broadcast_to(P, shape + (n, n)).copy()

    def jet(xl, xr):
        return jets.Jet.constant(sample(xl, xr))

    return ProjectorField(n=n, sample=sample, jet=jet, name=name)


def _shifted(field, xl, xr, dl, dr, h):
    return field.sample(xl + dl * h, xr + dr * h)


def _fd_bundle(field: ProjectorField, xl, xr) -> DerivativeBundle:
    h, order = field.fd_step, field.fd_order
    reach = 2 if order == 4 else 1
    for dl in (-reach, reach):
        for dr in (-reach, reach):
            if not np.all(field.in_domain(xl + dl * h, xr + dr * h)):
                raise DomainError(f"{field.name}: finite-difference stencil leaves the domain")
    offs1, w1 = _D1[order]
    offs2, w2 = _D2[order]
    P = field.sample(xl, xr)
    dL = sum(w * _shifted(field, xl, xr, o, 0, h) for o, w in zip(offs1, w1)) / h
    dR = sum(w * _shifted(field, xl, xr, 0, o, h) for o, w in zip(offs1, w1)) / h
    dLL = sum(w * (P if o == 0 else _shifted(field, xl, xr, o, 0, h)) for o, w in zip(offs2, w2)) / h**2
    dRR = sum(w * (P if o == 0 else _shifted(field, xl, xr, 0, o, h)) for o, w in zip(offs2, w2)) / h**2
    dLR = sum(
        wa * wb * _shifted(field, xl, xr, oa, ob, h)
        for oa, wa in zip(offs1, w1)
        for ob, wb in zip(offs1, w1)
    ) / h**2
    return DerivativeBundle(P, dL, dR, dLL, dLR, dRR)


def derivatives(field: ProjectorField, xl, xr) -> DerivativeBundle:
    """``P`` and its partial derivatives up to second order at ``(xl, xr)``.

    Uses the family's jet closure in analytic mode and central stencils of the
    configured order otherwise.  Raises :class:`DomainError` if a point (or a
    stencil point in FD mode) lies outside the domain.
    """
    xl, xr = np.broadcast_arrays(np.asarray(xl, dtype=float), np.asarray(xr, dtype=float))
    field.check_points(xl, xr)
    if field.effective_mode == ANALYTIC:
        return DerivativeBundle.from_jet(field.jet(xl, xr))
    return _fd_bundle(field, xl, xr)


def _bundle(field_or_bundle, xl=None, xr=None) -> DerivativeBundle:
    if isinstance(field_or_bundle, DerivativeBundle):
        return field_or_bundle
    return derivatives(field_or_bundle, xl, xr)


def fro(a) -> np.ndarray:
    """Frobenius norm over the trailing two axes."""
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))


def projector_residuals(P) -> tuple[np.ndarray, np.ndarray]:
    """``(||P^2 - P||, ||P - P^dagger||)`` per point."""
    P = np.asarray(P)
    return fro(P @ P - P), fro(P - np.conj(np.swapaxes(P, -1, -2)))


def el_residual(field, xl=None, xr=None) -> np.ndarray:
    """Frobenius norm of ``[d_L d_R P, P]``; zero on solutions of the sigma model."""
    b = _bundle(field, xl, xr)
    return fro(commutator(b.LR, b.P))


def tangents(field, xl=None, xr=None) -> tuple[np.ndarray, np.ndarray]:
    """Tangent matrices ``X_L = [d_L P, P]`` and ``X_R = -[d_R P, P]``."""
    b = _bundle(field, xl, xr)
    return commutator(b.L, b.P), -commutator(b.R, b.P)


def p_trace(field, B: str, D: str, xl=None, xr=None) -> np.ndarray:
    """Real part of ``tr(d_B P . d_D P)`` for multi-indices of order 1 or 2."""
    if not (1 <= len(B) <= 2 and 1 <= len(D) <= 2):
        raise ValueError("p_trace supports derivative orders 1 and 2 only")
    b = _bundle(field, xl, xr)
    return np.real(np.trace(b.get(B) @ b.get(D), axis1=-2, axis2=-1))


def pprops_residual(field, xl=None, xr=None) -> np.ndarray:
    """Largest violation of ``dP = dP P + P dP`` and ``P dP P = 0`` over D = L, R."""
    b = _bundle(field, xl, xr)
    out = []
    for dP in (b.L, b.R):
        out.append(fro(dP - dP @ b.P - b.P @ dP))
        out.append(fro(b.P @ dP @ b.P))
    return np.max(np.stack(out), axis=0)


def _first_derivative(fn, xl, xr, direction, h, order):
    offs, w = _D1[order]
    if direction == "L":
        return sum(wi * fn(xl + o * h, xr) for o, wi in zip(offs, w)) / h
    return sum(wi * fn(xl, xr + o * h) for o, wi in zip(offs, w)) / h


def conservation_check(field: ProjectorField, xl, xr, h: float = 1e-3, order: int = 4) -> np.ndarray:
    """``|| d_L [d_R P, P] + d_R [d_L P, P] ||`` with outer derivatives by nested FD."""

    def m(d):
        def fn(a, b):
            bundle = derivatives(field, a, b)
            return commutator(bundle.first(d), bundle.P)

        return fn

    xl, xr = np.broadcast_arrays(np.asarray(xl, dtype=float), np.asarray(xr, dtype=float))
    total = _first_derivative(m("R"), xl, xr, "L", h, order) + _first_derivative(m("L"), xl, xr, "R", h, order)
    return fro(total)


def gauge_transform(field: ProjectorField, U) -> ProjectorField:
    """The field ``U P U^dagger`` for a constant unitary ``U``."""
    U = np.asarray(U, dtype=complex)
    Ud = U.conj().T

    def sample(xl, xr):
        return U @ field.sample(xl, xr) @ Ud

    jet = None
    if field.jet is not None:

        def jet(xl, xr):
            return jets.matmul(jets.matmul(U, field.jet(xl, xr)), Ud)

    return dataclasses.replace(field, sample=sample, jet=jet, wfield=None, name=f"{field.name}@U")
