"""Second-order forward-mode jets in the two light-cone variables.

A :class:`Jet` carries a value together with its first and second partial
derivatives with respect to ``xi_L`` and ``xi_R``.  Arithmetic on jets
propagates derivatives exactly (up to round-off), which is how the closed-form
solution families supply "analytic" derivatives without hand-written formulas
for every entry of ``P``.

Components are numpy arrays of arbitrary (broadcastable) shape, real or
complex.  Matrix-valued jets keep the matrix axes last.
"""
from __future__ import annotations

import numpy as np

_FIELDS = ("v", "l", "r", "ll", "lr", "rr")


class Jet:
    __slots__ = _FIELDS
    __array_priority__ = 1000

    def __init__(self, v, l, r, ll, lr, rr):
        self.v = np.asarray(v)
        self.l = np.asarray(l)
        self.r = np.asarray(r)
        self.ll = np.asarray(ll)
        self.lr = np.asarray(lr)
        self.rr = np.asarray(rr)

    @classmethod
    def constant(cls, value):
        value = np.asarray(value)
        z = np.zeros_like(value)
        return cls(value, z, z, z, z, z)

    def components(self):
        return tuple(getattr(self, f) for f in _FIELDS)

    @property
    def shape(self):
        return np.broadcast_shapes(*(c.shape for c in self.components()))

    def __repr__(self):
        return f"Jet(v={self.v!r}, l={self.l!r}, r={self.r!r})"

    # -- arithmetic ---------------------------------------------------------
    def __neg__(self):
        return Jet(*(-c for c in self.components()))

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(*(a + b for a, b in zip(self.components(), other.components())))
        return Jet(self.v + other, self.l, self.r, self.ll, self.lr, self.rr)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(*(c * other for c in self.components()))
        f, g = self, other
        return Jet(
            f.v * g.v,
            f.l * g.v + f.v * g.l,
            f.r * g.v + f.v * g.r,
            f.ll * g.v + 2 * f.l * g.l + f.v * g.ll,
            f.lr * g.v + f.l * g.r + f.r * g.l + f.v * g.lr,
            f.rr * g.v + 2 * f.r * g.r + f.v * g.rr,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(*(c / other for c in self.components()))
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, k):
        if k == 2:
            return self * self
        v = self.v
        return apply(self, v**k, k * v ** (k - 1), k * (k - 1) * v ** (k - 2))

    def __getitem__(self, idx):
        return Jet(*(np.broadcast_to(c, self.shape)[idx] for c in self.components()))

    def conj(self):
        return Jet(*(np.conj(c) for c in self.components()))

    @property
    def real(self):
        return Jet(*(np.real(c) for c in self.components()))

    @property
    def imag(self):
        return Jet(*(np.imag(c) for c in self.components()))


def variables(xl, xr):
    """Return the coordinate jets ``(xi_L, xi_R)`` evaluated at the given points."""
    xl, xr = np.broadcast_arrays(np.asarray(xl, dtype=float), np.asarray(xr, dtype=float))
    one, zero = np.ones_like(xl), np.zeros_like(xl)
    return Jet(xl, one, zero, zero, zero, zero), Jet(xr, zero, one, zero, zero, zero)


def apply(f: Jet, d0, d1, d2) -> Jet:
    """Chain rule for a scalar function with value ``d0`` and derivatives ``d1``, ``d2``."""
    return Jet(
        d0,
        d1 * f.l,
        d1 * f.r,
        d1 * f.ll + d2 * f.l * f.l,
        d1 * f.lr + d2 * f.l * f.r,
        d1 * f.rr + d2 * f.r * f.r,
    )


def _lift(f):
    return f if isinstance(f, Jet) else Jet.constant(f)


def reciprocal(f):
    f = _lift(f)
    inv = 1.0 / f.v
    return apply(f, inv, -inv * inv, 2 * inv**3)


def sin(f):
    f = _lift(f)
    s, c = np.sin(f.v), np.cos(f.v)
    return apply(f, s, c, -s)


def cos(f):
    f = _lift(f)
    s, c = np.sin(f.v), np.cos(f.v)
    return apply(f, c, -s, -c)


def sinh(f):
    f = _lift(f)
    s, c = np.sinh(f.v), np.cosh(f.v)
    return apply(f, s, c, s)


def cosh(f):
    f = _lift(f)
    s, c = np.sinh(f.v), np.cosh(f.v)
    return apply(f, c, s, c)


def tanh(f):
    f = _lift(f)
    t = np.tanh(f.v)
    d1 = 1 - t * t
    return apply(f, t, d1, -2 * t * d1)


def sech(f):
    """Overflow-free ``1/cosh``."""
    f = _lift(f)
    e = np.exp(-np.abs(f.v)) if not np.iscomplexobj(f.v) else None
    s = 2 * e / (1 + e * e) if e is not None else 1 / np.cosh(f.v)
    t = np.tanh(f.v)
    return apply(f, s, -s * t, s * (2 * t * t - 1))


def exp(f):
    f = _lift(f)
    e = np.exp(f.v)
    return apply(f, e, e, e)


def expi(f):
    """``exp(1j * f)`` for a real or complex jet."""
    return exp(1j * _lift(f))


def sqrt(f):
    f = _lift(f)
    s = np.sqrt(f.v)
    return apply(f, s, 0.5 / s, -0.25 / (s * f.v))


def arctan(f):
    f = _lift(f)
    d1 = 1.0 / (1 + f.v * f.v)
    return apply(f, np.arctan(f.v), d1, -2 * f.v * d1 * d1)


def log(f):
    f = _lift(f)
    inv = 1.0 / f.v
    return apply(f, np.log(f.v), inv, -inv * inv)


def matmul(a, b):
    """Product of matrix-valued jets (matrix axes last)."""
    if not isinstance(a, Jet):
        return Jet(*(a @ c for c in b.components()))
    if not isinstance(b, Jet):
        return Jet(*(c @ b for c in a.components()))
    return Jet(
        a.v @ b.v,
        a.l @ b.v + a.v @ b.l,
        a.r @ b.v + a.v @ b.r,
        a.ll @ b.v + 2 * (a.l @ b.l) + a.v @ b.ll,
        a.lr @ b.v + a.l @ b.r + a.r @ b.l + a.v @ b.lr,
        a.rr @ b.v + 2 * (a.r @ b.r) + a.v @ b.rr,
    )


def dagger(a: Jet) -> Jet:
    return Jet(*(np.conj(np.swapaxes(c, -1, -2)) for c in a.components()))


def matrix(rows) -> Jet:
    """Assemble a matrix-valued jet from nested lists of scalar jets or constants."""
    rows = [[_lift(e) for e in row] for row in rows]
    shape = np.broadcast_shapes(*(e.shape for row in rows for e in row))
    comps = []
    for field in _FIELDS:
        comps.append(
            np.stack(
                [np.stack([np.broadcast_to(getattr(e, field), shape) for e in row], axis=-1) for row in rows],
                axis=-2,
            )
        )
    return Jet(*comps)
