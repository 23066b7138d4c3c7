"""Jacobi elliptic functions sn, cn, dn.

Real arguments use the arithmetic-geometric mean with descending Landen
recursion; complex arguments are reduced to real evaluations with the
parameter and its complement through the addition theorem.  The parameter
``m`` is the square of the modulus ``k``.
"""
from __future__ import annotations

import numpy as np

from . import jets

_MAX_AGM_STEPS = 40


def _sncndn_real(u, m):
    u = np.asarray(u, dtype=float)
    if m == 0.0:
        return np.sin(u), np.cos(u), np.ones_like(u)
    if m == 1.0:
        sech = 1.0 / np.cosh(u)
        return np.tanh(u), sech, sech.copy()

    a, b, c = [1.0], [np.sqrt(1.0 - m)], [np.sqrt(m)]
    while abs(c[-1]) > 1e-17 * a[-1] and len(a) < _MAX_AGM_STEPS:
        an, bn = a[-1], b[-1]
        a.append(0.5 * (an + bn))
        b.append(np.sqrt(an * bn))
        c.append(0.5 * (an - bn))
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn


def jacobi_sn_cn_dn(u, m):
    """Return ``(sn, cn, dn)`` of ``u`` for parameter ``0 <= m <= 1``.

    ``u`` may be a scalar or array, real or complex.  For complex ``u = x + iy``
    the result is assembled from real evaluations at ``(x, m)`` and
    ``(y, 1 - m)``.
    """
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"parameter m={m} outside [0, 1]")
    u = np.asarray(u)
    if not np.iscomplexobj(u):
        return _sncndn_real(u, m)

    s, c, d = _sncndn_real(u.real, m)
    s1, c1, d1 = _sncndn_real(u.imag, 1.0 - m)
    delta = c1 * c1 + m * s * s * s1 * s1
    sn = (s * d1 + 1j * c * d * s1 * c1) / delta
    cn = (c * c1 - 1j * s * d * s1 * d1) / delta
    dn = (d * c1 * d1 - 1j * m * s * c * s1) / delta
    return sn, cn, dn


def sn(u, m):
    """``sn(u | m)``; accepts a :class:`~sigmasurf.jets.Jet` argument."""
    if isinstance(u, jets.Jet):
        s, c, d = jacobi_sn_cn_dn(u.v, m)
        return jets.apply(u, s, c * d, -s * d * d - m * s * c * c)
    return jacobi_sn_cn_dn(u, m)[0]
