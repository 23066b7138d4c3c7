"""Induced geometry of the surface attached to a projector field.

Scalar quantities are built from the trace products
``p_{B|D} = tr(d_B P . d_D P)``; the closed formulas for curvature, Christoffel
symbols and normal parts assume Chebyshev coordinates (``J_L = J_R = 1``).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import commutator, dagger, inner, standard_basis
from .projector import (
    _D1,
    DerivativeBundle,
    ProjectorField,
    SingularPointError,
    derivatives,
    fro,
)

DET_THRESHOLD = 1e-8
DENOM_THRESHOLD = 1e-8
CHEBYSHEV_TOL = 1e-6


def _tr(a, b):
    return np.real(np.einsum("...ij,...ji->...", a, b))


def _bundle(field, xl, xr) -> DerivativeBundle:
    if isinstance(field, DerivativeBundle):
        return field
    return derivatives(field, xl, xr)


@dataclass(frozen=True)
class MetricSample:
    J_L: np.ndarray
    J_R: np.ndarray
    G_LR: np.ndarray
    det_G: np.ndarray

    @property
    def regular(self) -> np.ndarray:
        return self.det_G > DET_THRESHOLD

    def first_form(self):
        """Coefficients ``(E, F, G)`` of ``I = E dL^2 + 2 F dL dR + G dR^2``."""
        return self.J_L, self.G_LR, self.J_R


def metric(field, xl=None, xr=None) -> MetricSample:
    """``J_L = p_{L|L}/2``, ``J_R = p_{R|R}/2``, ``G_LR = -p_{L|R}/2``.

    The sign of ``G_LR`` follows the tangent convention ``X_R = -[d_R P, P]``,
    so ``G_LR = (X_L, X_R)``.
    """
    b = _bundle(field, xl, xr)
    jl = 0.5 * _tr(b.L, b.L)
    jr = 0.5 * _tr(b.R, b.R)
    glr = -0.5 * _tr(b.L, b.R)
    return MetricSample(jl, jr, glr, jl * jr - glr * glr)


def regular_mask(field, xl=None, xr=None, threshold: float = DET_THRESHOLD) -> np.ndarray:
    return metric(field, xl, xr).det_G > threshold


def require_regular(m: MetricSample, threshold: float = DET_THRESHOLD):
    if np.any(~(m.det_G > threshold)):
        raise SingularPointError(f"det G <= {threshold:g} at {np.count_nonzero(~(m.det_G > threshold))} point(s)")


@dataclass
class ChebyshevReport:
    passed: bool
    J_L: tuple  # (min, max)
    J_R: tuple
    constant: bool
    scale: tuple | None = None  # (sqrt(J_L), sqrt(J_R)) when constant but != 1


def assert_chebyshev(field, xl, xr, tol: float = 1e-8, const_rtol: float = 1e-8) -> ChebyshevReport:
    """Check ``J_L = J_R = 1`` on a set of points.

    If ``J_L``, ``J_R`` are constant but not 1 the report carries the factors
    ``(sqrt(J_L), sqrt(J_R))`` of the rescaling ``xi_D -> sqrt(J_D) xi_D`` that
    would normalise them; nothing is applied.  Non-constant ``J`` raises
    :class:`ValueError` (only constant rescaling is supported).
    """
    m = metric(field, xl, xr)
    jl, jr = np.ravel(m.J_L), np.ravel(m.J_R)
    rng_l, rng_r = (float(jl.min()), float(jl.max())), (float(jr.min()), float(jr.max()))
    if max(np.max(np.abs(jl - 1)), np.max(np.abs(jr - 1))) <= tol:
        return ChebyshevReport(True, rng_l, rng_r, True)
    for j, side in ((jl, "L"), (jr, "R")):
        if np.ptp(j) > const_rtol * max(np.mean(np.abs(j)), 1e-300):
            raise ValueError(f"J_{side} is not constant (range {j.min():.6g}..{j.max():.6g}); "
                             "only constant rescaling is supported")
    return ChebyshevReport(False, rng_l, rng_r, True, (float(np.sqrt(jl.mean())), float(np.sqrt(jr.mean()))))


class _Traces:
    """The p-traces used by the Chebyshev-gauge formulas, with gauge/degeneracy checks."""

    def __init__(self, b: DerivativeBundle, threshold: float = DENOM_THRESHOLD, check_gauge: bool = True):
        self.b = b
        self.pLR = _tr(b.L, b.R)
        self.pLLR = _tr(b.LL, b.R)
        self.pRRL = _tr(b.RR, b.L)
        self.pLRR = self.pRRL
        self.pLRLR = _tr(b.LR, b.LR)
        self.pLLRR = _tr(b.LL, b.RR)
        self.denom = 4 - self.pLR**2
        if np.any(~(np.abs(self.denom) > threshold)):
            raise SingularPointError("4 - p_{L|R}^2 below threshold: metric degenerate")
        if check_gauge:
            jl, jr = 0.5 * _tr(b.L, b.L), 0.5 * _tr(b.R, b.R)
            dev = max(np.max(np.abs(jl - 1), initial=0.0), np.max(np.abs(jr - 1), initial=0.0))
            if dev > CHEBYSHEV_TOL:
                raise ValueError(f"field not in Chebyshev gauge (|J - 1| up to {dev:.3g})")


def gaussian_curvature(field, xl=None, xr=None, threshold: float = DENOM_THRESHOLD) -> np.ndarray:
    """Gaussian curvature from the closed trace formula (Chebyshev coordinates)."""
    t = _Traces(_bundle(field, xl, xr), threshold)
    d = t.denom
    return 2 * ((t.pLRLR - t.pLLRR) / d - t.pLLR * t.pLRR * t.pLR / d**2)


def christoffel(field, xl=None, xr=None, threshold: float = DENOM_THRESHOLD) -> dict:
    """Christoffel symbols ``A^L_L, A^L_R, A^R_L, A^R_R`` (Chebyshev coordinates)."""
    t = _Traces(_bundle(field, xl, xr), threshold)
    d = t.denom
    return {
        "LL": -t.pLR * t.pLLR / d,  # A^L_L = Gamma^L_LL
        "LR": -2 * t.pLLR / d,  # A^L_R = Gamma^R_LL (coefficient of X_R in d_L X_L)
        "RL": -2 * t.pRRL / d,  # A^R_L = Gamma^L_RR
        "RR": -t.pLR * t.pRRL / d,  # A^R_R = Gamma^R_RR
    }


def normal_parts(field, xl=None, xr=None, threshold: float = DENOM_THRESHOLD):
    """Normal components of ``d_LL X``, ``d_LR X``, ``d_RR X``."""
    b = _bundle(field, xl, xr)
    t = _Traces(b, threshold)
    d = t.denom[..., None, None]
    mL = commutator(b.L, b.P)
    mR = commutator(b.R, b.P)
    pLR = t.pLR[..., None, None]
    pLLR = t.pLLR[..., None, None]
    pRRL = t.pRRL[..., None, None]
    nLL = commutator(b.LL, b.P) + pLR * pLLR / d * mL - 2 * pLLR / d * mR
    nRR = -commutator(b.RR, b.P) + 2 * pRRL / d * mL - pLR * pRRL / d * mR
    nLR = commutator(b.L, b.R)
    return nLL, nLR, nRR


def second_form_and_mean_curvature(field, xl=None, xr=None, threshold: float = DET_THRESHOLD):
    """Second fundamental form ``(II_LL, II_LR, II_RR)`` and the mean curvature vector.

    ``II = II_LL dL^2 + 2 II_LR dL dR + II_RR dR^2``.  The mean curvature
    vector is half the metric trace of ``II``,

        H = (J_R II_LL - 2 G_LR II_LR + J_L II_RR) / (2 det G),

    so that ``(H, n)`` is the mean of the principal curvatures along ``n``.
    """
    b = _bundle(field, xl, xr)
    m = metric(b)
    require_regular(m, threshold)
    nLL, nLR, nRR = normal_parts(b)
    e = lambda a: a[..., None, None]
    trace_ii = (e(m.J_R) * nLL - 2 * e(m.G_LR) * nLR + e(m.J_L) * nRR) / e(m.det_G)
    return (nLL, nLR, nRR), 0.5 * trace_ii


# -- moving frame ---------------------------------------------------------------------


def _pivoted_basis(Q, rank, tol=1e-8):
    """Orthonormal basis of the range of the projector ``Q`` from its columns.

    Columns are taken largest-norm first (after removing earlier directions),
    so for a rank-one ``Q`` this is the eigenvector whose largest-modulus
    component is real and positive.
    """
    cols = [Q[:, j].copy() for j in range(Q.shape[1])]
    basis = []
    for _ in range(rank):
        resid = [c - sum(np.vdot(v, c) * v for v in basis) for c in cols]
        norms = [np.linalg.norm(r) for r in resid]
        j = int(np.argmax(norms))
        if norms[j] < tol:
            raise SingularPointError("projector rank smaller than expected")
        basis.append(resid[j] / norms[j])
    return np.stack(basis, axis=1) if basis else np.zeros((Q.shape[0], 0), dtype=complex)


def diagonalising_unitary(P, tol: float = 1e-8):
    """Unitary ``Phi`` with ``P = Phi diag(0, ..., 0, 1, ..., 1) Phi^dagger`` and the number of zeros.

    The eigenvalues come from a Hermitian eigensolver and are clamped to
    {0, 1}; the eigenvector gauge is fixed deterministically.
    """
    P = np.asarray(P, dtype=complex)
    N = P.shape[0]
    ev = np.linalg.eigvalsh(P)
    if np.any((np.abs(ev) > tol) & (np.abs(ev - 1) > tol)):
        raise SingularPointError("matrix is not a projector")
    rank = int(np.count_nonzero(np.abs(ev - 1) <= tol))
    m = N - rank
    Phi = np.concatenate([_pivoted_basis(np.eye(N) - P, m), _pivoted_basis(P, rank)], axis=1)
    return Phi, m


@dataclass
class MovingFrame:
    X_L: np.ndarray
    X_R: np.ndarray
    normals: np.ndarray  # (N^2 - 3, N, N)
    labels: tuple
    Phi: np.ndarray
    m: int
    gw: dict = dc_field(default_factory=dict)

    @property
    def vectors(self) -> np.ndarray:
        return np.concatenate([self.X_L[None], self.X_R[None], self.normals], axis=0)

    def gram(self) -> np.ndarray:
        v = self.vectors
        return inner(v[:, None], v[None, :])


def _gram_schmidt_normals(TL, TR, N, m):
    """Normals in the Phi-frame: off-diagonal block by Gram-Schmidt, diagonal blocks as is."""
    basis = standard_basis(N)
    t1 = TL / np.sqrt(inner(TL, TL))
    t2 = TR - inner(TR, t1) * t1
    t2 = t2 / np.sqrt(inner(t2, t2))
    span = [t1, t2]
    normals, labels = [], []
    for elem, label in zip(basis.elements, basis.labels):
        if label[0] in "AB":
            j, k = label[1], label[2]
            off_diagonal = (j <= m) != (k <= m)
            if off_diagonal:
                v = elem - sum(inner(elem, s) * s for s in span + normals)
                nv = np.sqrt(max(inner(v, v), 0.0))
                if nv < 1e-10:
                    continue
                v = v / nv
            else:
                v = elem.copy()
        else:
            v = elem.copy()
        normals.append(v)
        labels.append(label)
    if len(normals) != N * N - 3:
        raise SingularPointError(f"expected {N * N - 3} normals, got {len(normals)}")
    return np.array(normals), tuple(labels)


def moving_frame(field, xl: float, xr: float, expected_m: int | None = None) -> MovingFrame:
    """Tangents and an orthonormal normal frame at one regular point."""
    b = _bundle(field, np.asarray(xl, float), np.asarray(xr, float))
    m_ = metric(b)
    require_regular(m_)
    P = b.P
    N = P.shape[-1]
    Phi, m = diagonalising_unitary(P)
    if expected_m is not None and m != expected_m:
        raise SingularPointError(f"projector rank changed: {N - m} instead of {N - expected_m}")
    XL = commutator(b.L, P)
    XR = -commutator(b.R, P)
    Phid = dagger(Phi)
    TL, TR = Phid @ XL @ Phi, Phid @ XR @ Phi
    normals_phi, labels = _gram_schmidt_normals(TL, TR, N, m)
    normals = Phi @ normals_phi @ Phid
    return MovingFrame(XL, XR, normals, labels, Phi, m)


def _frame_derivative(field, xl, xr, direction, h, order, m):
    offs, w = _D1[order]
    acc = 0
    for o, wi in zip(offs, w):
        dl, dr = (o * h, 0.0) if direction == "L" else (0.0, o * h)
        acc = acc + wi * moving_frame(field, xl + dl, xr + dr, expected_m=m).normals
    return acc / h


@dataclass
class GWTable:
    """Gauss-Weingarten coefficients at one point plus diagnostics."""

    A: dict  # Christoffel symbols (closed form)
    A_direct: dict  # the same by projection onto the tangents
    H: np.ndarray
    Q_L: np.ndarray
    Q_R: np.ndarray
    alpha: dict  # closed form, keyed by "L"/"R"
    beta: dict
    alpha_direct: dict
    beta_direct: dict
    s: dict  # (N^2-3, N^2-3) per direction
    residuals: dict
    constraint: tuple  # ((d_L X_L, d_L X_R), (d_R X_R, d_L X_R))
    frame: MovingFrame

    def connection(self, direction: str) -> np.ndarray:
        """Matrix ``Omega`` with ``d_D (X_L, X_R, n_j)^T = Omega (X_L, X_R, n_j)^T``."""
        k = len(self.H)
        om = np.zeros((k + 2, k + 2))
        if direction == "L":
            om[0, 0], om[0, 1], om[0, 2:] = self.A["LL"], self.A["LR"], self.Q_L
            om[1, 2:] = self.H
        else:
            om[0, 2:] = self.H
            om[1, 0], om[1, 1], om[1, 2:] = self.A["RL"], self.A["RR"], self.Q_R
        om[2:, 0] = self.alpha[direction]
        om[2:, 1] = self.beta[direction]
        om[2:, 2:] = self.s[direction]
        return om


def gw_coefficients(field: ProjectorField, xl: float, xr: float, h: float = 1e-4, order: int = 4) -> GWTable:
    """Gauss-Weingarten table at a point; normal derivatives by FD of the frame field."""
    xl, xr = float(xl), float(xr)
    b = _bundle(field, np.asarray(xl), np.asarray(xr))
    frame = moving_frame(b, xl, xr)
    t = _Traces(b)
    d = float(t.denom)
    pLR = float(t.pLR)
    XL, XR, nrm = frame.X_L, frame.X_R, frame.normals

    dL_XL = commutator(b.LL, b.P)
    dR_XR = -commutator(b.RR, b.P)
    dL_XR = -commutator(b.LR, b.P) - commutator(b.R, b.L)
    dR_XL = commutator(b.LR, b.P) + commutator(b.L, b.R)

    H = inner(dL_XR, nrm)
    QL = inner(dL_XL, nrm)
    QR = inner(dR_XR, nrm)
    A = {k: float(v) for k, v in christoffel(b).items()}

    G = np.array([[inner(XL, XL), inner(XL, XR)], [inner(XR, XL), inner(XR, XR)]])
    Ginv = np.linalg.inv(G)
    direct_L = Ginv @ np.array([inner(dL_XL, XL), inner(dL_XL, XR)])
    direct_R = Ginv @ np.array([inner(dR_XR, XL), inner(dR_XR, XR)])
    A_direct = {"LL": direct_L[0], "LR": direct_L[1], "RL": direct_R[0], "RR": direct_R[1]}

    alpha = {"L": -2 * (pLR * H + 2 * QL) / d, "R": -2 * (pLR * QR + 2 * H) / d}
    beta = {"L": -2 * (pLR * QL + 2 * H) / d, "R": -2 * (pLR * H + 2 * QR) / d}

    dn = {D: _frame_derivative(field, xl, xr, D, h, order, frame.m) for D in "LR"}
    s = {D: inner(dn[D][:, None], nrm[None, :]) for D in "LR"}
    alpha_direct, beta_direct = {}, {}
    for D in "LR":
        proj = np.stack([inner(dn[D], XL), inner(dn[D], XR)])  # (2, k)
        ab = Ginv @ proj
        alpha_direct[D], beta_direct[D] = ab[0], ab[1]

    def resid(actual, recon):
        return float(np.max(fro(actual - recon), initial=0.0))

    e = lambda c: np.asarray(c)[:, None, None]
    residuals = {
        "dL_XL": resid(dL_XL, A["LL"] * XL + A["LR"] * XR + np.sum(e(QL) * nrm, 0)),
        "dL_XR": resid(dL_XR, np.sum(e(H) * nrm, 0)),
        "dR_XL": resid(dR_XL, np.sum(e(H) * nrm, 0)),
        "dR_XR": resid(dR_XR, A["RL"] * XL + A["RR"] * XR + np.sum(e(QR) * nrm, 0)),
    }
    for D in "LR":
        recon = e(alpha[D]) * XL + e(beta[D]) * XR + np.einsum("jk,kab->jab", s[D], nrm)
        residuals[f"d{D}_n"] = resid(dn[D], recon)

    constraint = (float(inner(dL_XL, dL_XR)), float(inner(dR_XR, dL_XR)))
    return GWTable(A, A_direct, H, QL, QR, alpha, beta, alpha_direct, beta_direct, s, residuals, constraint, frame)


def gcr_residual(field: ProjectorField, xl: float, xr: float, h: float = 1e-3, order: int = 4,
                 frame_h: float = 1e-4) -> float:
    """Max-norm of ``d_R Omega_L - d_L Omega_R + [Omega_L, Omega_R]`` (compatibility of the GW system).

    The connection matrices are evaluated on an FD stencil of step ``h`` around
    the point and differentiated numerically.
    """
    offs, w = _D1[order]
    xl, xr = float(xl), float(xr)

    def omega(a, b_, D):
        return gw_coefficients(field, a, b_, h=frame_h, order=order).connection(D)

    dR_omL = sum(wi * omega(xl, xr + o * h, "L") for o, wi in zip(offs, w)) / h
    dL_omR = sum(wi * omega(xl + o * h, xr, "R") for o, wi in zip(offs, w)) / h
    omL, omR = omega(xl, xr, "L"), omega(xl, xr, "R")
    curv = dR_omL - dL_omR + omL @ omR - omR @ omL
    return float(np.max(np.abs(curv)))
