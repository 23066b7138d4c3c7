"""Command-line driver: ``sigmasurf verify | surface | sine-gordon | frame``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import cp1, geometry, immersion, io, lax
from .algebra import coords, standard_basis
from .config import ConfigError, RunConfig, load_config
from .families import piette_comoving_velocity
from .projector import FD, DomainError, SingularPointError, el_residual, projector_residuals

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- verification ---------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    max_residual: float
    tolerance: float
    passed: bool
    samples: int
    wall_time: float
    note: str = ""

    def as_dict(self, timing: bool = False) -> dict:
        d = {
            "name": self.name,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "samples": self.samples,
        }
        if self.note:
            d["note"] = self.note
        if timing:
            d["wall_time"] = self.wall_time
        return d


@dataclass
class VerificationReport:
    family: str
    mode: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self, timing: bool = False) -> dict:
        return {
            "family": self.family,
            "mode": self.mode,
            "passed": self.passed,
            "checks": [c.as_dict(timing) for c in self.checks],
        }


def _run_check(name, tol, fn) -> CheckResult:
    t0 = time.perf_counter()
    try:
        value, samples = fn()
        value = float(value)
        passed = bool(np.isfinite(value) and value <= tol and samples > 0)
        note = "" if samples > 0 else "no admissible samples"
    except (ValueError, ArithmeticError, AssertionError) as exc:
        value, samples, passed, note = float("nan"), 0, False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, value, tol, passed, samples, time.perf_counter() - t0, note)


def _subsample(a, n):
    idx = np.unique(np.linspace(0, len(a) - 1, min(n, len(a))).round().astype(int))
    return a[idx]


def cmd_verify(cfg: RunConfig) -> VerificationReport:
    """Projector, EL, Chebyshev, curvature, sine-Gordon and zero-curvature checks over the grid."""
    field = cfg.build_field()
    tol = cfg.tolerances.resolved(cfg.mode, cfg.family)
    gl, gr = cfg.axes()
    XL, XR = np.meshgrid(gl, gr, indexing="ij")
    ok = ~field.excluded(XL, XR) if field.excluded is not None else np.ones(XL.shape, bool)
    xl, xr = XL[ok], XR[ok]
    checks = []

    def projector():
        idem, herm = projector_residuals(field(xl, xr))
        return max(idem.max(initial=0), herm.max(initial=0)), xl.size

    def el():
        return el_residual(field, xl, xr).max(initial=0), xl.size

    def chebyshev():
        m = geometry.metric(field, xl, xr)
        dev = max(np.max(np.abs(m.J_L - 1), initial=0), np.max(np.abs(m.J_R - 1), initial=0))
        return dev, xl.size

    def curvature():
        m = geometry.metric(field, xl, xr)
        reg = m.det_G >= tol.regular_det
        kf = field.with_mode(field.mode, fd_step=cfg.curvature_step) if field.effective_mode == FD else field
        K = geometry.gaussian_curvature(kf, xl[reg], xr[reg])
        return np.max(np.abs(K + 4), initial=0), int(reg.sum())

    checks.append(_run_check("projector", tol.projector, projector))
    checks.append(_run_check("euler_lagrange", tol.el, el))
    checks.append(_run_check("chebyshev", tol.chebyshev, chebyshev))
    checks.append(_run_check("gaussian_curvature", tol.curvature, curvature))

    if field.n == 2:
        sl, sr = _subsample(gl, tol.sg_samples), _subsample(gr, tol.sg_samples)
        SL, SR = np.meshgrid(sl, sr, indexing="ij")
        sok = ~field.excluded(SL, SR) if field.excluded is not None else np.ones(SL.shape, bool)

        def sine_gordon():
            r = cp1.sg_residual_at(field, SL[sok], SR[sok], h=tol.sg_step)
            return np.max(np.abs(r), initial=0), int(sok.sum())

        zc_method = "analytic" if field.effective_mode == "analytic" else "fd"
        zc_step = 1e-3 if zc_method == "analytic" else cfg.fd_step

        def zero_curvature():
            worst = 0.0
            for kind, lams in ((lax.SPECTRAL, lax.SPECTRAL_LAMBDAS), (lax.OVERALL, lax.OVERALL_LAMBDAS)):
                for lam in lams:
                    r = lax.zero_curvature_residual(kind, field, SL[sok], SR[sok], lam, h=zc_step, method=zc_method)
                    worst = max(worst, float(np.max(r, initial=0)))
            return worst, int(sok.sum())

        checks.append(_run_check("sine_gordon", tol.sine_gordon, sine_gordon))
        checks.append(_run_check("zero_curvature", tol.zero_curvature, zero_curvature))
    return VerificationReport(field.name, cfg.mode, checks)


# -- surface --------------------------------------------------------------------------


def _basepoint(cfg: RunConfig, gl, gr):
    if cfg.basepoint is None:
        return float(gl[len(gl) // 2]), float(gr[len(gr) // 2])
    for val, grid, name in ((cfg.basepoint[0], gl, "xi_L"), (cfg.basepoint[1], gr, "xi_R")):
        if not np.any(np.isclose(grid, val, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(grid))))):
            raise UsageError(f"basepoint {name}={val} is not a grid node")
    return tuple(float(v) for v in cfg.basepoint)


def build_mesh(cfg: RunConfig) -> immersion.SurfaceMesh:
    field = cfg.build_field()
    gl, gr = cfg.axes()
    XL, XR = np.meshgrid(gl, gr, indexing="ij")
    if field.excluded is not None:
        bad = np.argwhere(field.excluded(XL, XR))
        if len(bad):
            listed = ", ".join(f"({gl[i]:.6g}, {gr[j]:.6g})" for i, j in bad[:10])
            more = f" and {len(bad) - 10} more" if len(bad) > 10 else ""
            raise UsageError(f"{len(bad)} grid vertices lie in the excluded region: {listed}{more}")
    mesh = immersion.integrate_surface(field, gl, gr, _basepoint(cfg, gl, gr))
    m = geometry.metric(field, XL, XR)
    K = np.full(XL.shape, np.nan)
    reg = m.det_G > geometry.DET_THRESHOLD
    if reg.any():
        try:
            K[reg] = geometry.gaussian_curvature(field, XL[reg], XR[reg])
        except ValueError:  # not in Chebyshev gauge: the closed formula does not apply
            pass
    mesh.K = K
    if field.n == 2:
        try:
            mesh.phi = cp1.sg_phase(field, gl, gr, cross_check=False).phi
        except (SingularPointError, ValueError):
            mesh.phi = None
    return mesh


def cmd_surface(cfg: RunConfig) -> list:
    mesh = build_mesh(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    nL, nR = mesh.shape
    dim = mesh.X.shape[-1]
    XL, XR = np.meshgrid(mesh.xl, mesh.xr, indexing="ij")
    cols = [XL.ravel(), XR.ravel()] + [mesh.X[..., k].ravel() for k in range(dim)] + [mesh.K.ravel()]
    header = ["xi_L", "xi_R"] + [f"X{k + 1}" for k in range(dim)] + ["K"]
    if mesh.phi is not None:
        cols.append(mesh.phi.ravel())
        header.append("phi")
    proj = None
    if cfg.pca3 and dim > 3:
        proj, _ = immersion.pca3(mesh.X)
        cols += [proj[..., k].ravel() for k in range(3)]
        header += ["pca1_nonisometric", "pca2_nonisometric", "pca3_nonisometric"]
    written = []
    formats = [cfg.format] if cfg.format else (["csv", "obj"] if dim == 3 or proj is not None else ["csv"])
    if "csv" in formats:
        path = os.path.join(cfg.out, "surface.csv")
        io.write_csv(path, header, np.stack(cols, axis=1))
        written.append(path)
    if "obj" in formats:
        if dim == 3:
            verts, comment = mesh.vertices(), None
        elif proj is not None:
            verts, comment = proj.reshape(-1, 3), "PCA projection to 3 axes; not isometric"
        else:
            raise UsageError("OBJ export needs N = 2 or --pca3")
        path = os.path.join(cfg.out, "surface.obj")
        io.write_obj(path, verts, (nL, nR), comment)
        written.append(path)
    if "json" in formats:
        path = os.path.join(cfg.out, "surface.json")
        io.write_json(path, {"header": header, "shape": [nL, nR], "basepoint": list(mesh.basepoint),
                             "rows": np.stack(cols, axis=1).tolist()})
        written.append(path)
    return written


# -- sine-Gordon slices ---------------------------------------------------------------


def resolve_velocity(cfg: RunConfig) -> float:
    if cfg.velocity == "comoving":
        if cfg.family != "piette":
            raise UsageError("velocity = comoving is only defined for the piette family")
        return piette_comoving_velocity(cfg.family_params().lam)
    return float(cfg.velocity)


def cmd_sine_gordon(cfg: RunConfig) -> list:
    field = cfg.build_field()
    if field.n != 2:
        raise UsageError("sine-gordon needs a CP^1 family")
    try:
        V = resolve_velocity(cfg)
        cp1.boost_factor(V)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not cfg.times:
        return []
    os.makedirs(cfg.out, exist_ok=True)
    x0, x1, n = cfg.x_range
    X = np.linspace(x0, x1, n)
    written = []
    for k, T in enumerate(cfg.times):
        lab = cp1.to_standard_form(field, V, X, [T])
        path = os.path.join(cfg.out, f"sine_gordon_T{k:02d}.csv")
        io.write_csv(path, ["X", "T", "V", "phi"], ((x, T, V, p) for x, p in zip(X, lab.phi[:, 0])))
        written.append(path)
    return written


# -- frame ----------------------------------------------------------------------------


def frame_report(cfg: RunConfig) -> dict:
    field = cfg.build_field()
    xl, xr = cfg.point
    if field.excluded is not None and np.any(field.excluded(np.array(xl), np.array(xr))):
        raise UsageError(f"point ({xl}, {xr}) lies in the excluded region")
    gw = geometry.gw_coefficients(field, xl, xr)
    fr = gw.frame
    basis = standard_basis(field.n)
    c = lambda a: coords(a, basis).tolist()
    return {
        "family": field.name,
        "point": [float(xl), float(xr)],
        "basis_labels": ["{}{}{}".format(*lab) if lab[0] != "C" else f"C{lab[1]}" for lab in basis.labels],
        "X_L": c(fr.X_L),
        "X_R": c(fr.X_R),
        "normals": [
            {"label": "{}{}{}".format(*lab) if lab[0] != "C" else f"C{lab[1]}", "coords": c(n)}
            for lab, n in zip(fr.labels, fr.normals)
        ],
        "gram": fr.gram().tolist(),
        "gauss_weingarten": {
            "A": {k: float(v) for k, v in gw.A.items()},
            "H": gw.H.tolist(),
            "Q_L": gw.Q_L.tolist(),
            "Q_R": gw.Q_R.tolist(),
            "alpha": {D: np.asarray(gw.alpha[D]).tolist() for D in "LR"},
            "beta": {D: np.asarray(gw.beta[D]).tolist() for D in "LR"},
            "s": {D: gw.s[D].tolist() for D in "LR"},
        },
        "residuals": dict(gw.residuals),
        "constraint": list(gw.constraint),
    }


# -- argument handling ----------------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="config file (key-value with [sections])")
    p.add_argument("--param", action="append", default=[], metavar="K=V",
                   help="override, e.g. family.lam=1+2j (repeatable)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=["csv", "obj", "json"])
    p.add_argument("--mode", choices=["analytic", "fd"])
    p.add_argument("--fd-step", type=float)
    p.add_argument("--fd-order", type=int, choices=[2, 4])
    p.add_argument("--grid", metavar="nL,nR")
    p.add_argument("--domain", metavar="lmin,lmax,rmin,rmax")
    p.add_argument("--pca3", action="store_true", help="add a non-isometric 3-axis projection for N > 2")
    return p


def make_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="sigmasurf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("--timing", action="store_true", help="include wall times in the report (not reproducible)")
    sub.add_parser("surface", parents=[common], help="integrate and export the surface")
    s = sub.add_parser("sine-gordon", parents=[common], help="export laboratory-frame time slices")
    s.add_argument("--velocity", help="boost velocity |V| < 1, or 'comoving' (piette)")
    s.add_argument("--times", help="comma-separated T values")
    f = sub.add_parser("frame", parents=[common], help="moving frame and Gauss-Weingarten table at a point")
    f.add_argument("--point", metavar="xiL,xiR")
    return parser


def config_from_args(args) -> RunConfig:
    overrides = list(args.param)
    flag_map = {
        "out": "output.dir", "format": "output.format", "mode": "derivatives.mode",
        "fd_step": "derivatives.fd_step", "fd_order": "derivatives.fd_order",
        "grid": "grid.size", "domain": "grid.domain",
        "velocity": "sine_gordon.velocity", "times": "sine_gordon.times", "point": "frame.point",
    }
    for attr, key in flag_map.items():
        val = getattr(args, attr, None)
        if val is not None:
            overrides.append(f"{key}={val}")
    if args.pca3:
        overrides.append("output.pca3=true")
    return load_config(args.config, overrides)


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "verify":
            report = cmd_verify(cfg)
            for c in report.checks:
                status = "PASS" if c.passed else "FAIL"
                extra = f"  ({c.note})" if c.note else ""
                print(f"{status} {c.name}: max {io.fmt(c.max_residual)} tol {c.tolerance:g} "
                      f"n={c.samples} {c.wall_time:.2f}s{extra}", file=sys.stderr)
            if args.out is not None or cfg.out != ".":
                os.makedirs(cfg.out, exist_ok=True)
                io.write_json(os.path.join(cfg.out, "verify.json"), report.as_dict(args.timing))
            else:
                sys.stdout.write(io.dumps(report.as_dict(args.timing)))
            return EXIT_OK if report.passed else EXIT_FAIL
        if args.command == "surface":
            for path in cmd_surface(cfg):
                print(path)
            return EXIT_OK
        if args.command == "sine-gordon":
            for path in cmd_sine_gordon(cfg):
                print(path)
            return EXIT_OK
        if args.command == "frame":
            text = io.dumps(frame_report(cfg))
            sys.stdout.write(text)
            if args.out is not None or cfg.out != ".":
                os.makedirs(cfg.out, exist_ok=True)
                with open(os.path.join(cfg.out, "frame.json"), "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(text)
            return EXIT_OK
    except (ConfigError, UsageError, DomainError, SingularPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
