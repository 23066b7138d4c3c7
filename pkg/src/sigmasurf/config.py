"""Run configuration: a key-value document with typed sections.

Example::

    [family]
    name = piette
    lam = 1.1+1.1j

    [grid]
    domain = -3, 3, -3, 3
    size = 201, 201

Any key can be overridden with ``section.key=value`` strings (the CLI's
``--param``).
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import families as fam
from .projector import ANALYTIC, FD, ProjectorField


class ConfigError(ValueError):
    pass


FAMILY_PARAMS = {
    "tanh": fam.Tanh,
    "expwell": fam.ExpWell,
    "elliptic": fam.Elliptic,
    "piette": fam.Piette,
    "dressed": fam.Dressed,
}
EXTRA_FAMILIES = ("control", "vacuum")

DEFAULT_DOMAINS = {
    "tanh": (-2.0, 2.0, -2.0, 2.0),
    "expwell": (-40.0, 40.0, -40.0, 40.0),
    "elliptic": (-3.0, 3.0, -3.0, 3.0),
    "piette": (-3.0, 3.0, -3.0, 3.0),
    "dressed": (-3.0, 3.0, -3.0, 3.0),
    "control": (-2.0, 2.0, -2.0, 2.0),
    "vacuum": (-2.0, 2.0, -2.0, 2.0),
}

# the exponential well varies on the scale b ~ 0.005 in xi_R
DEFAULT_SG_STEPS = {"expwell": 5e-4}


@dataclass(frozen=True)
class Tolerances:
    projector: float = 1e-10
    el: float | None = None  # None: 1e-10 analytic, 1e-5 FD
    chebyshev: float = 1e-8
    curvature: float | None = None  # None: 1e-6 analytic, 1e-3 FD
    sine_gordon: float = 1e-4
    zero_curvature: float | None = None  # None: 1e-6 analytic, 1e-3 FD
    regular_det: float = 1e-2  # samples with det G below this are skipped by curvature checks
    sg_step: float | None = None  # stencil step of the pointwise sine-Gordon residual (per-family default)
    sg_samples: int = 41  # sine-Gordon check runs on at most sg_samples^2 grid vertices

    def resolved(self, mode: str, family: str = "tanh") -> "Tolerances":
        analytic = mode == ANALYTIC
        return replace(
            self,
            sg_step=self.sg_step if self.sg_step is not None else DEFAULT_SG_STEPS.get(family, 5e-3),
            el=self.el if self.el is not None else (1e-10 if analytic else 1e-5),
            curvature=self.curvature if self.curvature is not None else (1e-6 if analytic else 1e-3),
            zero_curvature=self.zero_curvature if self.zero_curvature is not None else (1e-6 if analytic else 1e-3),
        )


@dataclass(frozen=True)
class RunConfig:
    family: str = "tanh"
    params: dict = field(default_factory=dict)
    embed: int | None = None
    domain: tuple | None = None
    grid: tuple = (201, 201)
    mode: str = ANALYTIC
    fd_step: float = 1e-4
    fd_order: int = 4
    curvature_step: float = 5e-4  # FD step for the curvature check (fourth derivatives amplify round-off)
    basepoint: tuple | None = None
    tolerances: Tolerances = Tolerances()
    out: str = "."
    format: str | None = None
    pca3: bool = False
    velocity: float | str = 0.0
    times: tuple = ()
    x_range: tuple = (-5.0, 5.0, 201)
    point: tuple = (0.7, -0.4)

    def __post_init__(self):
        if self.family not in FAMILY_PARAMS and self.family not in EXTRA_FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if len(self.grid) != 2 or min(self.grid) < 9:
            raise ConfigError("grid resolution must be at least 9 in each direction")
        if self.mode not in (ANALYTIC, FD):
            raise ConfigError(f"mode must be {ANALYTIC!r} or {FD!r}")
        if self.fd_order not in (2, 4):
            raise ConfigError("fd-order must be 2 or 4")
        if not (self.fd_step > 0 and self.curvature_step > 0):
            raise ConfigError("fd-step must be positive")
        d = self.resolved_domain
        if len(d) != 4 or not (d[0] < d[1] and d[2] < d[3]):
            raise ConfigError("domain must be lmin < lmax, rmin < rmax")
        for f in fields(self.tolerances):
            v = getattr(self.tolerances, f.name)
            if v is not None and not v > 0:
                raise ConfigError(f"tolerance {f.name} must be positive")
        if self.format not in (None, "csv", "obj", "json"):
            raise ConfigError("format must be csv, obj or json")

    @property
    def resolved_domain(self) -> tuple:
        return tuple(self.domain) if self.domain is not None else DEFAULT_DOMAINS[self.family]

    def axes(self):
        l0, l1, r0, r1 = self.resolved_domain
        return np.linspace(l0, l1, self.grid[0]), np.linspace(r0, r1, self.grid[1])

    def family_params(self):
        cls = FAMILY_PARAMS.get(self.family)
        if cls is None:
            if self.params:
                raise ConfigError(f"family {self.family!r} takes no parameters")
            return None
        known = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for k, v in self.params.items():
            if k not in known:
                raise ConfigError(f"unknown parameter {k!r} for family {self.family!r}")
            kwargs[k] = _parse_number(v, complex_ok="complex" in str(known[k]))
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def build_field(self) -> ProjectorField:
        p = self.family_params()
        if self.family == "control":
            f = fam.control_field()
        elif self.family == "vacuum":
            f = fam.vacuum()
        else:
            f = fam.build(p)
        if self.embed:
            f = fam.embed_block(f, self.embed)
        return replace(f, mode=self.mode, fd_step=self.fd_step, fd_order=self.fd_order)


def _parse_number(text, complex_ok=False):
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        if complex_ok:
            v = complex(s)
            return v
        return float(s)
    except ValueError as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


def _floats(text, n=None, name="value"):
    try:
        vals = tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {text!r}") from exc
    if n is not None and len(vals) != n:
        raise ConfigError(f"{name}: expected {n} numbers, got {len(vals)}")
    return vals


def _ints(text, n, name):
    vals = _floats(text, n, name)
    if any(v != int(v) for v in vals):
        raise ConfigError(f"{name}: expected integers")
    return tuple(int(v) for v in vals)


# section -> key -> (RunConfig attribute, parser)
_SCHEMA = {
    "grid": {
        "domain": ("domain", lambda s: _floats(s, 4, "domain")),
        "size": ("grid", lambda s: _ints(s, 2, "size")),
        "basepoint": ("basepoint", lambda s: _floats(s, 2, "basepoint")),
    },
    "derivatives": {
        "mode": ("mode", str),
        "fd_step": ("fd_step", lambda s: _floats(s, 1, "fd_step")[0]),
        "fd_order": ("fd_order", lambda s: _ints(s, 1, "fd_order")[0]),
        "curvature_step": ("curvature_step", lambda s: _floats(s, 1, "curvature_step")[0]),
    },
    "output": {
        "dir": ("out", str),
        "format": ("format", str),
        "pca3": ("pca3", lambda s: _bool(s)),
    },
    "sine_gordon": {
        "velocity": ("velocity", lambda s: s.strip() if s.strip() == "comoving" else _floats(s, 1, "velocity")[0]),
        "times": ("times", lambda s: _floats(s, None, "times")),
        "x": ("x_range", lambda s: _x_range(s)),
    },
    "frame": {"point": ("point", lambda s: _floats(s, 2, "point"))},
}


def _bool(s):
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean {s!r}")


def _x_range(s):
    a, b, n = _floats(s, 3, "x")
    if n != int(n) or n < 2:
        raise ConfigError("x: point count must be an integer >= 2")
    return (a, b, int(n))


def _apply(values: dict, section: str, key: str, raw: str):
    section, key = section.strip().lower(), key.strip().lower()
    if section == "family":
        if key == "name":
            values["family"] = raw.strip().lower()
        elif key == "embed":
            values["embed"] = _ints(raw, 1, "embed")[0]
        else:
            values.setdefault("params", {})[key] = raw.strip()
        return
    if section == "tolerances":
        names = {f.name for f in fields(Tolerances)}
        if key not in names:
            raise ConfigError(f"unknown tolerance {key!r}")
        tol = values.setdefault("tolerances", {})
        tol[key] = int(_floats(raw, 1, key)[0]) if key == "sg_samples" else _floats(raw, 1, key)[0]
        return
    try:
        attr, parse = _SCHEMA[section][key]
    except KeyError:
        raise ConfigError(f"unknown setting [{section}] {key}") from None
    values[attr] = parse(raw)


def _finish(values: dict) -> RunConfig:
    values = dict(values)
    if "tolerances" in values:
        values["tolerances"] = Tolerances(**values["tolerances"])
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(text: str = "", overrides=()) -> RunConfig:
    """Parse a config document and ``section.key=value`` overrides."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    values: dict = {}
    for section in cp.sections():
        for key, raw in cp.items(section):
            _apply(values, section, key, raw)
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        lhs, raw = item.split("=", 1)
        section, key = lhs.split(".", 1)
        _apply(values, section, key, raw)
    return _finish(values)


def load_config(path: str | None, overrides=()) -> RunConfig:
    text = ""
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, overrides)
