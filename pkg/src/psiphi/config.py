"""Run configuration: a YAML (or JSON) document with a fixed schema.

Sections::

    space:   {kind: euclidean|dyadic, dim: 1}      # or {left: {...}, right: {...}}
    psi:     [{start, slope, intercept}, ...]      # or a builtin name
    phi:     [[{start, slope, intercept}, ...], ...]  # one list per map (a single list is shared)
    maps:    [{builtin: example-s4-ifs} | {kind: affine, A, c} | ...]
    solver:  {tol, max_iter, resolution, seed, samples, x0, y0, a0}
    output:  {csv, raster, raster_width, verbosity}
    assume_closed_graph: false

Map kinds: ``affine`` (A, c), ``abs_affine_1d`` (branches: list of
{region: nonneg|neg, slope, intercept}), ``dyadic_halving``,
``bilinear_affine`` (a, b, c), ``dyadic_min``; or ``builtin: <name>``.
A system builtin (``example-s2-dyadic``, ``example-s4-ifs``) also supplies
the space and control functions unless the document overrides them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import catalog
from .maps import CoupledMapSpec, ExtendedPairSpec, SelfMapSpec
from .piecewise import PiecewiseFn
from .spaces import Space

SECTIONS = {"space", "psi", "phi", "maps", "solver", "output", "assume_closed_graph"}
SOLVER_KEYS = {"tol", "max_iter", "resolution", "seed", "samples", "x0", "y0", "a0"}
OUTPUT_KEYS = {"csv", "raster", "raster_width", "verbosity"}


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field {field_name!r}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    space: Space | None = None
    right_space: Space | None = None
    psi: PiecewiseFn | None = None
    phis: list[PiecewiseFn] = field(default_factory=list)
    maps: list = field(default_factory=list)
    builtin: str | None = None
    tol: float | None = None
    max_iter: int | None = None
    resolution: float = 1e-3
    seed: int = 0
    samples: int = 10_000
    x0: list | None = None
    y0: list | None = None
    a0: list | None = None
    csv: str | None = None
    raster: str | None = None
    raster_width: int = 800
    verbosity: int = 1
    assume_closed_graph: bool = False

    @property
    def self_maps(self) -> list[SelfMapSpec]:
        return [m for m in self.maps if isinstance(m, SelfMapSpec)]

    @property
    def coupled_maps(self) -> list[CoupledMapSpec]:
        return [m for m in self.maps if isinstance(m, CoupledMapSpec)]

    def phi_for(self, i: int) -> PiecewiseFn:
        if not self.phis:
            raise ConfigError("phi", "required for this command")
        if len(self.phis) == 1:
            return self.phis[0]
        if i >= len(self.phis):
            raise ConfigError("phi", f"no entry for map {i}")
        return self.phis[i]

    def extended_pair(self) -> ExtendedPairSpec:
        cm = self.coupled_maps
        if len(cm) != 2 or len(self.maps) != 2:
            raise ConfigError("maps", "an extended solve needs exactly two coupled maps (T, S)")
        try:
            return ExtendedPairSpec(cm[0], cm[1])
        except ValueError as exc:
            raise ConfigError("maps", str(exc)) from None


def _piecewise(value, name: str) -> PiecewiseFn:
    if isinstance(value, str):
        table = {"example-s2-dyadic": catalog.S2_PSI, "example-s4-ifs": catalog.S4_PSI}
        if name == "psi" and value in table:
            return table[value]
        raise ConfigError(name, f"unknown builtin function {value!r}")
    if not isinstance(value, list) or not value:
        raise ConfigError(name, "expected a nonempty list of {start, slope, intercept}")
    try:
        return PiecewiseFn(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(name, str(exc)) from None


def _space(value, name="space") -> Space:
    if not isinstance(value, dict):
        raise ConfigError(name, "expected a mapping {kind, dim}")
    try:
        return Space.from_dict(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(name, str(exc)) from None


def _map(entry, i: int, cfg: RunConfig):
    where = f"maps[{i}]"
    if not isinstance(entry, dict):
        raise ConfigError(where, "expected a mapping")
    left = cfg.space or Space.euclidean(1)
    right = cfg.right_space or left
    try:
        if "builtin" in entry:
            name = entry["builtin"]
            if name in catalog.BUILTIN_SELF_MAPS:
                return [catalog.BUILTIN_SELF_MAPS[name]()]
            if name in catalog.BUILTIN_COUPLED_MAPS:
                return [catalog.BUILTIN_COUPLED_MAPS[name]()]
            if name == "example-s4-ifs":
                return list(catalog.example_s4().maps)
            raise ConfigError(where, f"unknown builtin {name!r}")
        kind = entry.get("kind")
        if kind == "affine":
            return [SelfMapSpec.affine(entry["A"], entry.get("c", 0.0), left)]
        if kind == "abs_affine_1d":
            branches = [(b["region"], b["slope"], b["intercept"]) for b in entry["branches"]]
            return [SelfMapSpec.abs_affine_1d(branches, left)]
        if kind == "dyadic_halving":
            return [SelfMapSpec.dyadic_halving()]
        if kind == "bilinear_affine":
            # in an X x Y setting the second map (S) lands in Y
            codomain = right if (cfg.right_space is not None and i == 1) else left
            return [CoupledMapSpec.bilinear_affine(entry["a"], entry["b"], entry.get("c", 0.0),
                                                   left, right, codomain)]
        if kind == "dyadic_min":
            return [CoupledMapSpec.dyadic_min()]
        raise ConfigError(where, f"unknown map kind {kind!r}")
    except KeyError as exc:
        raise ConfigError(f"{where}.{exc.args[0]}", "missing") from None
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(where, str(exc)) from None


def _number(section: dict, key: str, cast, where: str):
    try:
        return cast(section[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key}", f"expected {cast.__name__}") from None


def parse_config(doc) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a mapping")
    unknown = set(doc) - SECTIONS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown section")
    cfg = RunConfig()

    raw_maps = doc.get("maps", [])
    if not isinstance(raw_maps, list):
        raise ConfigError("maps", "expected a list")
    builtins = [m["builtin"] for m in raw_maps
                if isinstance(m, dict) and m.get("builtin") in catalog.BUILTIN_SYSTEMS]
    if builtins:
        cfg.builtin = builtins[0]
        if cfg.builtin == "example-s2-dyadic":
            ex = catalog.example_s2()
            cfg.space, cfg.psi, cfg.phis = ex["space"], ex["psi"], [ex["phi"]]
        else:
            ifs = catalog.example_s4()
            cfg.space, cfg.psi, cfg.phis = ifs.space, ifs.psi, list(ifs.phis)

    if "space" in doc:
        sp = doc["space"]
        if isinstance(sp, dict) and "left" in sp:
            cfg.space = _space(sp["left"], "space.left")
            cfg.right_space = _space(sp.get("right", sp["left"]), "space.right")
        else:
            cfg.space = _space(sp)
    if "psi" in doc:
        cfg.psi = _piecewise(doc["psi"], "psi")
    if "phi" in doc:
        phi = doc["phi"]
        if isinstance(phi, list) and phi and all(isinstance(p, list) for p in phi):
            cfg.phis = [_piecewise(p, f"phi[{i}]") for i, p in enumerate(phi)]
        else:
            cfg.phis = [_piecewise(phi, "phi")]

    for i, entry in enumerate(raw_maps):
        cfg.maps.extend(_map(entry, i, cfg))

    solver = doc.get("solver", {}) or {}
    if not isinstance(solver, dict):
        raise ConfigError("solver", "expected a mapping")
    bad = set(solver) - SOLVER_KEYS
    if bad:
        raise ConfigError(f"solver.{sorted(bad)[0]}", "unknown field")
    if "tol" in solver:
        cfg.tol = _number(solver, "tol", float, "solver")
        if not cfg.tol > 0:
            raise ConfigError("solver.tol", "must be positive")
    if "max_iter" in solver:
        cfg.max_iter = _number(solver, "max_iter", int, "solver")
        if cfg.max_iter < 0:
            raise ConfigError("solver.max_iter", "must be nonnegative")
    if "resolution" in solver:
        cfg.resolution = _number(solver, "resolution", float, "solver")
        if not cfg.resolution > 0:
            raise ConfigError("solver.resolution", "must be positive")
    if "seed" in solver:
        cfg.seed = _number(solver, "seed", int, "solver")
    if "samples" in solver:
        cfg.samples = _number(solver, "samples", int, "solver")
        if cfg.samples < 1:
            raise ConfigError("solver.samples", "must be at least 1")
    for key in ("x0", "y0", "a0"):
        if key in solver:
            setattr(cfg, key, solver[key])

    output = doc.get("output", {}) or {}
    if not isinstance(output, dict):
        raise ConfigError("output", "expected a mapping")
    bad = set(output) - OUTPUT_KEYS
    if bad:
        raise ConfigError(f"output.{sorted(bad)[0]}", "unknown field")
    cfg.csv = output.get("csv")
    cfg.raster = output.get("raster")
    if "raster_width" in output:
        cfg.raster_width = _number(output, "raster_width", int, "output")
    if "verbosity" in output:
        cfg.verbosity = _number(output, "verbosity", int, "output")

    flag = doc.get("assume_closed_graph", False)
    if not isinstance(flag, bool):
        raise ConfigError("assume_closed_graph", "expected true or false")
    cfg.assume_closed_graph = flag
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML/JSON: {exc}") from None
    return parse_config(doc)
