"""Command-line front end.

Exit codes: 0 success / converged, 1 usage or config error, 2 a condition
failed, 3 the iteration budget ran out.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .fractal import (DEFAULT_SET_MAX_ITER, DEFAULT_SET_TOL, IFS, CompactSet, CoupledIFS,
                      attractor_solve, coupled_attractor_solve, directed_distance)
from .io import format_float, read_cloud_csv, write_cloud_csv, write_pgm
from .piecewise import FAIL, HEURISTIC_FAIL, HEURISTIC_PASS, check_popescu, check_proinov
from .solver import (DEFAULT_MAX_ITER, DEFAULT_TOL, coupled_solve, extended_solve,
                     picard_solve, verify_contraction)
from .spaces import Space

EXIT_OK, EXIT_USAGE, EXIT_CONDITION, EXIT_NOT_CONVERGED = 0, 1, 2, 3
COMMANDS = ("check", "solve", "solve-coupled", "solve-extended", "attractor",
            "coupled-attractor", "hausdorff")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="psiphi", description="(psi, phi)-contraction fixed points and "
                     "fractal attractors")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("files", nargs="*", help="two CSV clouds for 'hausdorff'")
    parser.add_argument("--config", help="YAML/JSON run configuration")
    parser.add_argument("--out", help="CSV output path (overrides output.csv)")
    parser.add_argument("--raster", help="PGM raster path (overrides output.raster)")
    parser.add_argument("--seed", type=int, help="sampling seed (overrides solver.seed)")
    return parser


def _emit(out, **fields) -> None:
    parts = []
    for k, v in fields.items():
        if isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, (float, np.floating)):
            v = format_float(v)
        parts.append(f"{k}={v}")
    out.write(" ".join(parts) + "\n")


def _coords(value, field_name: str) -> list[float]:
    items = value if isinstance(value, (list, tuple)) else [value]
    try:
        return [float(Fraction(str(v))) for v in items]
    except (ValueError, ZeroDivisionError):
        raise ConfigError(field_name, f"cannot read coordinates from {value!r}") from None


def _point_text(p) -> str:
    return ",".join(format_float(v) for v in np.ravel(p))


def _require(cfg: RunConfig, attr: str, field_name: str):
    value = getattr(cfg, attr)
    if value is None or value == []:
        raise ConfigError(field_name, "required for this command")
    return value


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _condition_rows(out, label: dict, reports) -> bool:
    failed = False
    for rep in reports:
        for c in rep.conditions:
            status = c.status.upper()
            if c.status in (HEURISTIC_PASS, HEURISTIC_FAIL):
                status = "HEURISTIC" if c.status == HEURISTIC_PASS else "HEURISTIC-FAIL"
            fields = dict(label, theorem=rep.theorem, condition=c.key, status=status)
            if c.witness is not None:
                fields["witness"] = float(c.witness)
            _emit(out, **fields)
            failed |= c.status == FAIL
    return failed


def cmd_check(cfg: RunConfig, out) -> int:
    psi = _require(cfg, "psi", "psi")
    _require(cfg, "phis", "phi")
    maps = _require(cfg, "maps", "maps")
    failed = False
    seed = cfg.seed

    def conditions(label, phi):
        reps = [check_proinov(psi, phi),
                check_popescu(psi, phi, assume_closed_graph=cfg.assume_closed_graph, seed=seed)]
        return _condition_rows(out, label, reps)

    def contraction(label, target, phi):
        rep = verify_contraction(target, psi, phi, cfg.samples, seed)
        fields = dict(label, theorem="contraction", condition="sampled",
                      status="PASS" if rep.passed else "FAIL", checked=rep.checked,
                      violations=rep.violations)
        if rep.witness is not None:
            fields["witness_index"] = rep.witness["index"]
            fields["witness_psi"] = rep.witness["psi"]
            fields["witness_phi"] = rep.witness["phi"]
        _emit(out, **fields)
        return not rep.passed

    if cfg.self_maps and len(cfg.self_maps) == len(maps):
        for i, w in enumerate(maps):
            phi = cfg.phi_for(i)
            label = {"map": i}
            failed |= conditions(label, phi)
            failed |= contraction(label, w, phi)
    elif len(maps) == 1 and cfg.coupled_maps:
        phi = cfg.phi_for(0)
        failed |= conditions({"map": 0}, phi)
        failed |= contraction({"map": 0}, maps[0], phi)
    elif len(maps) == 2 and len(cfg.coupled_maps) == 2:
        pair = cfg.extended_pair()
        phis = [cfg.phi_for(0), cfg.phi_for(1)]
        for i, phi in enumerate(phis):
            failed |= conditions({"map": i}, phi)
        failed |= contraction({"map": "T,S"}, pair, phis)
    else:
        raise ConfigError("maps", "cannot mix self maps and coupled maps")
    _emit(out, result="FAIL" if failed else "PASS")
    return EXIT_CONDITION if failed else EXIT_OK


def _solve_common(cfg: RunConfig, out):
    tol = cfg.tol if cfg.tol is not None else DEFAULT_TOL
    max_iter = cfg.max_iter if cfg.max_iter is not None else DEFAULT_MAX_ITER
    cb = (lambda n, r: _emit(out, iter=n, residual=r)) if cfg.verbosity >= 1 else None
    phi = cfg.phis if len(cfg.phis) > 1 else (cfg.phis[0] if cfg.phis else None)
    return tol, max_iter, cb, phi


def _finish_solve(cfg, report, out, args, names) -> int:
    fields = {"converged": report.converged, "iterations": report.iterations}
    if report.residual_trace:
        fields["residual"] = report.residual_trace[-1]
    point = report.point if isinstance(report.point, tuple) else (report.point,)
    for name, p in zip(names, point):
        fields[name] = _point_text(p)
    if report.conditions_verified is not None:
        fields["conditions"] = "verified" if report.conditions_verified else "unverified"
    _emit(out, **fields)
    path = args.out or cfg.csv
    if path:
        write_cloud_csv(path, np.concatenate([np.ravel(p) for p in point]).reshape(1, -1))
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_solve(cfg: RunConfig, mode: str, out, args) -> int:
    tol, max_iter, cb, phi = _solve_common(cfg, out)
    psi = cfg.psi
    if mode == "plain":
        if len(cfg.maps) != 1 or not cfg.self_maps:
            raise ConfigError("maps", "solve needs exactly one self map")
        x0 = _coords(_require(cfg, "x0", "solver.x0"), "solver.x0")
        rep = picard_solve(cfg.maps[0], x0, tol, max_iter, psi, phi,
                           cfg.assume_closed_graph, cb)
        return _finish_solve(cfg, rep, out, args, ["x"])
    x0 = _coords(_require(cfg, "x0", "solver.x0"), "solver.x0")
    y0 = _coords(_require(cfg, "y0", "solver.y0"), "solver.y0")
    if mode == "coupled":
        if len(cfg.maps) != 1 or not cfg.coupled_maps:
            raise ConfigError("maps", "solve-coupled needs exactly one coupled map")
        rep = coupled_solve(cfg.maps[0], x0, y0, tol, max_iter, psi, phi,
                            cfg.assume_closed_graph, cb)
    else:
        rep = extended_solve(cfg.extended_pair(), x0, y0, tol, max_iter, psi, phi,
                             cfg.assume_closed_graph, cb)
    return _finish_solve(cfg, rep, out, args, ["x", "y"])


def _raster_target(space: Space, path, cloud: np.ndarray, width: int) -> None:
    if space.is_dyadic:
        raise ConfigError("output.raster", "rasters are not available for the dyadic space")
    if cloud.shape[1] > 2:
        raise ConfigError("output.raster", "rasters are available for 1-D and 2-D spaces only")
    write_pgm(path, cloud, width)


def cmd_attractor(cfg: RunConfig, coupled: bool, out, args) -> int:
    tol = cfg.tol if cfg.tol is not None else DEFAULT_SET_TOL
    max_iter = cfg.max_iter if cfg.max_iter is not None else DEFAULT_SET_MAX_ITER
    raster = args.raster or cfg.raster
    cb = ((lambda n, h, m: _emit(out, iter=n, hausdorff=h, points=m))
          if cfg.verbosity >= 1 else None)
    phis = cfg.phis if cfg.phis else None
    _require(cfg, "maps", "maps")
    if tol <= 2 * cfg.resolution:
        raise ConfigError("solver.tol", f"must exceed 2 * resolution ({2 * cfg.resolution})")
    if coupled:
        if len(cfg.coupled_maps) != len(cfg.maps):
            raise ConfigError("maps", "coupled-attractor needs coupled maps only")
        if phis is not None and len(phis) == 1:
            phis = phis * len(cfg.maps)
        cifs = CoupledIFS(cfg.maps, cfg.psi, phis)
        space = cifs.space
        if raster and space.is_dyadic:
            raise ConfigError("output.raster", "rasters are not available for the dyadic space")
        c0 = None
        if cfg.a0 is not None:
            c0 = np.array([_coords(p, "solver.a0") for p in cfg.a0])
        rep = coupled_attractor_solve(cifs, c0, tol, max_iter, cfg.resolution, cb)
        a_star, b_star = rep.attractor
        _emit(out, converged=rep.converged, iterations=rep.iterations,
              points=len(rep.pair_cloud), points_a=len(a_star), points_b=len(b_star),
              fixed_pair_residual=rep.fixed_pair_residual)
        path = Path(args.out or cfg.csv or "coupled_attractor.csv")
        write_cloud_csv(path, rep.pair_cloud.points)
        write_cloud_csv(path.with_name(path.stem + "_a.csv"), a_star.points)
        write_cloud_csv(path.with_name(path.stem + "_b.csv"), b_star.points)
        if raster:
            cloud = rep.pair_cloud.points if rep.pair_cloud.points.shape[1] <= 2 else a_star.points
            _raster_target(space, raster, cloud, cfg.raster_width)
    else:
        if len(cfg.self_maps) != len(cfg.maps):
            raise ConfigError("maps", "attractor needs self maps only")
        if phis is not None and len(phis) == 1:
            phis = phis * len(cfg.maps)
        ifs = IFS(cfg.maps, cfg.psi, phis)
        if raster and ifs.space.is_dyadic:
            raise ConfigError("output.raster", "rasters are not available for the dyadic space")
        a0 = None
        if cfg.a0 is not None:
            a0 = np.array([_coords(p, "solver.a0") for p in cfg.a0])
        rep = attractor_solve(ifs, a0, tol, max_iter, cfg.resolution, cb)
        _emit(out, converged=rep.converged, iterations=rep.iterations,
              points=len(rep.attractor))
        write_cloud_csv(args.out or cfg.csv or "attractor.csv", rep.attractor.points)
        if raster:
            _raster_target(ifs.space, raster, rep.attractor.points, cfg.raster_width)
    if rep.condition_reports and cfg.verbosity >= 1:
        verified = all(r.passed for r in rep.condition_reports)
        _emit(out, conditions="verified" if verified else "unverified")
    return EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


def cmd_hausdorff(cfg: RunConfig | None, files, out) -> int:
    if len(files) != 2:
        raise UsageError("hausdorff takes exactly two CSV files")
    try:
        A, B = read_cloud_csv(files[0]), read_cloud_csv(files[1])
    except OSError as exc:
        raise UsageError(f"cannot read point cloud: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if A.shape[1] != B.shape[1]:
        raise UsageError("the two clouds have different dimensions")
    space = cfg.space if cfg is not None and cfg.space is not None else Space.euclidean(A.shape[1])
    try:
        a, b = CompactSet(A, space, None), CompactSet(B, space, None)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    dab, dba = directed_distance(a, b), directed_distance(b, a)
    _emit(out, directed_ab=dab, directed_ba=dba, hausdorff=max(dab, dba))
    return EXIT_OK


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = None
        if args.config:
            cfg = load_config(args.config)
        elif args.command != "hausdorff":
            raise UsageError("--config is required")
        if cfg is not None and args.seed is not None:
            cfg.seed = args.seed
        if args.files and args.command != "hausdorff":
            raise UsageError(f"unexpected arguments: {' '.join(args.files)}")
        if args.command == "check":
            return cmd_check(cfg, out)
        if args.command == "solve":
            return cmd_solve(cfg, "plain", out, args)
        if args.command == "solve-coupled":
            return cmd_solve(cfg, "coupled", out, args)
        if args.command == "solve-extended":
            return cmd_solve(cfg, "extended", out, args)
        if args.command == "attractor":
            return cmd_attractor(cfg, False, out, args)
        if args.command == "coupled-attractor":
            return cmd_attractor(cfg, True, out, args)
        return cmd_hausdorff(cfg, args.files, out)
    except (ConfigError, UsageError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        # contract violations surfaced by the library (bad start point, bad tol, ...)
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
