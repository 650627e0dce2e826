"""One test per acceptance criterion, each at its stated tolerance."""

import io
import time

import numpy as np
import pytest
import yaml

from psiphi.catalog import (S2_MAP, S2_PHI, S2_PSI, S4_PHI1, S4_PHI2, S4_PSI, S4_W1, S4_W2,
                            example_s4)
from psiphi.cli import run
from psiphi.fractal import (IFS, CompactSet, CoupledIFS, apply_ifs, apply_map_set,
                            attractor_solve, coupled_attractor_solve,
                            fractal_contraction_check, hausdorff, union)
from psiphi.maps import CoupledMapSpec, ExtendedPairSpec, SelfMapSpec
from psiphi.piecewise import (PiecewiseFn, check_popescu, check_proinov, max_combine,
                              right_limit)
from psiphi.solver import coupled_solve, extended_solve, verify_contraction
from psiphi.spaces import Space

from conftest import report_criterion, unit_grid

E1 = Space.euclidean(1)


def grid(lo, hi, step=1e-3):
    return CompactSet((lo + np.arange(int(round((hi - lo) / step)) + 1) * step)[:, None])


def test_criterion_01_ifs_attractor():
    t0 = time.perf_counter()
    rep = attractor_solve(example_s4(), CompactSet([[0.0]]), tol=5e-3, resolution=1e-3)
    elapsed = time.perf_counter() - t0
    h = hausdorff(rep.attractor, grid(0, 1))
    ok = rep.converged and h < 5e-3 and rep.iterations < 200 and elapsed < 10
    report_criterion(1, "two-map IFS attractor is [0,1]", ok,
                     f"h={h:.3g} iterations={rep.iterations} time={elapsed:.2f}s")
    assert ok


def test_criterion_02_ifs_algebra():
    ifs = example_s4()
    base = grid(0, 1)
    h1 = hausdorff(apply_map_set(S4_W1, base), grid(0, 2 / 3))
    h2 = hausdorff(apply_map_set(S4_W2, base), grid(2 / 3, 1))
    h3 = hausdorff(apply_ifs(ifs, base), base)
    ok = max(h1, h2, h3) < 2e-3
    report_criterion(2, "w1, w2 and W images of [0,1]", ok, f"h={h1:.3g},{h2:.3g},{h3:.3g}")
    assert ok


def test_criterion_03_dyadic_coupled_fixed_point():
    rep = coupled_solve(S2_MAP, [1.0], [0.25], tol=1e-12)
    x, y = rep.point
    ok = (rep.converged and rep.iterations <= 60 and rep.residual_trace[-1] < 1e-12
          and abs(x[0]) < 1e-12 and abs(y[0]) < 1e-12)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        x0, y0 = (2.0 ** -int(k) for k in rng.integers(0, 41, 2))
        r = coupled_solve(S2_MAP, [x0], [y0], tol=1e-12)
        ok &= r.converged
        worst = max(worst, abs(r.point[0][0]), abs(r.point[1][0]))
    ok &= worst < 1e-12
    report_criterion(3, "dyadic coupled fixed point (0,0)", ok,
                     f"iterations={rep.iterations} worst={worst:.3g}")
    assert ok


def test_criterion_04_condition_suites():
    pairs = [(S2_PSI, S2_PHI), (S4_PSI, S4_PHI1), (S4_PSI, S4_PHI2)]
    ok = all(check_proinov(p, f).passed and check_popescu(p, f).passed for p, f in pairs)
    witnesses = []
    for psi, phi in pairs:
        # swapped roles: the old phi is now psi
        rep = check_proinov(phi, psi)
        w = rep["domination"].witness
        ok &= (not rep.passed) and w is not None and psi(w) >= phi(w)
        ok &= not check_popescu(phi, psi).passed
        witnesses.append(w)
    report_criterion(4, "condition suites pass, swapped pairs fail", ok,
                     "witnesses=" + ",".join(f"{w:g}" for w in witnesses))
    assert ok


def test_criterion_05_contraction_verification():
    r2 = verify_contraction(S2_MAP, S2_PSI, S2_PHI, 10_000, seed=0)
    r4 = verify_contraction(example_s4(), S4_PSI, None, 10_000, seed=0)
    bad = verify_contraction(SelfMapSpec.affine(1.0), PiecewiseFn.identity(),
                             PiecewiseFn.linear(0.5), 10_000, seed=0)
    ok = (r2.passed and r2.violations == 0 and r4.passed and r4.violations == 0
          and not bad.passed and bad.witness is not None)
    report_criterion(5, "sampled contraction inequality", ok,
                     f"dyadic checked={r2.checked} ifs checked={r4.checked} "
                     f"identity violations={bad.violations}")
    assert ok


def _random_set(rng, resolution=1e-3, max_size=32):
    dim = int(rng.integers(1, 4))
    return dim, CompactSet(rng.uniform(-5, 5, (int(rng.integers(1, max_size + 1)), dim)),
                           Space.euclidean(dim), resolution)


def test_criterion_06_hausdorff_metric():
    rng = np.random.default_rng(6)
    ok = True
    for _ in range(1000):
        dim, a = _random_set(rng)
        b, c = (CompactSet(rng.uniform(-5, 5, (int(rng.integers(1, 33)), dim)),
                           Space.euclidean(dim)) for _ in range(2))
        ok &= hausdorff(a, b) == hausdorff(b, a)
        ok &= hausdorff(a, a) <= 1e-12
        ok &= hausdorff(a, b) <= hausdorff(a, c) + hausdorff(c, b) + 1e-12
    union_ok = True
    for _ in range(1000):
        n, dim = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        sp = Space.euclidean(dim)
        As = [CompactSet(rng.uniform(-5, 5, (int(rng.integers(1, 9)), dim)), sp, None)
              for _ in range(n)]
        Bs = [CompactSet(rng.uniform(-5, 5, (int(rng.integers(1, 9)), dim)), sp, None)
              for _ in range(n)]
        union_ok &= (hausdorff(union(As), union(Bs))
                     <= max(hausdorff(a, b) for a, b in zip(As, Bs)) + 1e-12)
    report_criterion(6, "Hausdorff metric axioms and union bound", ok and union_ok)
    assert ok and union_ok


def test_criterion_07_lifted_contraction():
    r1 = fractal_contraction_check(S4_W1, S4_PSI, S4_PHI1, 1000, seed=0)
    r2 = fractal_contraction_check(S4_W2, S4_PSI, S4_PHI2, 1000, seed=0)
    bad = fractal_contraction_check(SelfMapSpec.affine(2.0), PiecewiseFn.identity(),
                                    PiecewiseFn.linear(0.5), 1000, seed=0)
    ok = r1.passed and r2.passed and not bad.passed
    report_criterion(7, "lifted contraction on set pairs", ok,
                     f"checked={r1.checked},{r2.checked} doubling violations={bad.violations}")
    assert ok


def test_criterion_08_max_combine():
    m = max_combine([S4_PHI1, S4_PHI2])
    t = np.random.default_rng(8).uniform(0, 100, 10_000)
    t = t[t > 0]
    exact = bool(np.all(m(t) == np.maximum(S4_PHI1(t), S4_PHI2(t))))
    exact &= all(m(v) == max(S4_PHI1(v), S4_PHI2(v)) for v in t[:1000])
    eps = sorted({0.0, *m.breakpoints, *S4_PHI1.breakpoints, *S4_PHI2.breakpoints})
    limits = all(right_limit(m, e) <= max(right_limit(S4_PHI1, e), right_limit(S4_PHI2, e))
                 for e in eps)
    ok = exact and limits
    report_criterion(8, "max_combine is the exact pointwise max", ok)
    assert ok


def test_criterion_09_extended_solver():
    bil = CoupledMapSpec.bilinear_affine
    rep = extended_solve(ExtendedPairSpec(bil(0, 1 / 3, 2 / 3), bil(1 / 3, 0, 2 / 3)),
                         [0.0], [0.0])
    # oracle: 3x - y = 2, -x + 3y = 2
    oracle = np.linalg.solve([[3, -1], [-1, 3]], [2, 2])
    got = np.concatenate(rep.point)
    err1 = float(np.abs(got - oracle).max())
    rep2 = extended_solve(ExtendedPairSpec(bil(1 / 3, 0), bil(0, 1 / 3, 2 / 3)), [5.0], [5.0])
    err2 = float(np.abs(np.concatenate(rep2.point) - [0, 1]).max())
    ok = rep.converged and rep2.converged and err1 < 1e-10 and err2 < 1e-10
    report_criterion(9, "extended coupled solver", ok, f"err={err1:.3g},{err2:.3g}")
    assert ok


def test_criterion_10_coupled_reduction():
    bil = CoupledMapSpec.bilinear_affine
    cifs = CoupledIFS([bil(1 / 3, 0), bil(1 / 3, 0, 2 / 3)])
    tol = 5e-3
    rep = coupled_attractor_solve(cifs, None, tol=tol, resolution=1e-3)
    plain = attractor_solve(cifs.induced(), None, tol=tol, resolution=1e-3)
    a, b = rep.attractor
    h = max(hausdorff(a, plain.attractor), hausdorff(b, plain.attractor))
    ok = rep.converged and plain.converged and h <= 2 * tol
    report_criterion(10, "coupled IFS reduces to the Cantor IFS", ok, f"h={h:.3g}")
    assert ok


def _cli(tmp_path, tag, command, doc, files=()):
    cfg = tmp_path / f"{tag}.yaml"
    cfg.write_text(yaml.safe_dump(doc))
    csv = tmp_path / f"{tag}.csv"
    out, err = io.StringIO(), io.StringIO()
    argv = [command, *files, "--config", str(cfg), "--seed", "7"]
    if command != "hausdorff":
        argv += ["--out", str(csv)]
    code = run(argv, out, err)
    data = csv.read_bytes() if csv.exists() else b""
    extra = b"".join(p.read_bytes() for p in sorted(tmp_path.glob(f"{tag}_*.csv")))
    return code, out.getvalue(), data + extra


def test_criterion_11_determinism(tmp_path):
    s2 = {"maps": [{"builtin": "example-s2-dyadic"}], "solver": {"tol": 1e-12, "x0": 1,
                                                                 "y0": "1/4"}}
    s4 = {"maps": [{"builtin": "example-s4-ifs"}], "solver": {"a0": [[0]]}}
    ext = {"space": {"left": {"kind": "euclidean", "dim": 1},
                     "right": {"kind": "euclidean", "dim": 1}},
           "maps": [{"kind": "bilinear_affine", "a": 0, "b": 1 / 3, "c": 2 / 3},
                    {"kind": "bilinear_affine", "a": 1 / 3, "b": 0, "c": 2 / 3}],
           "solver": {"x0": 0, "y0": 0}}
    cantor = {"maps": [{"kind": "bilinear_affine", "a": 1 / 3, "b": 0},
                       {"kind": "bilinear_affine", "a": 1 / 3, "b": 0, "c": 2 / 3}]}
    plain = {"maps": [{"kind": "affine", "A": [[0.5]], "c": [1]}], "solver": {"x0": [0]}}
    (tmp_path / "p.csv").write_text("0\n1\n")
    (tmp_path / "q.csv").write_text("0.25\n")
    jobs = [("check", s2, ()), ("check", s4, ()), ("solve", plain, ()),
            ("solve-coupled", s2, ()), ("solve-extended", ext, ()), ("attractor", s4, ()),
            ("coupled-attractor", cantor, ()),
            ("hausdorff", {}, (str(tmp_path / "p.csv"), str(tmp_path / "q.csv")))]
    ok = True
    for i, (cmd, doc, files) in enumerate(jobs):
        runs = []
        for k in (0, 1):
            workdir = tmp_path / f"r{k}"
            workdir.mkdir(exist_ok=True)
            runs.append(_cli(workdir, f"job{i}", cmd, doc, files))
        ok &= runs[0] == runs[1] and runs[0][0] == 0
    report_criterion(11, "identical config and seed give identical output", ok,
                     f"commands={len(jobs)}")
    assert ok
