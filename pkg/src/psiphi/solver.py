"""Contraction verification and the Picard engines (plain, coupled, extended)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .maps import CoupledMapSpec, ExtendedPairSpec, SelfMapSpec
from .piecewise import (ConditionReport, PiecewiseFn, check_popescu, check_proinov,
                        max_combine)
from .rng import SplitMix64
from .spaces import ProductSpace, Space, norm

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
SAMPLE_BOX = 10.0
DYADIC_SAMPLE_EXPONENT = 40
# relative slack on psi(image) <= phi(input); absorbs rounding where the
# inequality is tight (e.g. psi(2t/3) = phi(t) on a whole piece)
COMPARE_RTOL = 1e-12


@dataclass
class SolveReport:
    converged: bool
    point: object
    iterations: int
    residual_trace: list[float]
    scheme: str = "picard"
    condition_report: ConditionReport | None = None
    popescu_report: ConditionReport | None = None

    @property
    def conditions_verified(self) -> bool | None:
        """None when no control functions were supplied."""
        if self.condition_report is None:
            return None
        if self.condition_report.passed:
            return True
        return bool(self.popescu_report is not None and self.popescu_report.passed)


@dataclass
class VerifyReport:
    passed: bool
    checked: int
    skipped: int
    violations: int
    witness: dict | None = None
    details: list["VerifyReport"] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Picard iteration
# ---------------------------------------------------------------------------

def _check_stopping(tol: float, max_iter: int) -> None:
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if int(max_iter) != max_iter or max_iter < 0:
        raise ValueError(f"max_iter must be a nonnegative integer, got {max_iter}")


def picard_iterate(step: Callable, distance: Callable, start, tol: float = DEFAULT_TOL,
                   max_iter: int = DEFAULT_MAX_ITER, callback: Callable | None = None):
    """Iterate ``x <- step(x)`` until ``distance(x, step(x)) < tol``.

    Returns ``(point, iterations, residual_trace, converged)``.  A start that
    is already fixed (first move exactly 0) counts as zero iterations.
    ``callback(n, residual)`` is invoked after every counted iteration.
    """
    _check_stopping(tol, max_iter)
    x = start
    trace: list[float] = []
    for n in range(1, int(max_iter) + 1):
        nxt = step(x)
        r = float(distance(x, nxt))
        if n == 1 and r == 0.0:
            return x, 0, trace, True
        trace.append(r)
        x = nxt
        if callback is not None:
            callback(n, r)
        if r < tol:
            return x, n, trace, True
    return x, len(trace), trace, False


def _conditions(psi, phi, assume_closed_graph):
    if psi is None or phi is None:
        return None, None
    if not isinstance(phi, PiecewiseFn):
        phi = max_combine(list(phi))
    proinov = check_proinov(psi, phi)
    popescu = None
    if not proinov.passed:
        popescu = check_popescu(psi, phi, assume_closed_graph=assume_closed_graph)
    return proinov, popescu


def picard_solve(w: SelfMapSpec, x0, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER, psi: PiecewiseFn | None = None,
                 phi: PiecewiseFn | None = None, assume_closed_graph: bool = False,
                 callback: Callable | None = None) -> SolveReport:
    """Run ``x_{n+1} = w(x_n)`` from ``x0``.

    When ``psi`` and ``phi`` are given the fixed point hypotheses are checked
    first and embedded in the report; solving proceeds either way.
    """
    proinov, popescu = _conditions(psi, phi, assume_closed_graph)
    space = w.domain
    point, n, trace, ok = picard_iterate(w, space.dist, space.point(x0), tol, max_iter, callback)
    return SolveReport(ok, point, n, trace, "picard", proinov, popescu)


def coupled_step(T: CoupledMapSpec) -> Callable:
    """The product-space self map ``(x, y) -> (T(x, y), T(y, x))``."""
    def step(z):
        x, y = z
        return T(x, y), T(y, x)
    return step


def coupled_solve(T: CoupledMapSpec, x0, y0, tol: float = DEFAULT_TOL,
                  max_iter: int = DEFAULT_MAX_ITER, psi=None, phi=None,
                  assume_closed_graph: bool = False, callback=None) -> SolveReport:
    """Find ``(x*, y*)`` with ``x* = T(x*, y*)`` and ``y* = T(y*, x*)``."""
    if T.left != T.right or T.codomain != T.left:
        raise ValueError("a coupled map must send X x X into X")
    proinov, popescu = _conditions(psi, phi, assume_closed_graph)
    prod = ProductSpace(T.left, T.left)
    start = prod.pair((x0, y0))
    point, n, trace, ok = picard_iterate(coupled_step(T), prod.dist, start, tol, max_iter,
                                         callback)
    return SolveReport(ok, point, n, trace, "coupled", proinov, popescu)


def extended_step(pair: ExtendedPairSpec) -> Callable:
    """``F_TS(x, y) = (T(x, y), S(x, y))``; both coordinates use the previous pair."""
    T, S = pair.t_map, pair.s_map

    def step(z):
        x, y = z
        return T(x, y), S(x, y)
    return step


def extended_solve(pair: ExtendedPairSpec, x0, y0, tol: float = DEFAULT_TOL,
                   max_iter: int = DEFAULT_MAX_ITER, psi=None, phi=None,
                   assume_closed_graph: bool = False, callback=None) -> SolveReport:
    """Find ``(x*, y*)`` with ``x* = T(x*, y*)`` and ``y* = S(x*, y*)``.

    ``phi`` may be a single function or the pair ``(phi1, phi2)`` bounding
    ``T`` and ``S`` separately; the pair is combined by pointwise maximum.
    """
    proinov, popescu = _conditions(psi, phi, assume_closed_graph)
    prod = pair.space
    start = prod.pair((x0, y0))
    point, n, trace, ok = picard_iterate(extended_step(pair), prod.dist, start, tol, max_iter,
                                         callback)
    return SolveReport(ok, point, n, trace, "extended", proinov, popescu)


# ---------------------------------------------------------------------------
# contraction verification by sampling
# ---------------------------------------------------------------------------

def sample_points(space: Space, n: int, rng: SplitMix64) -> np.ndarray:
    """Draw ``n`` points: uniform box for R^d, random exponents (or 0) for the dyadic set."""
    out = np.empty((n, space.dim))
    if space.is_dyadic:
        for i in range(n):
            k = rng.integers(DYADIC_SAMPLE_EXPONENT + 2)
            out[i, 0] = 0.0 if k > DYADIC_SAMPLE_EXPONENT else 2.0 ** -k
    else:
        for i in range(n):
            for j in range(space.dim):
                out[i, j] = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX)
    return out


def _rowdist(space: Space, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return norm(A - B)


def _violations(psi, phi, image, inputs):
    """Indices where ``psi(image) > phi(inputs)`` among rows with ``image > 0``."""
    active = image > 0
    lhs = np.full(image.shape, -np.inf)
    rhs = np.full(image.shape, np.inf)
    if np.any(active):
        lhs[active] = psi(image[active])
        rhs[active] = phi(inputs[active])
    slack = COMPARE_RTOL * np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    bad = active & (lhs > rhs + np.where(active, slack, 0.0))
    return active, bad, lhs, rhs


def _report(active_any, bad_rows, build_witness, samples) -> VerifyReport:
    checked = int(np.count_nonzero(active_any))
    viol = int(np.count_nonzero(bad_rows))
    witness = None
    if viol:
        witness = build_witness(int(np.flatnonzero(bad_rows)[0]))
    return VerifyReport(viol == 0, checked, samples - checked, viol, witness)


def _verify_self(w: SelfMapSpec, psi, phi, samples, rng) -> VerifyReport:
    space = w.domain
    X = sample_points(space, samples, rng)
    Y = sample_points(space, samples, rng)
    image = _rowdist(space, w.apply(X), w.apply(Y))
    inputs = _rowdist(space, X, Y)
    active, bad, lhs, rhs = _violations(psi, phi, image, inputs)

    def witness(i):
        return {"index": i, "x": X[i].tolist(), "y": Y[i].tolist(),
                "image_distance": float(image[i]), "distance": float(inputs[i]),
                "psi": float(lhs[i]), "phi": float(rhs[i])}
    return _report(active, bad, witness, samples)


def _verify_coupled(T: CoupledMapSpec, psi, phi, samples, rng) -> VerifyReport:
    space = T.left
    X, Y = sample_points(space, samples, rng), sample_points(space, samples, rng)
    U, V = sample_points(space, samples, rng), sample_points(space, samples, rng)
    inputs = np.maximum(_rowdist(space, X, U), _rowdist(space, Y, V))
    forward = _rowdist(space, T.apply(X, Y), T.apply(U, V))
    swapped = _rowdist(space, T.apply(Y, X), T.apply(V, U))
    a1, b1, l1, r1 = _violations(psi, phi, forward, inputs)
    a2, b2, l2, r2 = _violations(psi, phi, swapped, inputs)

    def witness(i):
        which, lhs, rhs, img = ("T(x,y)", l1, r1, forward) if b1[i] else \
            ("T(y,x)", l2, r2, swapped)
        return {"index": i, "z": [X[i].tolist(), Y[i].tolist()],
                "w": [U[i].tolist(), V[i].tolist()], "image": which,
                "image_distance": float(img[i]), "distance": float(inputs[i]),
                "psi": float(lhs[i]), "phi": float(rhs[i])}
    return _report(a1 | a2, b1 | b2, witness, samples)


def _verify_extended(pair: ExtendedPairSpec, psi, phis, samples, rng) -> VerifyReport:
    T, S = pair.t_map, pair.s_map
    Xs, Ys = T.left, T.right
    X, Y = sample_points(Xs, samples, rng), sample_points(Ys, samples, rng)
    U, V = sample_points(Xs, samples, rng), sample_points(Ys, samples, rng)
    inputs = np.maximum(_rowdist(Xs, X, U), _rowdist(Ys, Y, V))
    dT = _rowdist(Xs, T.apply(X, Y), T.apply(U, V))
    dS = _rowdist(Ys, S.apply(X, Y), S.apply(U, V))
    a1, b1, l1, r1 = _violations(psi, phis[0], dT, inputs)
    a2, b2, l2, r2 = _violations(psi, phis[1], dS, inputs)

    def witness(i):
        which, lhs, rhs, img = ("T", l1, r1, dT) if b1[i] else ("S", l2, r2, dS)
        return {"index": i, "z": [X[i].tolist(), Y[i].tolist()],
                "w": [U[i].tolist(), V[i].tolist()], "image": which,
                "image_distance": float(img[i]), "distance": float(inputs[i]),
                "psi": float(lhs[i]), "phi": float(rhs[i])}
    return _report(a1 | a2, b1 | b2, witness, samples)


def verify_contraction(map_, psi: PiecewiseFn, phi, samples: int = 10_000,
                       seed: int = 0) -> VerifyReport:
    """Sample the contraction inequality ``psi(d(image)) <= phi(d(input))``.

    ``map_`` may be a :class:`SelfMapSpec`, a :class:`CoupledMapSpec`, an
    :class:`ExtendedPairSpec` (``phi`` may then be ``(phi1, phi2)``) or an
    IFS (one ``phi`` per map, taken from the IFS when ``phi`` is None).
    Pairs whose image distance is 0 are skipped.  The witness is the
    violating sample with the smallest index.
    """
    if int(samples) < 1:
        raise ValueError("samples must be at least 1")
    rng = SplitMix64(seed)
    if isinstance(map_, SelfMapSpec):
        return _verify_self(map_, psi, phi, int(samples), rng)
    if isinstance(map_, CoupledMapSpec):
        if map_.left != map_.right or map_.codomain != map_.left:
            raise ValueError("coupled map must send X x X into X")
        return _verify_coupled(map_, psi, phi, int(samples), rng)
    if isinstance(map_, ExtendedPairSpec):
        phis = [phi, phi] if isinstance(phi, PiecewiseFn) else list(phi)
        if len(phis) != 2:
            raise ValueError("an extended pair takes one phi or a pair (phi1, phi2)")
        return _verify_extended(map_, psi, phis, int(samples), rng)
    if hasattr(map_, "maps") and hasattr(map_, "phis"):
        return _verify_system(map_, psi, phi, int(samples), seed)
    raise TypeError(f"cannot verify a contraction for {type(map_).__name__}")


def _verify_system(ifs, psi, phis, samples, seed) -> VerifyReport:
    psi = psi if psi is not None else ifs.psi
    phis: Sequence = ifs.phis if phis is None else phis
    if isinstance(phis, PiecewiseFn):
        phis = [phis] * len(ifs.maps)
    parts = []
    for i, (w, phi_i) in enumerate(zip(ifs.maps, phis)):
        # one independent stream per map keeps witnesses stable if maps are appended
        sub = verify_contraction(w, psi, phi_i, samples, seed + i)
        if sub.witness is not None:
            sub.witness["map"] = i
        parts.append(sub)
    first_bad = next((p for p in parts if not p.passed), None)
    return VerifyReport(
        all(p.passed for p in parts),
        sum(p.checked for p in parts),
        sum(p.skipped for p in parts),
        sum(p.violations for p in parts),
        None if first_bad is None else first_bad.witness,
        parts,
    )
