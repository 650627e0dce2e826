"""Compact sets as point clouds, the Hausdorff metric and IFS attractors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .maps import CoupledMapSpec, SelfMapSpec
from .piecewise import (ConditionReport, PiecewiseFn, check_proinov, is_nondecreasing,
                        max_combine)
from .rng import SplitMix64
from .solver import COMPARE_RTOL, VerifyReport, sample_points
from .spaces import ProductSpace, Space, norm

DEFAULT_RESOLUTION = 1e-3
DEFAULT_SET_TOL = 5e-3
DEFAULT_SET_MAX_ITER = 1000
# above this many point pairs directed_distance switches to the pruned search
PRUNE_THRESHOLD = 2_000_000
_CHUNK = 1 << 20


def _pair_metric(space) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised distance on coordinate differences (last axis)."""
    if isinstance(space, ProductSpace):
        dl = space.left.dim
        return lambda D: np.maximum(norm(D[..., :dl]), norm(D[..., dl:]))
    return norm


class CompactSet:
    """A finite, nonempty, canonical point cloud.

    Coordinates are rounded to multiples of ``resolution`` and deduplicated;
    rows are kept in lexicographic order.  ``resolution=None`` keeps the
    points exact (only exact duplicates are dropped), as does the dyadic
    space, whose points are not grid aligned.
    """

    __slots__ = ("points", "space", "resolution")

    def __init__(self, points, space: Space | ProductSpace | None = None,
                 resolution: float | None = DEFAULT_RESOLUTION):
        arr = np.asarray(points, dtype=float)
        if space is None:
            dim = 1 if arr.ndim < 2 else arr.shape[1]
            space = Space.euclidean(dim)
        if isinstance(space, ProductSpace):
            arr = arr.reshape(-1, space.dim)
            left, right = space.split(arr)
            arr = np.hstack([space.left.points(left), space.right.points(right)])
        else:
            arr = space.points(arr)
        if arr.shape[0] == 0:
            raise ValueError("compact sets are nonempty")
        if resolution is not None and not resolution > 0:
            raise ValueError("resolution must be positive")
        grid = resolution is not None and not _is_dyadic(space)
        if grid:
            idx = np.unique(np.round(arr / resolution).astype(np.int64), axis=0)
            arr = idx * resolution
        else:
            arr = np.unique(arr, axis=0)
        arr = arr + 0.0  # drop negative zeros
        arr.flags.writeable = False
        self.points = arr
        self.space = space
        self.resolution = resolution

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"CompactSet({len(self)} points, resolution={self.resolution})"

    def __eq__(self, other):
        return (isinstance(other, CompactSet) and self.space == other.space
                and np.array_equal(self.points, other.points))

    __hash__ = None

    def with_points(self, points) -> "CompactSet":
        return CompactSet(points, self.space, self.resolution)


def _is_dyadic(space) -> bool:
    if isinstance(space, ProductSpace):
        return space.left.is_dyadic or space.right.is_dyadic
    return space.is_dyadic


def as_compact_set(a, space=None, resolution=DEFAULT_RESOLUTION) -> CompactSet:
    if isinstance(a, CompactSet):
        return a
    return CompactSet(a, space, resolution)


def union(sets: Sequence[CompactSet]) -> CompactSet:
    """Canonical union, at the first set's resolution."""
    first = sets[0]
    return CompactSet(np.vstack([s.points for s in sets]), first.space, first.resolution)


# ---------------------------------------------------------------------------
# Hausdorff metric
# ---------------------------------------------------------------------------

def _nearest_bruteforce(A: np.ndarray, B: np.ndarray, metric) -> np.ndarray:
    out = np.empty(A.shape[0])
    step = max(1, _CHUNK // max(1, B.shape[0]))
    for i in range(0, A.shape[0], step):
        block = A[i:i + step]
        out[i:i + step] = metric(block[:, None, :] - B[None, :, :]).min(axis=1)
    return out


def _nearest_pruned(A: np.ndarray, B: np.ndarray, metric, lower: float) -> np.ndarray:
    """Same values as the brute force, using a KD-tree to prune candidates.

    ``lower`` is a constant with ``lower * euclidean <= metric``; every point
    within ``metric(a, b_kd) / lower`` in Euclidean distance is re-checked
    with the exact metric, so the true nearest point is always examined.
    """
    tree = cKDTree(B)
    _, idx = tree.query(A, k=1)
    first = metric(A - B[idx])
    radii = first / lower * (1 + 1e-9) + 1e-300
    out = np.empty(A.shape[0])
    for i, cand in enumerate(tree.query_ball_point(A, radii)):
        out[i] = metric(A[i] - B[cand]).min() if cand else first[i]
    return np.minimum(out, first)


def directed_distance(a: CompactSet, b: CompactSet, method: str = "auto") -> float:
    """``max_{x in a} min_{y in b} d(x, y)``.

    ``method`` is ``"brute"`` (the exact double loop), ``"pruned"`` or
    ``"auto"``; all three return identical values.
    """
    if a.space != b.space:
        raise ValueError("sets live in different spaces")
    metric = _pair_metric(a.space)
    A, B = a.points, b.points
    if method == "auto":
        method = "pruned" if A.shape[0] * B.shape[0] > PRUNE_THRESHOLD else "brute"
    if method == "brute":
        nearest = _nearest_bruteforce(A, B, metric)
    elif method == "pruned":
        lower = 1 / np.sqrt(2) if isinstance(a.space, ProductSpace) else 1.0
        nearest = _nearest_pruned(A, B, metric, lower)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(nearest.max())


def hausdorff(a: CompactSet, b: CompactSet, method: str = "auto") -> float:
    return max(directed_distance(a, b, method), directed_distance(b, a, method))


# ---------------------------------------------------------------------------
# iterated function systems
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class IFS:
    maps: list[SelfMapSpec]
    psi: PiecewiseFn | None = None
    phis: list[PiecewiseFn] | None = None

    def __post_init__(self):
        self.maps = list(self.maps)
        if not self.maps:
            raise ValueError("an IFS needs at least one map")
        if any(w.domain != self.maps[0].domain for w in self.maps):
            raise ValueError("all IFS maps must share one space")
        if self.phis is not None:
            self.phis = list(self.phis)
            if len(self.phis) != len(self.maps):
                raise ValueError("one phi per map is required")

    @property
    def space(self) -> Space:
        return self.maps[0].domain


@dataclass(eq=False)
class CoupledIFS:
    maps: list[CoupledMapSpec]
    psi: PiecewiseFn | None = None
    phis: list[PiecewiseFn] | None = None

    def __post_init__(self):
        self.maps = list(self.maps)
        if not self.maps:
            raise ValueError("a coupled IFS needs at least one map")
        for T in self.maps:
            if T.left != self.maps[0].left or T.right != T.left or T.codomain != T.left:
                raise ValueError("coupled IFS maps must all send X x X into the same X")
        if self.phis is not None:
            self.phis = list(self.phis)
            if len(self.phis) != len(self.maps):
                raise ValueError("one phi per map is required")

    @property
    def space(self) -> Space:
        return self.maps[0].left

    @property
    def product(self) -> ProductSpace:
        return ProductSpace(self.space, self.space)

    def induced(self) -> IFS:
        """The plain IFS ``x -> w_i(x, x0)`` when every map ignores its second argument."""
        def freeze(T):
            return SelfMapSpec.custom(f"{T.name or T.kind}(x, .)",
                                      lambda X, T=T: T.apply(X, np.zeros_like(X)), T.left)
        return IFS([freeze(T) for T in self.maps], self.psi, self.phis)


@dataclass
class AttractorReport:
    attractor: object
    iterations: int
    hausdorff_trace: list[float]
    converged: bool
    condition_reports: list[ConditionReport] = field(default_factory=list)
    pair_cloud: CompactSet | None = None
    fixed_pair_residual: float | None = None


def apply_map_set(w: SelfMapSpec, a: CompactSet) -> CompactSet:
    """Image of a point cloud under ``w``, snapped and canonical."""
    if w.domain != a.space:
        raise ValueError("map and set live in different spaces")
    return a.with_points(w.apply(a.points))


def apply_ifs(ifs: IFS, a: CompactSet) -> CompactSet:
    """The fractal operator: union of every map's image."""
    if ifs.space != a.space:
        raise ValueError("IFS and set live in different spaces")
    return a.with_points(np.vstack([w.apply(a.points) for w in ifs.maps]))


def _check_set_tol(tol: float, resolution: float | None, space) -> None:
    if not tol > 0:
        raise ValueError("tol must be positive")
    if resolution is not None and not _is_dyadic(space) and not tol > 2 * resolution:
        raise ValueError(f"tol ({tol}) must exceed twice the resolution ({resolution})")


def _system_conditions(psi, phis) -> list[ConditionReport]:
    if psi is None or phis is None:
        return []
    reports = [check_proinov(psi, phi) for phi in phis]
    if len(phis) > 1:
        combined = check_proinov(psi, max_combine(phis))
        combined.theorem = "proinov[max phi]"
        reports.append(combined)
    return reports


def attractor_solve(ifs: IFS, a0=None, tol: float = DEFAULT_SET_TOL,
                    max_iter: int = DEFAULT_SET_MAX_ITER,
                    resolution: float | None = DEFAULT_RESOLUTION,
                    callback: Callable | None = None) -> AttractorReport:
    """Iterate ``A_{n+1} = W(A_n)`` until ``h(A_n, A_{n+1}) < tol``.

    ``a0`` defaults to the singleton at the origin.  ``callback(n, h, size)``
    sees every iteration.
    """
    space = ifs.space
    if a0 is None:
        a0 = np.zeros((1, space.dim))
    a = a0 if isinstance(a0, CompactSet) else CompactSet(a0, space, resolution)
    _check_set_tol(tol, a.resolution, space)
    reports = _system_conditions(ifs.psi, ifs.phis)
    trace: list[float] = []
    for n in range(1, int(max_iter) + 1):
        nxt = apply_ifs(ifs, a)
        h = hausdorff(a, nxt)
        trace.append(h)
        a = nxt
        if callback is not None:
            callback(n, h, len(a))
        if h < tol:
            return AttractorReport(a, n, trace, True, reports)
    return AttractorReport(a, len(trace), trace, False, reports)


def _pair_images(cifs: CoupledIFS, C: np.ndarray) -> list[np.ndarray]:
    d = cifs.space.dim
    X, Y = C[:, :d], C[:, d:]
    return [np.hstack([T.apply(X, Y), T.apply(Y, X)]) for T in cifs.maps]


def apply_coupled_ifs(cifs: CoupledIFS, c: CompactSet) -> CompactSet:
    """``C -> U_i {(w_i(x, y), w_i(y, x)) : (x, y) in C}`` on pair clouds."""
    if c.space != cifs.product:
        raise ValueError("pair cloud and coupled IFS live in different spaces")
    return c.with_points(np.vstack(_pair_images(cifs, c.points)))


def project(c: CompactSet, side: int) -> CompactSet:
    """First (``side=0``) or second (``side=1``) coordinate projection of a pair cloud."""
    left, right = c.space.split(c.points)
    space = c.space.left if side == 0 else c.space.right
    return CompactSet(left if side == 0 else right, space, c.resolution)


def coupled_attractor_solve(cifs: CoupledIFS, c0=None, tol: float = DEFAULT_SET_TOL,
                            max_iter: int = DEFAULT_SET_MAX_ITER,
                            resolution: float | None = DEFAULT_RESOLUTION,
                            callback: Callable | None = None) -> AttractorReport:
    """Coupled fractal pair ``(A*, B*)`` via the pair operator on ``H(X x X)``.

    The returned ``attractor`` is ``(A*, B*)``, the two projections of the
    converged pair cloud; ``fixed_pair_residual`` is the larger of
    ``h(A*, U_i first(w_i*(C*)))`` and its second-coordinate twin.
    """
    prod = cifs.product
    if c0 is None:
        c0 = np.zeros((1, prod.dim))
    c = c0 if isinstance(c0, CompactSet) else CompactSet(c0, prod, resolution)
    _check_set_tol(tol, c.resolution, prod)
    reports = _system_conditions(cifs.psi, cifs.phis)
    trace: list[float] = []
    converged = False
    for n in range(1, int(max_iter) + 1):
        nxt = apply_coupled_ifs(cifs, c)
        h = hausdorff(c, nxt)
        trace.append(h)
        c = nxt
        if callback is not None:
            callback(n, h, len(c))
        if h < tol:
            converged = True
            break
    a_star, b_star = project(c, 0), project(c, 1)
    images = c.with_points(np.vstack(_pair_images(cifs, c.points)))
    residual = max(hausdorff(a_star, project(images, 0)),
                   hausdorff(b_star, project(images, 1)))
    return AttractorReport((a_star, b_star), len(trace), trace, converged, reports,
                           pair_cloud=c, fixed_pair_residual=residual)


def fractal_contraction_check(w: SelfMapSpec, psi: PiecewiseFn, phi: PiecewiseFn,
                              samples: int = 1000, seed: int = 0,
                              max_size: int = 8) -> VerifyReport:
    """Sample ``psi(h(w(A), w(B))) <= phi(h(A, B))`` over small random sets.

    Requires nondecreasing ``psi`` and ``phi``; set images are exact (no
    snapping).
    """
    if not (is_nondecreasing(psi) and is_nondecreasing(phi)):
        raise ValueError("the lifted contraction needs nondecreasing psi and phi")
    if int(samples) < 1:
        raise ValueError("samples must be at least 1")
    rng = SplitMix64(seed)
    space = w.domain
    checked = violations = 0
    witness = None
    for i in range(int(samples)):
        A = CompactSet(sample_points(space, 1 + rng.integers(max_size), rng), space, None)
        B = CompactSet(sample_points(space, 1 + rng.integers(max_size), rng), space, None)
        h_img = hausdorff(apply_map_set(w, A), apply_map_set(w, B))
        if h_img == 0:
            continue
        checked += 1
        lhs, rhs = psi(h_img), phi(hausdorff(A, B))
        if lhs > rhs + COMPARE_RTOL * max(1.0, abs(lhs), abs(rhs)):
            violations += 1
            if witness is None:
                witness = {"index": i, "A": A.points.tolist(), "B": B.points.tolist(),
                           "image_hausdorff": h_img, "psi": lhs, "phi": rhs}
    return VerifyReport(violations == 0, checked, int(samples) - checked, violations, witness)
