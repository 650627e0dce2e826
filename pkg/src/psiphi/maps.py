"""Parametric self maps, coupled maps and extended map pairs.

Every map offers ``__call__`` for one point and ``apply`` for a stacked
array of points; the single-point path is the array path on one row, so the
two agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .spaces import DYADIC_MAX_EXPONENT, ProductSpace, Space

_DYADIC_FLOOR = 2.0 ** -DYADIC_MAX_EXPONENT


def _clamp_dyadic(Z: np.ndarray) -> np.ndarray:
    return np.where(Z < _DYADIC_FLOOR, 0.0, Z)


def _as_coef(value, n_out: int, n_in: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return arr
    if arr.ndim == 1 and arr.shape[0] == n_out == n_in:
        return arr
    if arr.ndim == 2 and arr.shape == (n_out, n_in):
        return arr
    raise ValueError(f"coefficient {name!r} has shape {arr.shape}, incompatible with "
                     f"{n_in} -> {n_out}")


def _linear(coef: np.ndarray, X: np.ndarray) -> np.ndarray:
    if coef.ndim == 2:
        return X @ coef.T
    return coef * X


def _as_offset(value, n_out: int) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(n_out, float(arr))
    if arr.shape != (n_out,):
        raise ValueError(f"offset has shape {arr.shape}, expected ({n_out},)")
    return arr


@dataclass(frozen=True, eq=False)
class SelfMapSpec:
    """A self map ``w: X -> X``.

    Use the constructors :meth:`affine`, :meth:`abs_affine_1d`,
    :meth:`dyadic_halving` or :meth:`custom`.
    """

    kind: str
    domain: Space
    params: dict = field(default_factory=dict)
    name: str | None = None

    # constructors ----------------------------------------------------------
    @classmethod
    def affine(cls, A, c=0.0, domain: Space | None = None, name=None) -> "SelfMapSpec":
        A = np.asarray(A, dtype=float)
        if domain is None:
            domain = Space.euclidean(1 if A.ndim < 2 else A.shape[0])
        d = domain.dim
        if A.ndim < 2:
            A = A * np.eye(d) if A.ndim == 0 else np.diag(A)
        if A.shape != (d, d):
            raise ValueError(f"affine matrix must be {d}x{d}, got {A.shape}")
        return cls("affine", domain, {"A": A, "c": _as_offset(c, d)}, name)

    @classmethod
    def abs_affine_1d(cls, branches, domain: Space | None = None, name=None) -> "SelfMapSpec":
        """Two affine branches split at 0.

        ``branches`` holds ``(region, slope, intercept)`` with region
        ``"nonneg"`` (x >= 0) or ``"neg"`` (x < 0), each exactly once.
        """
        domain = domain or Space.euclidean(1)
        if domain.dim != 1:
            raise ValueError("abs_affine_1d maps live on a one-dimensional space")
        table = {}
        for region, slope, intercept in branches:
            if region not in ("nonneg", "neg"):
                raise ValueError(f"unknown region {region!r}")
            if region in table:
                raise ValueError(f"region {region!r} given twice")
            table[region] = (float(slope), float(intercept))
        if set(table) != {"nonneg", "neg"}:
            raise ValueError("branches must cover x >= 0 and x < 0")
        return cls("abs_affine_1d", domain, table, name)

    @classmethod
    def dyadic_halving(cls, name=None) -> "SelfMapSpec":
        return cls("dyadic_halving", Space.dyadic(), {}, name)

    @classmethod
    def custom(cls, name: str, fn: Callable[[np.ndarray], np.ndarray],
               domain: Space) -> "SelfMapSpec":
        """Wrap a vectorised callable ``(n, dim) -> (n, dim)``."""
        return cls("custom", domain, {"fn": fn}, name)

    # evaluation ------------------------------------------------------------
    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(-1, self.domain.dim)
        if self.kind == "affine":
            out = X @ self.params["A"].T + self.params["c"]
        elif self.kind == "abs_affine_1d":
            sp, cp = self.params["nonneg"]
            sn, cn = self.params["neg"]
            out = np.where(X >= 0, sp * X + cp, sn * X + cn)
        elif self.kind == "dyadic_halving":
            out = X / 2.0
        elif self.kind == "custom":
            out = np.asarray(self.params["fn"](X), dtype=float).reshape(X.shape)
        else:
            raise ValueError(f"unknown self map kind {self.kind!r}")
        if self.domain.is_dyadic:
            out = _clamp_dyadic(out)
        return out

    def __call__(self, x) -> np.ndarray:
        return self.apply(np.asarray(x, dtype=float).reshape(1, -1))[0]

    def __repr__(self):
        return f"SelfMapSpec({self.name or self.kind}, dim={self.domain.dim})"


@dataclass(frozen=True, eq=False)
class CoupledMapSpec:
    """A two-argument map ``T: left x right -> codomain``.

    For a coupled map on a single space ``left == right == codomain``; the
    extended setting uses different spaces.
    """

    kind: str
    left: Space
    right: Space
    codomain: Space
    params: dict = field(default_factory=dict)
    name: str | None = None

    @property
    def domain(self) -> Space:
        return self.left

    @classmethod
    def bilinear_affine(cls, a, b, c=0.0, domain: Space | None = None,
                        right: Space | None = None, codomain: Space | None = None,
                        name=None) -> "CoupledMapSpec":
        """``T(x, y) = a*x + b*y + c``; scalar, componentwise or matrix coefficients."""
        left = domain or Space.euclidean(1)
        right = right or left
        codomain = codomain or left
        params = {
            "a": _as_coef(a, codomain.dim, left.dim, "a"),
            "b": _as_coef(b, codomain.dim, right.dim, "b"),
            "c": _as_offset(c, codomain.dim),
        }
        return cls("bilinear_affine", left, right, codomain, params, name)

    @classmethod
    def dyadic_min(cls, name="example-s2-dyadic") -> "CoupledMapSpec":
        d = Space.dyadic()
        return cls("dyadic_min", d, d, d, {}, name)

    @classmethod
    def custom(cls, name: str, fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
               domain: Space, right: Space | None = None,
               codomain: Space | None = None) -> "CoupledMapSpec":
        return cls("custom", domain, right or domain, codomain or domain, {"fn": fn}, name)

    def apply(self, X, Y) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(-1, self.left.dim)
        Y = np.asarray(Y, dtype=float).reshape(-1, self.right.dim)
        if self.kind == "bilinear_affine":
            p = self.params
            out = _linear(p["a"], X) + _linear(p["b"], Y) + p["c"]
        elif self.kind == "dyadic_min":
            out = _dyadic_min(X[:, 0], Y[:, 0]).reshape(-1, 1)
        elif self.kind == "custom":
            out = np.asarray(self.params["fn"](X, Y), dtype=float).reshape(-1, self.codomain.dim)
        else:
            raise ValueError(f"unknown coupled map kind {self.kind!r}")
        if self.codomain.is_dyadic:
            out = _clamp_dyadic(out)
        return out

    def __call__(self, x, y) -> np.ndarray:
        return self.apply(np.asarray(x, dtype=float).reshape(1, -1),
                          np.asarray(y, dtype=float).reshape(1, -1))[0]

    def __repr__(self):
        return f"CoupledMapSpec({self.name or self.kind})"


def _dyadic_exponent(v: np.ndarray) -> np.ndarray:
    # v = 2**-n exactly, frexp gives v = 0.5 * 2**e, so n = 1 - e
    _, e = np.frexp(v)
    return 1 - e


def _dyadic_min(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """T(1/2^m, 1/2^n) = 1/2^(min(m,n)+1); one zero argument halves the other; T(0,0)=0."""
    both = (x > 0) & (y > 0)
    m = _dyadic_exponent(np.where(x > 0, x, 1.0))
    n = _dyadic_exponent(np.where(y > 0, y, 1.0))
    out = np.zeros_like(x)
    out = np.where(both, np.ldexp(1.0, -(np.minimum(m, n) + 1)), out)
    out = np.where((x > 0) & (y == 0), np.ldexp(1.0, -(m + 1)), out)
    out = np.where((x == 0) & (y > 0), np.ldexp(1.0, -(n + 1)), out)
    return out


@dataclass(frozen=True, eq=False)
class ExtendedPairSpec:
    """Maps ``T: X x Y -> X`` and ``S: X x Y -> Y``."""

    t_map: CoupledMapSpec
    s_map: CoupledMapSpec

    def __post_init__(self):
        t, s = self.t_map, self.s_map
        if t.left != s.left or t.right != s.right:
            raise ValueError("T and S must share the domain X x Y")
        if t.codomain != t.left:
            raise ValueError("T must map into X")
        if s.codomain != s.right:
            raise ValueError("S must map into Y")

    @property
    def space(self) -> ProductSpace:
        return ProductSpace(self.t_map.left, self.t_map.right)
