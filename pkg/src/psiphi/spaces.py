"""Metric spaces: Euclidean R^n, the dyadic set {1/2^n} U {0}, and max-products."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_DIM = 3
DYADIC_MAX_EXPONENT = 52
DYADIC_TOL = 1e-15


def norm(diff: np.ndarray) -> np.ndarray:
    """Euclidean norm along the last axis; plain ``abs`` in one dimension."""
    diff = np.asarray(diff, dtype=float)
    if diff.shape[-1] == 1:
        return np.abs(diff[..., 0])
    return np.sqrt(np.sum(diff * diff, axis=-1))


def snap_dyadic(x: float) -> float:
    """Validate ``x`` as a member of {1/2^n : n >= 0} U {0}.

    Values below ``2**-52`` are clamped to 0.
    """
    x = float(x)
    if x == 0.0:
        return 0.0
    if not (0.0 < x <= 1.0 + DYADIC_TOL):
        raise ValueError(f"{x!r} is not in the dyadic space")
    if x < 2.0 ** -DYADIC_MAX_EXPONENT:
        return 0.0
    n = round(-math.log2(x))
    if abs(x - 2.0 ** -n) > DYADIC_TOL:
        raise ValueError(f"{x!r} is not of the form 1/2^n")
    return 2.0 ** -n


@dataclass(frozen=True)
class Space:
    """A point universe plus its distance.

    ``kind`` is ``"euclidean"`` (any ``dim`` up to 3) or ``"dyadic"``
    (always one-dimensional).
    """

    kind: str = "euclidean"
    dim: int = 1

    def __post_init__(self):
        if self.kind not in ("euclidean", "dyadic"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind == "dyadic" and self.dim != 1:
            raise ValueError("the dyadic space is one-dimensional")
        if not (1 <= int(self.dim) <= MAX_DIM):
            raise ValueError(f"dimension must be in 1..{MAX_DIM}, got {self.dim}")

    @classmethod
    def euclidean(cls, dim: int = 1) -> "Space":
        return cls("euclidean", dim)

    @classmethod
    def dyadic(cls) -> "Space":
        return cls("dyadic", 1)

    @property
    def is_dyadic(self) -> bool:
        return self.kind == "dyadic"

    def point(self, p) -> np.ndarray:
        """Validate a single point and return it as a float vector of length ``dim``."""
        arr = np.atleast_1d(np.asarray(p, dtype=float)).ravel()
        if arr.shape != (self.dim,):
            raise ValueError(f"expected a point of dimension {self.dim}, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("point coordinates must be finite")
        if self.is_dyadic:
            arr = np.array([snap_dyadic(arr[0])])
        return arr

    def points(self, P) -> np.ndarray:
        """Validate an array of points, returned with shape ``(n, dim)``."""
        arr = np.asarray(P, dtype=float)
        if arr.ndim == 1 and self.dim == 1:
            arr = arr.reshape(-1, 1)
        elif arr.ndim == 1 and arr.shape[0] == self.dim:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("point coordinates must be finite")
        if self.is_dyadic:
            arr = np.array([[snap_dyadic(v)] for v in arr[:, 0]]).reshape(-1, 1)
        return arr

    def dist(self, a, b) -> float:
        a = np.asarray(a, dtype=float).ravel()
        b = np.asarray(b, dtype=float).ravel()
        if a.shape != (self.dim,) or b.shape != (self.dim,):
            raise ValueError(f"dimension mismatch for a {self.dim}-dimensional space")
        return float(norm(a - b))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}

    @classmethod
    def from_dict(cls, d: dict) -> "Space":
        kind = d.get("kind", "euclidean")
        return cls(kind, int(d.get("dim", 1)))


@dataclass(frozen=True)
class ProductSpace:
    """``left x right`` under the max metric."""

    left: Space
    right: Space

    @property
    def dim(self) -> int:
        return self.left.dim + self.right.dim

    def pair(self, z) -> tuple[np.ndarray, np.ndarray]:
        x, y = z
        return self.left.point(x), self.right.point(y)

    def dist(self, z, w) -> float:
        (x, y), (u, v) = z, w
        return max(self.left.dist(x, u), self.right.dist(y, v))

    def split(self, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Split stacked pair coordinates ``(n, dl + dr)`` into the two halves."""
        Z = np.asarray(Z, dtype=float)
        return Z[..., : self.left.dim], Z[..., self.left.dim:]

    def to_dict(self) -> dict:
        return {"left": self.left.to_dict(), "right": self.right.to_dict()}


def dist(space: Space, a, b) -> float:
    return space.dist(a, b)


def product_dist(space: ProductSpace, z, w) -> float:
    return space.dist(z, w)
