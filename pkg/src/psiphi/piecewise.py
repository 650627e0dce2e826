"""Piecewise-affine control functions on ``(0, inf)`` and their analysis.

Every function here is right-continuous: the k-th piece lives on
``[start_k, start_{k+1})`` and the first piece on ``(0, start_2)``.
Decisions (monotonicity, strict domination, limit conditions) are made in
exact rational arithmetic on the float coefficients, so they never depend
on where a sampler happens to land.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .rng import SplitMix64

BREAKPOINT_TOL = 1e-12


class DomainError(ValueError):
    """Raised when a control function is queried outside ``(0, inf)``."""


@dataclass(frozen=True)
class Piece:
    start: float
    slope: float
    intercept: float

    def __call__(self, t):
        return self.slope * t + self.intercept

    def exact(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.slope), Fraction(self.intercept)


def _coerce_piece(p) -> Piece:
    if isinstance(p, Piece):
        return p
    if isinstance(p, dict):
        try:
            return Piece(float(p["start"]), float(p["slope"]), float(p["intercept"]))
        except KeyError as exc:
            raise ValueError(f"piece record is missing field {exc.args[0]!r}") from None
    start, slope, intercept = p
    return Piece(float(start), float(slope), float(intercept))


class PiecewiseFn:
    """A piecewise-affine function on ``(0, inf)``.

    Parameters
    ----------
    pieces : iterable
        ``Piece`` objects, ``(start, slope, intercept)`` triples or records
        with those keys, in increasing order of ``start``.  The first start
        must be 0.  Starts closer than ``1e-12`` are merged, the later piece
        winning.
    """

    __slots__ = ("pieces", "_starts")

    def __init__(self, pieces: Iterable):
        raw = [_coerce_piece(p) for p in pieces]
        if not raw:
            raise ValueError("a piecewise function needs at least one piece")
        for p in raw:
            if not all(math.isfinite(v) for v in (p.start, p.slope, p.intercept)):
                raise ValueError(f"non-finite piece {p}")
        merged: list[Piece] = []
        for p in raw:
            if merged and p.start <= merged[-1].start - BREAKPOINT_TOL:
                raise ValueError("piece starts must be strictly increasing")
            if merged and p.start - merged[-1].start < BREAKPOINT_TOL:
                merged[-1] = Piece(merged[-1].start, p.slope, p.intercept)
            else:
                merged.append(p)
        if merged[0].start != 0.0:
            raise ValueError("the first piece must start at 0 (domain is (0, inf))")
        self.pieces: tuple[Piece, ...] = tuple(merged)
        self._starts = [p.start for p in merged]

    # construction helpers -------------------------------------------------
    @classmethod
    def linear(cls, slope: float, intercept: float = 0.0) -> "PiecewiseFn":
        return cls([(0.0, slope, intercept)])

    @classmethod
    def identity(cls) -> "PiecewiseFn":
        return cls.linear(1.0)

    @classmethod
    def constant(cls, value: float) -> "PiecewiseFn":
        return cls.linear(0.0, value)

    @classmethod
    def from_records(cls, records: Sequence[dict]) -> "PiecewiseFn":
        return cls(records)

    def to_records(self) -> list[dict]:
        return [{"start": p.start, "slope": p.slope, "intercept": p.intercept}
                for p in self.pieces]

    # evaluation ------------------------------------------------------------
    @property
    def breakpoints(self) -> list[float]:
        """Piece starts strictly inside the domain."""
        return self._starts[1:]

    def piece_at(self, t: float) -> Piece:
        """Piece whose half-open interval contains ``t`` (first piece at 0)."""
        i = bisect.bisect_right(self._starts, t) - 1
        return self.pieces[max(i, 0)]

    def __call__(self, t):
        if np.ndim(t) == 0:
            t = float(t)
            if not t > 0:
                raise DomainError(f"control functions are defined on (0, inf), got t={t}")
            return self.piece_at(t)(t)
        t = np.asarray(t, dtype=float)
        if np.any(~(t > 0)):
            raise DomainError("control functions are defined on (0, inf)")
        idx = np.searchsorted(np.asarray(self._starts), t, side="right") - 1
        slopes = np.array([p.slope for p in self.pieces])
        intercepts = np.array([p.intercept for p in self.pieces])
        return slopes[idx] * t + intercepts[idx]

    def __eq__(self, other):
        return isinstance(other, PiecewiseFn) and self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self):
        body = ", ".join(f"[{p.start:g}: {p.slope:g}t{p.intercept:+g}]" for p in self.pieces)
        return f"PiecewiseFn({body})"


def evaluate(f: PiecewiseFn, t):
    """Evaluate ``f`` at ``t > 0`` (scalar or array)."""
    return f(t)


def right_limit(f: PiecewiseFn, eps: float) -> float:
    """Limit of ``f(t)`` as ``t -> eps+``."""
    if eps < 0:
        raise DomainError("right limits are taken at eps >= 0")
    return f.piece_at(eps)(eps)


def left_limit(f: PiecewiseFn, b: float) -> float:
    """Limit of ``f(t)`` as ``t -> b-`` for ``b > 0``."""
    if not b > 0:
        raise DomainError("left limits are taken at b > 0")
    i = bisect.bisect_left(f._starts, b) - 1
    p = f.pieces[max(i, 0)]
    return p(b)


# ---------------------------------------------------------------------------
# exact cell machinery
# ---------------------------------------------------------------------------

def _refinement(*fns: PiecewiseFn) -> list[float]:
    starts = set()
    for f in fns:
        starts.update(f._starts)
    return sorted(starts)


def _cells(*fns: PiecewiseFn):
    """Yield ``(a, b, pieces)`` over the common refinement; ``b`` is None on the last cell."""
    starts = _refinement(*fns)
    for k, a in enumerate(starts):
        b = starts[k + 1] if k + 1 < len(starts) else None
        yield a, b, [f.piece_at(a) for f in fns]


def _nonneg_region(a: Fraction, b: Fraction | None, s: Fraction, c: Fraction):
    """Part of the cell (open at 0, open at ``b``) where ``s*t + c >= 0``.

    Returns ``None`` when empty, else ``(lo, hi, lo_closed)`` with ``hi``
    possibly None (unbounded) and ``hi`` included only when it lies before ``b``.
    """
    if s == 0:
        if c < 0:
            return None
        return a, b, a > 0
    root = -c / s
    if s > 0:
        lo = max(root, a)
        if b is not None and lo >= b:
            return None
        return lo, b, lo > 0
    # s < 0: region is t <= root
    if root < a or (a == 0 and root <= 0):
        return None
    hi = root if b is None or root < b else b
    return a, hi, a > 0


def _witness_candidates(lo: Fraction, hi: Fraction | None, lo_closed: bool) -> list[float]:
    if hi is None:
        base = max(lo, Fraction(0))
        cands = [base + 1, base + Fraction(1, 2), base * 2 + 1]
    elif hi == lo:
        cands = [lo]
    else:
        cands = [(lo + hi) / 2, lo + (hi - lo) / 4, hi - (hi - lo) / 4]
    if lo_closed:
        cands.append(lo)
    return [float(c) for c in cands if c > 0]


def _pick_witness(cands: list[float], holds) -> float:
    for t in cands:
        if t > 0 and holds(t):
            return t
    return cands[0]


def _domination_failure(psi: PiecewiseFn, phi: PiecewiseFn) -> float | None:
    """First ``t > 0`` with ``phi(t) >= psi(t)``, or None if ``phi < psi`` everywhere."""
    for a, b, (p_psi, p_phi) in _cells(psi, phi):
        s = Fraction(p_phi.slope) - Fraction(p_psi.slope)
        c = Fraction(p_phi.intercept) - Fraction(p_psi.intercept)
        region = _nonneg_region(Fraction(a), None if b is None else Fraction(b), s, c)
        if region is not None:
            return _pick_witness(_witness_candidates(*region), lambda t: phi(t) >= psi(t))
    return None


def is_nondecreasing(f: PiecewiseFn) -> bool:
    return _monotonicity_failure(f) is None


def _monotonicity_failure(f: PiecewiseFn) -> float | None:
    for k, p in enumerate(f.pieces):
        if p.slope < 0:
            nxt = f.pieces[k + 1].start if k + 1 < len(f.pieces) else p.start + 2.0
            return (p.start + nxt) / 2
        if k > 0:
            prev = f.pieces[k - 1]
            b = Fraction(p.start)
            ps, pc = prev.exact()
            ns, nc = p.exact()
            if ps * b + pc > ns * b + nc:
                return p.start
    return None


def strictly_dominates(psi: PiecewiseFn, phi: PiecewiseFn) -> bool:
    """True iff ``phi(t) < psi(t)`` for every ``t > 0``."""
    return _domination_failure(psi, phi) is None


def domination_witness(psi: PiecewiseFn, phi: PiecewiseFn) -> float | None:
    """A point where ``phi(t) >= psi(t)``, or None when ``psi`` strictly dominates."""
    return _domination_failure(psi, phi)


# ---------------------------------------------------------------------------
# condition reports
# ---------------------------------------------------------------------------

PASS, FAIL = "pass", "fail"
HEURISTIC_PASS, HEURISTIC_FAIL = "heuristic-pass", "heuristic-fail"
ASSUMED = "assumed"


@dataclass
class Condition:
    key: str
    description: str
    status: str
    witness: float | None = None

    @property
    def analytic(self) -> bool:
        return self.status in (PASS, FAIL)

    @property
    def ok(self) -> bool:
        return self.status != FAIL


@dataclass
class ConditionReport:
    theorem: str
    conditions: list[Condition] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Conjunction of the analytic conditions; heuristics never flip it."""
        return all(c.ok for c in self.conditions)

    @property
    def heuristic_warnings(self) -> list[Condition]:
        return [c for c in self.conditions if c.status == HEURISTIC_FAIL]

    def __getitem__(self, key: str) -> Condition:
        for c in self.conditions:
            if c.key == key:
                return c
        raise KeyError(key)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "passed": self.passed,
            "conditions": [
                {"key": c.key, "description": c.description, "status": c.status,
                 "witness": c.witness}
                for c in self.conditions
            ],
        }


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def _right_limit_failure(psi: PiecewiseFn, phi: PiecewiseFn) -> float | None:
    for eps in _refinement(psi, phi)[1:]:
        e = Fraction(eps)
        ps, pc = psi.piece_at(eps).exact()
        fs, fc = phi.piece_at(eps).exact()
        if not fs * e + fc < ps * e + pc:
            return eps
    return None


def check_proinov(psi: PiecewiseFn, phi: PiecewiseFn) -> ConditionReport:
    """Decide the three hypotheses of the Proinov fixed point theorem."""
    mono = _monotonicity_failure(psi)
    dom = _domination_failure(psi, phi)
    lim = _right_limit_failure(psi, phi)
    if lim is None and dom is not None:
        # on cell interiors the right limits are the values themselves
        lim = dom
    return ConditionReport("proinov", [
        Condition("nondecreasing", "psi is nondecreasing", _status(mono is None), mono),
        Condition("domination", "phi(t) < psi(t) for all t > 0", _status(dom is None), dom),
        Condition("right_limits", "limsup phi(e+) < psi(e+) for all e > 0",
                  _status(lim is None), lim),
    ])


def _zero_limit_failure(psi: PiecewiseFn, phi: PiecewiseFn) -> float | None:
    """Check ``phi(0+) < min(liminf_{t->e} psi(t), psi(e))`` for every ``e > 0``."""
    level = Fraction(right_limit(phi, 0.0))
    for a, b, (p,) in _cells(psi):
        s, c = p.exact()
        region = _nonneg_region(Fraction(a), None if b is None else Fraction(b), -s, level - c)
        if region is not None:
            return _pick_witness(_witness_candidates(*region), lambda t: psi(t) <= float(level))
    for bp in psi.breakpoints:
        prev = psi.pieces[bisect.bisect_left(psi._starts, bp) - 1]
        s, c = prev.exact()
        if not level < s * Fraction(bp) + c:
            return bp
    return None


def _sequence_search(psi: PiecewiseFn, phi: PiecewiseFn, n_sequences: int,
                     seed: int) -> float | None:
    """Falsification search for the strictly-decreasing-sequence hypothesis.

    Looks for a sequence ``t_n`` decreasing to some ``e > 0`` along which
    ``psi(t_n)`` strictly decreases and ``psi(t_n)``, ``phi(t_n)`` share a
    limit.  Returns the offending ``e`` or None.
    """
    rng = SplitMix64(seed)
    targets = [bp for bp in _refinement(psi, phi)[1:]]
    while len(targets) < n_sequences:
        targets.append(10.0 ** rng.uniform(-3.0, 3.0))
    n = np.arange(60)
    for k, eps in enumerate(targets[:n_sequences]):
        delta = rng.uniform(0.01, 1.0) * max(eps, 1e-3)
        ratio = rng.uniform(0.3, 0.8)
        t = eps + delta * ratio ** n
        t = t[t > eps * (1 + 1e-10) + 1e-300]
        if t.size < 3:
            continue
        ps, ph = psi(t), phi(t)
        if not np.all(np.diff(ps) < 0):
            continue
        settled = abs(ps[-1] - ps[-2]) <= 1e-8 * (1 + abs(ps[-1]))
        common = abs(ps[-1] - ph[-1]) <= 1e-8 * (1 + abs(ps[-1]))
        if settled and common:
            return float(eps)
    return None


def check_popescu(psi: PiecewiseFn, phi: PiecewiseFn, assume_closed_graph: bool = False,
                  n_sequences: int = 1000, seed: int = 0) -> ConditionReport:
    """Decide the Popescu hypotheses; the sequence condition is only searched."""
    mono = _monotonicity_failure(psi)
    dom = _domination_failure(psi, phi)
    last = psi.pieces[-1]
    inf_fail = None if last.slope >= 0 else last.start + 1.0 + abs(last.intercept / last.slope)
    lim = _right_limit_failure(psi, phi)
    if lim is None and dom is not None:
        lim = dom
    seq = _sequence_search(psi, phi, n_sequences, seed)
    conditions = [
        Condition("nondecreasing", "psi is nondecreasing", _status(mono is None), mono),
        Condition("domination", "phi(t) < psi(t) for all t > 0", _status(dom is None), dom),
        Condition("inf_bounded", "inf_{t>e} psi(t) > -inf for all e > 0",
                  _status(inf_fail is None), inf_fail),
        Condition("sequence", "psi(t_n), phi(t_n) common limit with psi(t_n) decreasing "
                  "forces t_n -> 0", HEURISTIC_PASS if seq is None else HEURISTIC_FAIL, seq),
        Condition("right_limits", "limsup phi(e+) < liminf psi(e+) for all e > 0",
                  _status(lim is None), lim),
    ]
    if assume_closed_graph:
        conditions.append(Condition("closed_graph_or_zero_limit",
                                    "closed graph (user assertion)", ASSUMED))
    else:
        zero = _zero_limit_failure(psi, phi)
        conditions.append(Condition("closed_graph_or_zero_limit",
                                    "limsup phi(0+) < min(liminf psi(e), psi(e)) for all e > 0",
                                    _status(zero is None), zero))
    return ConditionReport("popescu", conditions)


# ---------------------------------------------------------------------------
# pointwise maximum
# ---------------------------------------------------------------------------

def max_combine(fns: Sequence[PiecewiseFn]) -> PiecewiseFn:
    """Exact pointwise maximum of finitely many piecewise-affine functions."""
    fns = list(fns)
    if not fns:
        raise ValueError("max_combine needs at least one function")
    if len(fns) == 1:
        return fns[0]
    out: list[tuple[Fraction, Fraction, Fraction]] = []
    for a, b, pieces in _cells(*fns):
        lines = sorted({p.exact() for p in pieces})
        fa = Fraction(a)
        fb = None if b is None else Fraction(b)
        cuts = {fa}
        for (s1, c1), (s2, c2) in combinations(lines, 2):
            if s1 != s2:
                x = (c2 - c1) / (s1 - s2)
                if x > fa and (fb is None or x < fb):
                    cuts.add(x)
        cuts = sorted(cuts)
        for j, lo in enumerate(cuts):
            hi = cuts[j + 1] if j + 1 < len(cuts) else fb
            probe = lo + 1 if hi is None else (lo + hi) / 2
            s, c = max(lines, key=lambda L: L[0] * probe + L[1])
            if out and out[-1][1:] == (s, c):
                continue
            out.append((lo, s, c))
    return PiecewiseFn([(_float_at_or_above(lo), float(s), float(c)) for lo, s, c in out])


def _float_at_or_above(x: Fraction) -> float:
    # a crossing rounded down would start the winning line where it still loses;
    # no float lies strictly between x and this value, so float inputs see the exact max
    f = float(x)
    return math.nextafter(f, math.inf) if Fraction(f) < x else f
