"""Named builtin systems.

``example-s2-dyadic``
    The coupled map on ``{1/2^n} U {0}`` with ``T(x, y) = 1/2^(min(m,n)+1)``
    and its control pair; unique coupled fixed point ``(0, 0)``.
``example-s4-ifs``
    The two-map IFS on R, ``w1 = (2/3)|x|``, ``w2 = |x|/3 + 2/3``, with
    ``psi``, ``phi1``, ``phi2``; attractor ``[0, 1]``.

The IFS control functions switch pieces at ``t = 1`` with the value at
exactly 1 taken from the right-hand piece (pieces are right-continuous).
"""

from __future__ import annotations

from .fractal import IFS
from .maps import CoupledMapSpec, SelfMapSpec
from .piecewise import PiecewiseFn
from .spaces import Space

S2_PSI = PiecewiseFn([(0.0, 0.5, 0.0), (0.5, 1.5, 0.0), (1.0, 3.0, 0.0)])
S2_PHI = PiecewiseFn([(0.0, 0.25, 0.0), (0.5, 1.0, 0.0), (1.0, 2.0, 0.0)])

S4_PSI = PiecewiseFn([(0.0, 2.0, 0.0), (1.0, 3.0, 0.0)])
S4_PHI1 = PiecewiseFn([(0.0, 1.5, 0.0), (1.0, 2.0, 0.0)])
S4_PHI2 = PiecewiseFn([(0.0, 1.0, 0.0), (1.0, 2.5, 0.0)])

S4_W1 = SelfMapSpec.abs_affine_1d([("nonneg", 2 / 3, 0.0), ("neg", -2 / 3, 0.0)],
                                  name="example-s4-w1")
S4_W2 = SelfMapSpec.abs_affine_1d([("nonneg", 1 / 3, 2 / 3), ("neg", -1 / 3, 2 / 3)],
                                  name="example-s4-w2")

S2_MAP = CoupledMapSpec.dyadic_min("example-s2-dyadic")


def example_s2() -> dict:
    return {"space": Space.dyadic(), "map": S2_MAP, "psi": S2_PSI, "phi": S2_PHI}


def example_s4() -> IFS:
    return IFS([S4_W1, S4_W2], S4_PSI, [S4_PHI1, S4_PHI2])


BUILTIN_SELF_MAPS = {
    "identity": lambda: SelfMapSpec.affine([[1.0]], [0.0], name="identity"),
    "example-s4-w1": lambda: S4_W1,
    "example-s4-w2": lambda: S4_W2,
    "dyadic-halving": lambda: SelfMapSpec.dyadic_halving("dyadic-halving"),
}
BUILTIN_COUPLED_MAPS = {"example-s2-dyadic": lambda: S2_MAP}
BUILTIN_SYSTEMS = ("example-s2-dyadic", "example-s4-ifs")
