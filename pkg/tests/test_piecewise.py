import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psiphi.catalog import S2_PHI, S2_PSI, S4_PHI1, S4_PHI2, S4_PSI
from psiphi.piecewise import (DomainError, PiecewiseFn, check_popescu, check_proinov,
                              domination_witness, evaluate, is_nondecreasing, left_limit,
                              max_combine, right_limit, strictly_dominates)


def test_eval_builtin_values():
    assert evaluate(S2_PSI, 0.5) == 0.75
    assert evaluate(S2_PHI, 1.0) == 2.0
    assert evaluate(PiecewiseFn.identity(), 0.37) == 0.37


def test_eval_rejects_nonpositive():
    with pytest.raises(DomainError):
        evaluate(S2_PSI, 0.0)
    with pytest.raises(DomainError):
        S2_PSI(np.array([0.5, -1.0]))


def test_vectorised_eval_matches_scalar(rng):
    t = rng.uniform(1e-6, 5, 500)
    assert np.array_equal(S2_PSI(t), np.array([S2_PSI(v) for v in t]))


@pytest.mark.parametrize("eps, expected", [(0.5, 0.75), (0.0, 0.0)])
def test_right_limit_matches_sampling(eps, expected):
    # oracle: approach eps from the right
    samples = [S2_PSI(eps + 10.0 ** -k) for k in range(3, 10)]
    assert samples[-1] == pytest.approx(expected, abs=1e-8)
    assert right_limit(S2_PSI, eps) == expected


def test_right_limit_identity():
    assert right_limit(PiecewiseFn.identity(), 5.0) == 5.0


def test_left_limit_at_breakpoint():
    assert left_limit(S2_PSI, 0.5) == 0.25
    assert left_limit(S2_PSI, 1.0) == 1.5


def test_constructor_validation():
    with pytest.raises(ValueError):
        PiecewiseFn([])
    with pytest.raises(ValueError):
        PiecewiseFn([(1.0, 1.0, 0.0)])
    with pytest.raises(ValueError):
        PiecewiseFn([(0.0, 1.0, 0.0), (2.0, 1.0, 0.0), (1.0, 1.0, 0.0)])


def test_close_breakpoints_merge():
    f = PiecewiseFn([(0, 1, 0), (1.0, 2, 0), (1.0 + 1e-13, 3, 0)])
    assert len(f.pieces) == 2
    assert f.pieces[-1].slope == 3


def test_records_roundtrip():
    assert PiecewiseFn.from_records(S2_PSI.to_records()) == S2_PSI


def test_nondecreasing():
    assert is_nondecreasing(S2_PSI)
    assert not is_nondecreasing(PiecewiseFn.linear(-1.0))
    assert not is_nondecreasing(PiecewiseFn([(0, 1, 0), (1, 1, -5)]))


def test_strictly_dominates(identity, half):
    assert strictly_dominates(S4_PSI, S4_PHI1)
    assert not strictly_dominates(S2_PSI, S2_PSI)
    assert strictly_dominates(identity, half)


def test_dominates_open_end_at_zero():
    # both vanish at 0+, but phi < psi for every t > 0
    assert strictly_dominates(PiecewiseFn.linear(1.0), PiecewiseFn.linear(0.5))
    # equal limits at 0+ with phi growing faster: fails just right of 0
    assert not strictly_dominates(PiecewiseFn.linear(0.5), PiecewiseFn.linear(1.0))
    # touching at a breakpoint from the left is fine when the next piece drops
    psi = PiecewiseFn([(0, 1, 0), (1, 1, 1)])
    phi = PiecewiseFn.constant(1.0)
    assert strictly_dominates(psi, phi) is False  # phi(0.5)=1 > psi(0.5)
    psi = PiecewiseFn([(0, 0, 2), (1, 0, 3)])
    phi = PiecewiseFn([(0, 1, 1), (1, 0, 0)])  # phi -> 2 as t -> 1-, then drops
    assert strictly_dominates(psi, phi)


def test_dominates_unbounded_cell():
    assert not strictly_dominates(PiecewiseFn.linear(1.0, 1.0), PiecewiseFn.linear(2.0))
    assert strictly_dominates(PiecewiseFn.linear(2.0, 1.0), PiecewiseFn.linear(2.0))


def test_check_proinov_examples(identity, half):
    assert check_proinov(S2_PSI, S2_PHI).passed
    assert check_proinov(S4_PSI, S4_PHI2).passed
    rep = check_proinov(half, identity)
    assert not rep["domination"].ok
    t = rep["domination"].witness
    assert t > 0 and identity(t) >= half(t)


def test_check_popescu_examples(identity, half):
    rep = check_popescu(S2_PSI, S2_PHI)
    assert rep.passed
    assert rep["sequence"].status == "heuristic-pass"
    for key in ("inf_bounded", "right_limits", "closed_graph_or_zero_limit"):
        assert rep[key].status == "pass"
    down = PiecewiseFn([(0, 1, 0), (2, -1, 4)])
    assert check_popescu(down, PiecewiseFn.linear(0.0, -100.0))["inf_bounded"].status == "fail"
    assert check_popescu(identity, half)["right_limits"].status == "pass"


def test_popescu_zero_limit_condition():
    # phi(0+) = 1 but psi dips to 1 on (0, 1): the limit clause fails
    psi = PiecewiseFn([(0, 0, 1), (1, 1, 1)])
    phi = PiecewiseFn.linear(-1.0, 1.0)
    rep = check_popescu(psi, phi)
    assert rep["closed_graph_or_zero_limit"].status == "fail"
    assert check_popescu(psi, phi, assume_closed_graph=True)[
        "closed_graph_or_zero_limit"].status == "assumed"


def test_max_combine_examples(identity, half):
    # oracle: evaluate both pieces at 1/2 and take the larger
    m = max_combine([S4_PHI1, S4_PHI2])
    assert m(0.5) == max(1.5 * 0.5, 1.0 * 0.5) == 0.75
    assert max_combine([S2_PSI]) == S2_PSI
    m = max_combine([identity, half])
    t = np.linspace(0.01, 50, 200)
    assert np.array_equal(m(t), identity(t))
    with pytest.raises(ValueError):
        max_combine([])


def test_max_combine_inserts_crossings():
    f = PiecewiseFn.linear(1.0)
    g = PiecewiseFn.linear(-1.0, 4.0)  # crosses f at t = 2
    m = max_combine([f, g])
    assert m.breakpoints == [2.0]
    assert m(1.0) == 3.0 and m(3.0) == 3.0


pieces = st.lists(
    st.tuples(st.floats(0.01, 10), st.floats(-3, 3), st.floats(-3, 3)),
    min_size=0, max_size=4)


def _fn(extra, first):
    starts = sorted({round(s, 3) for s, _, _ in extra if round(s, 3) > 0})
    recs = [(0.0, *first)] + [(s, sl, ic) for s, (_, sl, ic) in zip(starts, extra)]
    return PiecewiseFn(recs)


fns = st.builds(_fn, pieces, st.tuples(st.floats(-3, 3), st.floats(-3, 3)))


@settings(max_examples=150, deadline=None)
@given(st.lists(fns, min_size=1, max_size=3), st.lists(st.floats(1e-3, 100), min_size=20,
                                                       max_size=20))
def test_max_combine_pointwise(fs, ts):
    m = max_combine(fs)
    for t in ts:
        assert m(t) == max(f(t) for f in fs)


@settings(max_examples=150, deadline=None)
@given(fns, fns)
def test_right_limit_of_max_bounded(f, g):
    m = max_combine([f, g])
    for eps in [0.0] + m.breakpoints + f.breakpoints + g.breakpoints:
        assert right_limit(m, eps) <= max(right_limit(f, eps), right_limit(g, eps)) + 1e-12


@settings(max_examples=150, deadline=None)
@given(fns, fns)
def test_max_preserves_monotonicity(f, g):
    if is_nondecreasing(f) and is_nondecreasing(g):
        assert is_nondecreasing(max_combine([f, g]))


@settings(max_examples=200, deadline=None)
@given(fns, fns, st.lists(st.floats(1e-4, 100), min_size=50, max_size=50))
def test_domination_consistent_with_sampling(psi, phi, ts):
    w = domination_witness(psi, phi)
    if w is None:
        t = np.asarray(ts)
        assert np.all(phi(t) < psi(t))
    else:
        assert phi(w) >= psi(w)


@settings(max_examples=100, deadline=None)
@given(fns)
def test_right_limit_vs_sampling(f):
    for eps in f.breakpoints:
        assert right_limit(f, eps) == pytest.approx(f(eps + 1e-9), abs=1e-6)


def test_max_crossing_not_rounded_below():
    # the crossing 4/3 is not a float; the winning line must not start below it
    m = max_combine([PiecewiseFn.constant(0.0), PiecewiseFn.linear(0.75, -1.0)])
    assert is_nondecreasing(m)
    b = m.breakpoints[0]
    assert 0.75 * b - 1.0 >= 0.0
