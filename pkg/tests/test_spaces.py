import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from psiphi.spaces import ProductSpace, Space, dist, product_dist, snap_dyadic

E1, E2, E3, D = Space.euclidean(1), Space.euclidean(2), Space.euclidean(3), Space.dyadic()


def test_distance_examples():
    assert dist(E1, 0, 1) == 1
    assert dist(D, 0.5, 0.125) == abs(0.5 - 0.125) == 0.375
    assert dist(E2, (0, 0), (3, 4)) == 5
    p = ProductSpace(E1, E1)
    assert product_dist(p, ((0,), (0,)), ((1,), (2,))) == 2
    assert product_dist(p, ((1,), (2,)), ((1,), (2,))) == 0


@pytest.mark.parametrize("m,n,p", [(1, 1, 2), (3, 5, 0), (2, 7, 4), (6, 1, 6)])
def test_dyadic_product_example_pairs(m, n, p):
    prod = ProductSpace(D, D)
    z, w = (2.0 ** -m, 2.0 ** -n), (2.0 ** -p, 0.0)
    assert product_dist(prod, z, w) == max(abs(2.0 ** -m - 2.0 ** -p), 2.0 ** -n)


def test_space_validation():
    with pytest.raises(ValueError):
        Space.euclidean(4)
    with pytest.raises(ValueError):
        dist(E2, (0, 0), (1, 2, 3))
    with pytest.raises(ValueError):
        D.point(0.3)
    with pytest.raises(ValueError):
        E1.point(float("nan"))
    assert snap_dyadic(2.0 ** -60) == 0.0
    assert snap_dyadic(0.25) == 0.25


def test_space_dict_roundtrip():
    for s in (E1, E3, D):
        assert Space.from_dict(s.to_dict()) == s


def _random_point(space, rng):
    if space.is_dyadic:
        k = rng.integers(0, 60)
        return 0.0 if k > 52 else 2.0 ** -int(k)
    return rng.uniform(-10, 10, space.dim)


@pytest.mark.parametrize("space", [E1, E2, E3, D])
def test_metric_axioms_random_triples(space):
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        a, b, c = (_random_point(space, rng) for _ in range(3))
        dab = dist(space, a, b)
        assert dab >= 0
        assert dab == dist(space, b, a)
        assert dist(space, a, a) <= 1e-12
        assert dab <= dist(space, a, c) + dist(space, c, b) + 1e-12


def test_product_metric_axioms_random_triples():
    rng = np.random.default_rng(11)
    prod = ProductSpace(E2, D)
    for _ in range(10_000):
        z, w, v = ((_random_point(E2, rng), _random_point(D, rng)) for _ in range(3))
        d = product_dist(prod, z, w)
        parts = (dist(E2, z[0], w[0]), dist(D, z[1], w[1]))
        assert d >= max(parts) and d in parts
        assert d == product_dist(prod, w, z)
        assert product_dist(prod, z, z) == 0
        assert d <= product_dist(prod, z, v) + product_dist(prod, v, w) + 1e-12


coords = st.floats(-1e6, 1e6)


@given(st.lists(coords, min_size=2, max_size=2), st.lists(coords, min_size=2, max_size=2))
def test_euclidean_dist_matches_hypot(a, b):
    assert dist(E2, a, b) == pytest.approx(np.hypot(a[0] - b[0], a[1] - b[1]), rel=1e-15)
