from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshfree.gravity import IdwConfig, idw_interpolate, idw_interpolate_many, idw_weights
from meshfree.rbf import ScatterSet


def idw_exact(points, values, q, k=None):
    """Inverse-square weighting in rational arithmetic on the raw coordinates."""
    qx, qy = Fraction(q[0]), Fraction(q[1])
    d2 = [(Fraction(x) - qx) ** 2 + (Fraction(y) - qy) ** 2 for x, y in points]
    order = sorted(range(len(d2)), key=lambda i: (d2[i], i))
    chosen = order if k is None else order[:k]
    for i in chosen:
        if d2[i] == 0:
            return Fraction(values[i])
    num = sum(Fraction(values[i]) / d2[i] for i in chosen)
    den = sum(1 / d2[i] for i in chosen)
    return num / den


def random_set(seed, n):
    rng = np.random.default_rng(seed)
    return ScatterSet(rng.uniform(-2, 3, (n, 2)), rng.normal(10, 4, n))


def test_coincident_query_returns_datum():
    data = ScatterSet([(0, 0), (1, 0), (0, 1)], [7.3, 1.0, 2.0])
    assert idw_interpolate(data, (0, 0)) == 7.3


def test_equidistant_values_average():
    data = ScatterSet([(1, 0), (-1, 0), (0, 1), (0, -1)], [1.0, 3.0, 0.0, 4.0])
    assert idw_interpolate(data, (0, 0)) == 2.0


def test_hand_computed_pair():
    # d = 1 and 3: weights 1 and 1/9, so (0 + 1/9) / (10/9) = 0.1
    data = ScatterSet([(0.0, 0.0), (4.0, 0.0)], [0.0, 1.0])
    assert idw_interpolate(data, (1.0, 0.0)) == pytest.approx(0.1, abs=1e-15)


def test_single_neighbor_is_nearest_value():
    data = random_set(3, 30)
    q = np.random.default_rng(9).uniform(-2, 3, (50, 2))
    got = idw_interpolate_many(data, q, IdwConfig(neighbors=1))
    nearest = np.argmin(np.linalg.norm(data.points[None] - q[:, None], axis=2), axis=1)
    assert got.tolist() == data.values[nearest].tolist()


@pytest.mark.parametrize("k", [None, 1, 4, 12])
def test_matches_rational_oracle(k):
    data = random_set(11, 25)
    q = np.random.default_rng(12).uniform(-2, 3, (40, 2))
    got = idw_interpolate_many(data, q, IdwConfig(neighbors=k))
    for row, g in zip(q.tolist(), got):
        want = idw_exact(data.points.tolist(), data.values.tolist(), row, k)
        assert abs(g - float(want)) <= 1e-12


def test_tie_break_prefers_lower_index():
    data = ScatterSet([(1, 0), (-1, 0), (0, 3)], [5.0, 9.0, 0.0])
    idx, w = idw_weights(data, (0, 0), IdwConfig(neighbors=1))
    assert idx.tolist() == [0]
    assert idw_interpolate(data, (0, 0), IdwConfig(neighbors=1)) == 5.0


def test_batch_equals_scalar():
    data = random_set(5, 40)
    q = np.random.default_rng(6).uniform(-2, 3, (30, 2))
    assert idw_interpolate_many(data, q).tolist() == [idw_interpolate(data, p) for p in q]
    assert idw_interpolate_many(data, np.empty((0, 2))).shape == (0,)


def test_config_validation():
    for bad in (dict(power=0), dict(power=float("nan")), dict(neighbors=0)):
        with pytest.raises(ValueError):
            IdwConfig(**bad)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 30), st.sampled_from([None, 1, 3, 8]))
def test_weights_sum_to_one(seed, n, k):
    data = random_set(seed, n)
    q = np.random.default_rng(seed + 1).uniform(-2, 3, 2)
    idx, w = idw_weights(data, q, IdwConfig(neighbors=k))
    assert len(idx) == (n if k is None else min(k, n))
    assert np.all(w >= 0)
    assert abs(w.sum() - 1.0) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-1e3, 1e3))
def test_constant_reproduced(seed, c):
    rng = np.random.default_rng(seed)
    data = ScatterSet(rng.random((15, 2)), np.full(15, c))
    assert np.all(idw_interpolate_many(data, rng.random((10, 2))) == c)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-50, 50))
def test_value_shift_commutes(seed, s):
    data = random_set(seed, 20)
    q = np.random.default_rng(seed + 7).uniform(-2, 3, (10, 2))
    base = idw_interpolate_many(data, q)
    moved = idw_interpolate_many(ScatterSet(data.points, data.values + s), q)
    assert np.allclose(moved, base + s, atol=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([None, 2, 5]), st.floats(0.5, 4))
def test_maximum_principle(seed, k, p):
    data = random_set(seed, 20)
    cfg = IdwConfig(power=p, neighbors=k)
    q = np.random.default_rng(seed ^ 99).uniform(-4, 5, (20, 2))
    for row, v in zip(q, idw_interpolate_many(data, q, cfg)):
        idx, _ = idw_weights(data, row, cfg)
        assert data.values[idx].min() <= v <= data.values[idx].max()
