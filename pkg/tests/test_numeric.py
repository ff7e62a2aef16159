import numpy as np
import pytest

from mblbfgs.exceptions import DimensionMismatchError, SamplingError
from mblbfgs.numeric import RngState, axpy, dot, uniform_indices


def test_dot_direct():
    assert dot(np.array([1.0, 2.0]), np.array([3.0, 4.0])) == 11.0


def test_dot_zero_annihilates(np_rng):
    v = np_rng.normal(size=6)
    assert dot(v, np.zeros(6)) == 0.0


def test_dot_matches_naive_loop(np_rng):
    for _ in range(20):
        a = np_rng.normal(size=5)
        b = np_rng.normal(size=5)
        naive = sum(float(a[i]) * float(b[i]) for i in range(5))
        assert dot(a, b) == pytest.approx(naive, rel=1e-12)


def test_dot_symmetric_bilinear(np_rng):
    for _ in range(50):
        a, b, c = np_rng.normal(size=(3, 7))
        al, be = np_rng.normal(size=2)
        assert dot(a, b) == pytest.approx(dot(b, a), rel=1e-12)
        assert dot(al * a + be * b, c) == pytest.approx(
            al * dot(a, c) + be * dot(b, c), rel=1e-12, abs=1e-12)


def test_dot_length_mismatch():
    with pytest.raises(DimensionMismatchError):
        dot(np.zeros(3), np.zeros(4))


def test_axpy_zero_scalar(np_rng):
    x, y = np_rng.normal(size=(2, 5))
    assert np.array_equal(axpy(0.0, x, y), y)


def test_axpy_identity(np_rng):
    x = np_rng.normal(size=5)
    assert np.array_equal(axpy(1.0, x, np.zeros(5)), x)


def test_axpy_direct():
    out = axpy(2.0, np.array([1.0, 1.0]), np.array([1.0, 2.0]))
    assert np.array_equal(out, [3.0, 4.0])


def test_axpy_leaves_inputs_alone():
    x = np.array([1.0, 2.0])
    y = np.array([3.0, 4.0])
    axpy(2.0, x, y)
    assert np.array_equal(x, [1.0, 2.0]) and np.array_equal(y, [3.0, 4.0])


def test_axpy_length_mismatch():
    with pytest.raises(DimensionMismatchError):
        axpy(1.0, np.zeros(3), np.zeros(2))


def test_uniform_indices_exhaustive_draw():
    got = uniform_indices(RngState(3), 10, 10)
    assert sorted(got.tolist()) == list(range(10))


def test_uniform_indices_empty_draw():
    assert len(uniform_indices(RngState(3), 100, 0)) == 0


def test_uniform_indices_deterministic():
    a = uniform_indices(RngState(99), 50, 10)
    b = uniform_indices(RngState(99), 50, 10)
    assert np.array_equal(a, b)


def test_uniform_indices_overdraw_rejected():
    with pytest.raises(SamplingError):
        uniform_indices(RngState(0), 5, 6)


def test_uniform_indices_distinct():
    got = uniform_indices(RngState(11), 40, 25)
    assert len(set(got.tolist())) == 25


def test_uniform_indices_coverage_smoke():
    # population 8, 10000 draws: each index frequency within 10% of uniform
    rng = RngState(1234)
    counts = np.zeros(8)
    draws, per_draw = 10000, 3
    for _ in range(draws):
        counts[rng.indices(8, per_draw)] += 1
    expected = draws * per_draw / 8
    assert np.all(np.abs(counts - expected) <= 0.1 * expected)


def test_split_streams_differ_and_reproduce():
    a = RngState(7).split(1).indices(1000, 5)
    b = RngState(7).split(2).indices(1000, 5)
    a2 = RngState(7).split(1).indices(1000, 5)
    assert np.array_equal(a, a2)
    assert not np.array_equal(a, b)


def test_rng_position_advances():
    rng = RngState(0)
    assert rng.position == 0
    rng.indices(10, 2)
    rng.uniform(0, 1, 3)
    assert rng.position == 2
