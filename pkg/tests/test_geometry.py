import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from relcalc.errors import DimensionError
from relcalc.geometry import (CUTOFF_R1, CUTOFF_R2, TorusEmbedding, cutoff_chi, fiber_fourier,
                              fiber_fourier_inverse, riemann_weyl, smooth_step, wrap)

TWO_PI = 2 * np.pi
finite = st.floats(-20, 20, allow_nan=False)


def test_zero_vector_fixes_diagonal():
    x = np.array([1.0, 2.0])
    _, y = riemann_weyl(x, np.zeros(2))
    np.testing.assert_allclose(y, x)


def test_riemann_weyl_one_dim():
    _, y = riemann_weyl(0.0, np.pi / 4)
    assert y == pytest.approx(7 * np.pi / 4)


def test_riemann_weyl_two_dim():
    _, y = riemann_weyl([np.pi, np.pi], [np.pi / 2, -np.pi / 2])
    np.testing.assert_allclose(y, [np.pi / 2, 3 * np.pi / 2])


@given(arrays(float, 3, elements=finite), arrays(float, 3, elements=finite))
def test_riemann_weyl_lands_in_fundamental_domain(x, xi):
    _, y = riemann_weyl(x, xi)
    assert np.all((y >= 0) & (y < TWO_PI))
    np.testing.assert_allclose(wrap(y - (x - xi)), 0, atol=1e-9)


def test_cutoff_values():
    assert cutoff_chi(np.zeros(2)) == 1.0
    assert cutoff_chi(np.array([np.pi, 0.0])) == 0.0
    mid = cutoff_chi(np.array([(CUTOFF_R1 + CUTOFF_R2) / 2, 0.0]))
    # symmetric smooth step: exactly one half at the midpoint
    assert mid == pytest.approx(0.5)


@given(st.floats(0, np.pi), st.floats(0, np.pi))
def test_cutoff_is_radially_monotone(r, s):
    a, b = sorted((r, s))
    assert cutoff_chi(np.array([a])) >= cutoff_chi(np.array([b]))


def test_cutoff_rejects_bad_radii():
    with pytest.raises(ValueError):
        cutoff_chi(np.zeros(1), r1=1.0, r2=0.5)


def test_smooth_step_limits():
    np.testing.assert_array_equal(smooth_step(np.array([-1.0, 0.0, 1.0, 2.0])), [0, 0, 1, 1])


def test_fourier_of_constant_is_delta():
    N = 16
    f = fiber_fourier_inverse(np.ones(N), N, 1)
    expected = np.zeros(N)
    expected[0] = N / TWO_PI
    np.testing.assert_allclose(f, expected, atol=1e-14)


def test_delta_frequency_gives_constant():
    N = 16
    v = np.zeros(N)
    v[N // 2] = 1.0          # frequency 0 in centered order
    np.testing.assert_allclose(fiber_fourier_inverse(v, N, 1), np.full(N, 1 / TWO_PI))


@settings(max_examples=30)
@given(st.sampled_from([(8, 1), (8, 2), (4, 3)]), st.integers(0, 2**31))
def test_fiber_fourier_round_trip(shape, seed):
    N, dim = shape
    r = np.random.default_rng(seed)
    v = r.normal(size=(N,) * dim) + 1j * r.normal(size=(N,) * dim)
    np.testing.assert_allclose(fiber_fourier(fiber_fourier_inverse(v, N, dim), N, dim), v, atol=1e-12)


def test_fiber_fourier_matches_direct_sum():
    # oracle: the defining sum evaluated term by term
    N = 8
    r = np.random.default_rng(0)
    v = r.normal(size=N) + 1j * r.normal(size=N)
    k = np.arange(-N // 2, N // 2)
    x = TWO_PI * np.arange(N) / N
    direct = (np.exp(1j * np.outer(x, k)) @ v) / TWO_PI
    np.testing.assert_allclose(fiber_fourier_inverse(v, N, 1), direct, atol=1e-13)


def test_fiber_fourier_length_mismatch():
    with pytest.raises(DimensionError):
        fiber_fourier_inverse(np.ones(7), 8, 1)


def test_embedding_validation():
    with pytest.raises(DimensionError):
        TorusEmbedding(2, 2, 8)
    with pytest.raises(DimensionError):
        TorusEmbedding(2, 1, 7)


def test_slice_indices_pick_x2_zero(emb8):
    pts = emb8.grid("M")[emb8.slice_indices()]
    np.testing.assert_array_equal(pts[:, 1], 0.0)
    np.testing.assert_allclose(pts[:, 0], emb8.axis)


def test_grid_sizes(emb8):
    assert emb8.grid("M").shape == (64, 2)
    assert emb8.grid("Y").shape == (8, 1)
    assert emb8.weight("M") == pytest.approx(emb8.h ** 2)
    assert emb8.nu == 1
