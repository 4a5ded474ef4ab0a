"""
Unit tests for the shapelet descriptor and detector
"""

import pytest
import numpy as np

from core.errors import ShapeError
from sdd.descriptor import describe, activate, detect


def nested_loop_similarity(x, shapelets, bias):
    """Direct same-padded convolution, zero outside the series"""
    T = x.shape[0]
    N, L = shapelets.shape
    out = np.zeros((T, N))
    for t in range(T):
        for n in range(N):
            total = bias[n]
            for j in range(L):
                k = t - L // 2 + j
                if 0 <= k < T:
                    total += x[k] * shapelets[n, j]
            out[t, n] = total
    return out


class TestDescribe:
    """Tests for describe"""

    @pytest.mark.parametrize('T,N,L', [(1, 1, 1), (7, 2, 3), (16, 3, 4), (64, 5, 9), (256, 8, 16)])
    def test_matches_nested_loop(self, T, N, L):
        """Test against the direct convolution"""
        rng = np.random.default_rng(T * 100 + L)
        x = rng.normal(size=T)
        shapelets = rng.normal(size=(N, L))
        bias = rng.normal(size=N)
        np.testing.assert_allclose(
            describe(x, shapelets, bias), nested_loop_similarity(x, shapelets, bias), rtol=0, atol=1e-12
        )

    def test_shapelet_longer_than_series(self):
        """Test that zero padding handles L > T"""
        x = np.array([1.0, 2.0])
        shapelets = np.array([[1.0, 1.0, 1.0, 1.0, 1.0]])
        np.testing.assert_allclose(
            describe(x, shapelets, np.zeros(1)), nested_loop_similarity(x, shapelets, np.zeros(1))
        )

    def test_zero_series_gives_bias(self):
        """Test that an all-zero series returns the bias at every step"""
        out = describe(np.zeros(6), np.ones((2, 3)), np.array([0.5, -1.0]))
        np.testing.assert_array_equal(out, np.tile([0.5, -1.0], (6, 1)))

    def test_single_spike(self):
        """Test a spike picked up by a length-3 shapelet"""
        out = describe(np.array([0.0, 0.0, 1.0, 0.0, 0.0]), np.array([[1.0, 2.0, 3.0]]), np.zeros(1))
        np.testing.assert_allclose(out[:, 0], [0.0, 3.0, 2.0, 1.0, 0.0])

    def test_output_shape(self):
        """Test (T, N) output"""
        assert describe(np.zeros(10), np.ones((3, 4)), np.zeros(3)).shape == (10, 3)

    def test_bad_shapes(self):
        """Test ShapeError on inconsistent inputs"""
        with pytest.raises(ShapeError):
            describe(np.zeros((2, 3)), np.ones((1, 2)), np.zeros(1))
        with pytest.raises(ShapeError):
            describe(np.zeros(5), np.ones((2, 2)), np.zeros(3))


class TestActivate:
    """Tests for activate"""

    def test_rows_sum_to_one(self):
        """Test row-stochastic output on random inputs"""
        rng = np.random.default_rng(1)
        for _ in range(50):
            similarity = rng.normal(scale=50.0, size=(rng.integers(1, 40), rng.integers(1, 9)))
            np.testing.assert_allclose(activate(similarity).sum(axis=1), 1.0, atol=1e-9)

    def test_large_logits(self):
        """Test that huge logits do not overflow"""
        A = activate(np.array([[1000.0, 0.0], [0.0, 1000.0]]))
        assert np.all(np.isfinite(A))
        np.testing.assert_allclose(A, [[1.0, 0.0], [0.0, 1.0]])

    def test_equal_logits(self):
        """Test that equal similarities split evenly"""
        np.testing.assert_allclose(activate(np.array([[2.5, 2.5]])), [[0.5, 0.5]])

    def test_known_values(self):
        """Test a hand-computed softmax"""
        np.testing.assert_allclose(activate(np.array([[np.log(3.0), 0.0]])), [[0.75, 0.25]])


class TestDetect:
    """Tests for detect"""

    def test_tie_breaks_to_lowest_index(self):
        """Test that the earliest of several maxima is returned"""
        A = np.array([[0.1], [0.9], [0.3], [0.9], [0.9]])
        t_star, _ = detect(np.arange(5.0), A, 0, 1)
        assert t_star == 1

    def test_window_centred_and_padded(self):
        """Test the window start t* - L//2 and zero padding at the edges"""
        x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        A = np.array([[1.0], [0.0], [0.0], [0.0], [0.0]])
        t_star, window = detect(x, A, 0, 4)
        assert t_star == 0
        np.testing.assert_array_equal(window, [0.0, 0.0, 1.0, 2.0])

        A = np.array([[0.0], [0.0], [0.0], [0.0], [1.0]])
        _, window = detect(x, A, 0, 4)
        np.testing.assert_array_equal(window, [3.0, 4.0, 5.0, 0.0])

    def test_window_inside(self):
        """Test an interior window"""
        x = np.arange(10.0)
        A = np.zeros((10, 2))
        A[6, 1] = 1.0
        _, window = detect(x, A, 1, 3)
        np.testing.assert_array_equal(window, [5.0, 6.0, 7.0])

    def test_bad_shapelet_index(self):
        """Test ShapeError on an unknown shapelet"""
        with pytest.raises(ShapeError):
            detect(np.zeros(3), np.zeros((3, 2)), 2, 1)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
