import numpy as np
import pytest

from thresholdctl import hsf, logistic, smoothed_hsf, surrogate_grads
from thresholdctl.errors import WidthOutOfRange
from thresholdctl.surrogate import logistic_grad, sgl_sigma_partial, sgl_surrogate


class TestStep:
    def test_values(self):
        assert (hsf(0.3), hsf(0.0), hsf(-0.3)) == (1, 0, 0)

    def test_array(self):
        np.testing.assert_array_equal(hsf(np.array([-1.0, 0.0, 1e-12])), [0, 0, 1])


class TestSmoothed:
    def test_center(self):
        for w in (0.01, 0.1, 0.9):
            assert smoothed_hsf(0.0, w) == 0.5

    def test_junctions(self):
        assert smoothed_hsf(0.1, 0.1) == pytest.approx(1.0)
        assert smoothed_hsf(-0.1, 0.1) == pytest.approx(0.0)

    def test_inside(self):
        assert smoothed_hsf(0.05, 0.1) == pytest.approx(0.5 * np.sin(np.pi / 4) + 0.5)
        assert smoothed_hsf(0.05, 0.1) == pytest.approx(0.85355, abs=1e-5)

    def test_flat_outside(self):
        np.testing.assert_array_equal(smoothed_hsf(np.array([-0.5, 0.5]), 0.1), [0.0, 1.0])

    @pytest.mark.parametrize("w", [0.0, 1.0, -0.1])
    def test_width_range(self, w):
        with pytest.raises(WidthOutOfRange):
            smoothed_hsf(0.0, w)


class TestSurrogateGrads:
    def test_center(self):
        gz, gw = surrogate_grads(0.0, 0.1)
        assert gz == pytest.approx(np.pi / 0.4)
        assert gw == 0.0

    def test_truncated(self):
        assert surrogate_grads(0.2, 0.1) == (0.0, 0.0)
        assert surrogate_grads(-0.1, 0.1) == (0.0, 0.0)

    def test_against_oracle(self, derived):
        gz, gw = surrogate_grads(0.05, 0.1)
        assert gz == pytest.approx(derived["surrogate_dz"], rel=1e-6)
        assert gw == pytest.approx(derived["surrogate_dw"], rel=1e-6)
        assert gz == pytest.approx(5.55360, abs=1e-5)
        assert gw == pytest.approx(-2.77680, abs=1e-5)

    def test_broadcast(self):
        gz, gw = surrogate_grads(np.array([[0.0, 0.05], [0.2, -0.05]]), np.array([0.1, 0.1]))
        assert gz.shape == gw.shape == (2, 2)
        assert gw[1, 1] == -gw[0, 1]


class TestLogistic:
    def test_values(self):
        assert logistic(0.0) == 0.5
        assert logistic_grad(0.0) == 0.25
        assert abs(logistic(40.0) - 1.0) < 1e-15

    def test_no_overflow(self):
        with np.errstate(all="raise"):
            assert logistic(-1000.0) == 0.0
            assert logistic(1000.0) == 1.0


class TestSigmoidSurrogate:
    def test_center(self):
        assert sgl_surrogate(0.0, 50.0) == 12.5

    def test_sigma_partial_zero_at_threshold(self):
        assert sgl_sigma_partial(0.0, 50.0) == 0.0

    def test_sigma_partial_is_derivative(self):
        from scipy.special import expit

        z, s, h = 0.013, 50.0, 1e-6
        fd = (expit((s + h) * z) - expit((s - h) * z)) / (2 * h)
        assert sgl_sigma_partial(z, s) == pytest.approx(fd, rel=1e-6)

    def test_surrogate_is_derivative(self):
        from scipy.special import expit

        z, s, h = 0.013, 50.0, 1e-7
        fd = (expit(s * (z + h)) - expit(s * (z - h))) / (2 * h)
        assert sgl_surrogate(z, s) == pytest.approx(fd, rel=1e-6)
