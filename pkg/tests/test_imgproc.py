import numpy as np
import pytest

from respicam.errors import ImageTooSmallError
from respicam.frame_io import GrayFrame
from respicam.imgproc import (
    LAPLACIAN_KERNEL,
    SOBEL_X_KERNEL,
    SOBEL_Y_KERNEL,
    FilterKind,
    apply_filter,
    convolve2d,
    laplacian_filter,
    sobel_gradients,
    sobel_magnitude,
)


def _impulse(n=7):
    img = np.zeros((n, n))
    img[n // 2, n // 2] = 1.0
    return img


def test_kernels_as_written():
    assert LAPLACIAN_KERNEL.tolist() == [[0, 1, 0], [1, -4, 1], [0, 1, 0]]
    assert SOBEL_X_KERNEL.tolist() == [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
    assert SOBEL_Y_KERNEL.tolist() == [[1, 2, 1], [0, 0, 0], [-1, -2, -1]]


@pytest.mark.parametrize("kernel", [LAPLACIAN_KERNEL, SOBEL_X_KERNEL, SOBEL_Y_KERNEL])
def test_zero_sum_kernel_on_constant(kernel):
    out = convolve2d(np.full((9, 11), 37.0), kernel)
    assert np.array_equal(out, np.zeros((9, 11)))


def test_laplacian_impulse():
    out = laplacian_filter(_impulse())
    expected = np.zeros((7, 7))
    expected[3, 3] = -4.0
    expected[2, 3] = expected[4, 3] = expected[3, 2] = expected[3, 4] = 1.0
    assert np.array_equal(out, expected)


def test_laplacian_ramp_interior_zero():
    ramp = np.tile(np.arange(10, dtype=np.float64), (8, 1))
    out = laplacian_filter(ramp)
    assert np.array_equal(out[:, 1:-1], np.zeros((8, 8)))


def test_sobel_on_ramps():
    x_ramp = np.tile(np.arange(10, dtype=np.float64), (8, 1))
    gx, gy = sobel_gradients(x_ramp)
    assert np.array_equal(gx[:, 1:-1], np.full((8, 8), 8.0))
    assert np.array_equal(gy, np.zeros((8, 10)))

    y_ramp = x_ramp.T.copy()
    gx, gy = sobel_gradients(y_ramp)
    # top row of the y kernel is positive, so brightness growing downward reads negative
    assert np.array_equal(gy[1:-1, :], np.full((8, 8), -8.0))
    assert np.array_equal(sobel_magnitude(y_ramp)[1:-1, :], np.full((8, 8), 8.0))


def test_step_image_exact():
    step = np.zeros((6, 8))
    step[:, 4:] = 10.0
    lap = laplacian_filter(step)
    assert lap[2, 3] == 10.0 and lap[2, 4] == -10.0
    assert np.count_nonzero(lap[:, [0, 1, 2, 5, 6, 7]]) == 0

    mag = sobel_magnitude(step)
    assert np.array_equal(mag[:, 3], np.full(6, 40.0))
    assert np.array_equal(mag[:, 4], np.full(6, 40.0))
    assert np.count_nonzero(mag[:, [0, 1, 2, 5, 6, 7]]) == 0


def test_sobel_magnitude_impulse_center_zero():
    mag = sobel_magnitude(_impulse())
    assert mag[3, 3] == 0.0
    assert mag[3, 2] == 2.0 and mag[2, 3] == 2.0
    assert mag[2, 2] == pytest.approx(np.sqrt(2.0))


def test_output_keeps_shape_and_accepts_frames():
    frame = GrayFrame(np.arange(20, dtype=np.uint8).reshape(4, 5))
    out = convolve2d(frame, LAPLACIAN_KERNEL)
    assert out.shape == (4, 5) and out.dtype == np.float64


def test_too_small_and_bad_kernel():
    with pytest.raises(ImageTooSmallError):
        convolve2d(np.zeros((2, 2)), LAPLACIAN_KERNEL)
    with pytest.raises(ValueError):
        convolve2d(np.zeros((5, 5)), np.ones((5, 5)))


def test_apply_filter_dispatch():
    rng = np.random.default_rng(1)
    img = rng.integers(0, 256, size=(9, 9)).astype(np.uint8)
    assert np.array_equal(apply_filter(img, FilterKind.NONE), img.astype(np.float64))
    assert np.array_equal(apply_filter(img, FilterKind.LAPLACIAN), laplacian_filter(img))
    assert np.array_equal(apply_filter(img, FilterKind.SOBEL), sobel_magnitude(img))
    assert [k.code for k in FilterKind] == ["FL", "LP", "SO"]


@pytest.mark.parametrize("kernel", [LAPLACIAN_KERNEL, SOBEL_X_KERNEL, SOBEL_Y_KERNEL])
def test_convolve_is_linear(kernel):
    rng = np.random.default_rng(9)
    a, b = rng.random((12, 15)) * 255.0, rng.random((12, 15)) * 255.0
    ca, cb = -1.7, 0.35
    lhs = convolve2d(ca * a + cb * b, kernel)
    rhs = ca * convolve2d(a, kernel) + cb * convolve2d(b, kernel)
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * np.max(np.abs(rhs)))


@pytest.mark.parametrize("turns", [1, 2, 3])
def test_sobel_magnitude_follows_rotation(turns):
    rng = np.random.default_rng(10)
    img = rng.integers(0, 256, size=(11, 14)).astype(np.float64)
    rotated = sobel_magnitude(np.rot90(img, turns))
    assert np.allclose(rotated, np.rot90(sobel_magnitude(img), turns), atol=1e-9)
