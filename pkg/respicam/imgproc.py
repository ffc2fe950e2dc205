"""3x3 convolution engine and the enhancement filters.

Kernels are applied as written (correlation, no flip) with edge-replicated
borders. Outputs are float64 and keep their sign; nothing is clamped back to
8 bits.
"""

from __future__ import annotations

from enum import Enum
from typing import Union

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from .errors import ImageTooSmallError
from .frame_io import GrayFrame

FloatImage = npt.NDArray[np.float64]
ImageLike = Union[GrayFrame, npt.NDArray[np.generic]]

LAPLACIAN_KERNEL: FloatImage = np.array(
    [[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]], dtype=np.float64
)
SOBEL_X_KERNEL: FloatImage = np.array(
    [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]], dtype=np.float64
)
SOBEL_Y_KERNEL: FloatImage = np.array(
    [[1.0, 2.0, 1.0], [0.0, 0.0, 0.0], [-1.0, -2.0, -1.0]], dtype=np.float64
)


class FilterKind(str, Enum):
    NONE = "none"
    LAPLACIAN = "laplacian"
    SOBEL = "sobel"

    @property
    def code(self) -> str:
        """Acronym fragment: FL / LP / SO."""
        return _FILTER_CODES[self]

    @property
    def label(self) -> str:
        return _FILTER_LABELS[self]


_FILTER_CODES = {FilterKind.NONE: "FL", FilterKind.LAPLACIAN: "LP", FilterKind.SOBEL: "SO"}
_FILTER_LABELS = {
    FilterKind.NONE: "Filterless",
    FilterKind.LAPLACIAN: "Laplacian",
    FilterKind.SOBEL: "Sobel",
}


def as_float_image(img: ImageLike) -> FloatImage:
    pixels = img.pixels if isinstance(img, GrayFrame) else img
    arr = np.asarray(pixels, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {arr.shape}")
    return arr


def convolve2d(img: ImageLike, kernel: npt.ArrayLike) -> FloatImage:
    k = np.asarray(kernel, dtype=np.float64)
    if k.shape != (3, 3):
        raise ValueError(f"kernel must be 3x3, got {k.shape}")
    arr = as_float_image(img)
    if arr.shape[0] < 3 or arr.shape[1] < 3:
        raise ImageTooSmallError(f"image {arr.shape[1]}x{arr.shape[0]} is smaller than 3x3")
    return ndimage.correlate(arr, k, mode="nearest")


def laplacian_filter(img: ImageLike) -> FloatImage:
    return convolve2d(img, LAPLACIAN_KERNEL)


def sobel_gradients(img: ImageLike) -> tuple[FloatImage, FloatImage]:
    """(Gx, Gy) with the kernels as written; Gy is positive for bright-above-dark."""
    return convolve2d(img, SOBEL_X_KERNEL), convolve2d(img, SOBEL_Y_KERNEL)


def sobel_magnitude(img: ImageLike) -> FloatImage:
    gx, gy = sobel_gradients(img)
    return np.hypot(gx, gy)


def apply_filter(img: ImageLike, kind: FilterKind) -> FloatImage:
    if kind is FilterKind.LAPLACIAN:
        return laplacian_filter(img)
    if kind is FilterKind.SOBEL:
        return sobel_magnitude(img)
    return as_float_image(img).copy()


__all__ = [
    "FloatImage",
    "FilterKind",
    "LAPLACIAN_KERNEL",
    "SOBEL_X_KERNEL",
    "SOBEL_Y_KERNEL",
    "as_float_image",
    "convolve2d",
    "laplacian_filter",
    "sobel_gradients",
    "sobel_magnitude",
    "apply_filter",
]
