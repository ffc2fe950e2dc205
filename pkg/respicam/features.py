"""Structure tensor, Harris / Shi-Tomasi responses and corner selection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from .errors import BadWindowError, ImageTooSmallError, NoCornersError
from .imgproc import FloatImage, ImageLike, as_float_image, sobel_gradients
from .roi import BoundingBox

HARRIS_K_RANGE: tuple[float, float] = (0.04, 0.06)


class DetectorKind(str, Enum):
    HARRIS = "harris"
    SHI_TOMASI = "shitomasi"

    @property
    def label(self) -> str:
        return "Harris" if self is DetectorKind.HARRIS else "ShiTomasi"


@dataclass(frozen=True)
class StructureTensorField:
    """Per-pixel windowed sums of Ix^2, IxIy, Iy^2."""

    sxx: FloatImage
    sxy: FloatImage
    syy: FloatImage


@dataclass(frozen=True)
class FeaturePoint:
    x: float
    y: float
    response: float = 0.0

    def shifted(self, dx: float, dy: float) -> FeaturePoint:
        return FeaturePoint(self.x + dx, self.y + dy, self.response)


@dataclass(frozen=True)
class FeatureParams:
    max_count: int = 100
    quality: float = 0.01
    min_dist: float = 7.0
    harris_k: float = 0.04
    block_size: int = 3

    def __post_init__(self) -> None:
        if self.max_count < 1:
            raise ValueError(f"max_count must be >= 1, got {self.max_count}")
        if not 0.0 < self.quality < 1.0:
            raise ValueError(f"quality must be in (0, 1), got {self.quality}")
        if self.min_dist < 0:
            raise ValueError(f"min_dist must be >= 0, got {self.min_dist}")
        lo, hi = HARRIS_K_RANGE
        if not lo <= self.harris_k <= hi:
            raise ValueError(f"harris_k must be in [{lo}, {hi}], got {self.harris_k}")
        if self.block_size < 1 or self.block_size % 2 == 0:
            raise ValueError(f"block_size must be odd and >= 1, got {self.block_size}")


def structure_tensor(img: ImageLike, window: int = 3) -> StructureTensorField:
    if window < 1 or window % 2 == 0:
        raise BadWindowError(f"window must be odd and >= 1, got {window}")
    arr = as_float_image(img)
    if arr.shape[0] < max(window, 3) or arr.shape[1] < max(window, 3):
        raise ImageTooSmallError(
            f"image {arr.shape[1]}x{arr.shape[0]} is smaller than the {window}x{window} window"
        )
    ix, iy = sobel_gradients(arr)
    box = np.ones((window, window), dtype=np.float64)

    def wsum(a: FloatImage) -> FloatImage:
        return ndimage.correlate(a, box, mode="nearest")

    return StructureTensorField(sxx=wsum(ix * ix), sxy=wsum(ix * iy), syy=wsum(iy * iy))


def corner_response(
    field: StructureTensorField, kind: DetectorKind, k: float = 0.04
) -> FloatImage:
    sxx, sxy, syy = field.sxx, field.sxy, field.syy
    if kind is DetectorKind.HARRIS:
        lo, hi = HARRIS_K_RANGE
        if not lo <= k <= hi:
            raise ValueError(f"Harris k must be in [{lo}, {hi}], got {k}")
        trace = sxx + syy
        return (sxx * syy - sxy * sxy) - k * trace * trace
    # smaller eigenvalue of a PSD 2x2; clip the rounding residue below zero
    disc = np.sqrt((sxx - syy) ** 2 + 4.0 * sxy * sxy)
    return np.maximum(((sxx + syy) - disc) / 2.0, 0.0)


def _disk(min_dist: float) -> npt.NDArray[np.bool_]:
    """Offsets closer than min_dist to the centre."""
    r = max(0, math.ceil(min_dist) - 1)
    off = np.arange(-r, r + 1)
    return off[:, None] ** 2 + off[None, :] ** 2 < float(min_dist) ** 2


def select_corners(
    resp: FloatImage, max_count: int = 100, quality: float = 0.01, min_dist: float = 7.0
) -> list[FeaturePoint]:
    """Greedy strongest-first selection with radial suppression.

    Every pixel with response >= quality * max(resp) is a candidate; a kept
    point suppresses candidates closer than min_dist. Ties are broken by
    (y, x) ascending. A response with no positive value has no corners.
    """
    if max_count < 1:
        raise ValueError(f"max_count must be >= 1, got {max_count}")
    r = np.asarray(resp, dtype=np.float64)
    if r.size == 0:
        raise NoCornersError("empty response image")
    peak = float(np.max(r))
    if not np.isfinite(peak) or peak <= 0.0:
        raise NoCornersError("no positive corner response")
    ys, xs = np.nonzero(r >= quality * peak)
    if ys.size == 0:
        raise NoCornersError(f"no pixel passes quality {quality}")
    vals = r[ys, xs]
    order = np.lexsort((xs, ys, -vals))

    disk = _disk(min_dist)
    rad = disk.shape[0] // 2
    h, w = r.shape
    suppressed = np.zeros((h, w), dtype=bool)
    points: list[FeaturePoint] = []
    for i in order:
        x, y = int(xs[i]), int(ys[i])
        if suppressed[y, x]:
            continue
        points.append(FeaturePoint(float(x), float(y), float(vals[i])))
        if len(points) >= max_count:
            break
        y0, y1 = max(0, y - rad), min(h, y + rad + 1)
        x0, x1 = max(0, x - rad), min(w, x + rad + 1)
        suppressed[y0:y1, x0:x1] |= disk[
            y0 - y + rad : y1 - y + rad, x0 - x + rad : x1 - x + rad
        ]
    return points


def detect_corners(
    img: ImageLike,
    kind: DetectorKind,
    params: FeatureParams | None = None,
    region: BoundingBox | None = None,
) -> list[FeaturePoint]:
    """structure_tensor -> corner_response -> select_corners.

    With a region, responses are computed on the whole image (so borders of
    the region see real neighbours) but only pixels inside the region are
    eligible; returned coordinates stay in whole-image pixels.
    """
    p = params or FeatureParams()
    resp = corner_response(structure_tensor(img, p.block_size), kind, p.harris_k)
    if region is None:
        return select_corners(resp, p.max_count, p.quality, p.min_dist)
    h, w = resp.shape
    if region.x < 0 or region.y < 0 or region.right > w or region.bottom > h:
        raise ValueError(f"region {region} outside image {w}x{h}")
    sub = resp[region.y : region.bottom, region.x : region.right]
    pts = select_corners(sub, p.max_count, p.quality, p.min_dist)
    return [pt.shifted(region.x, region.y) for pt in pts]


__all__ = [
    "DetectorKind",
    "StructureTensorField",
    "FeaturePoint",
    "FeatureParams",
    "HARRIS_K_RANGE",
    "structure_tensor",
    "corner_response",
    "select_corners",
    "detect_corners",
]
