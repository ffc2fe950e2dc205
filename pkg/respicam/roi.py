"""Chest ROI derived from a face bounding box.

The face box comes from the subject manifest; detection itself happens
upstream. Geometry multipliers are calibration values, overridable through
``roi.<size>.{w_mul,h_mul,y_off_mul}`` config keys.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum

from .errors import OutOfBoundsError, RoiTooSmallError

MIN_ROI_SIDE = 8  # px; w or h at or below this is degenerate


@dataclass(eq=True, frozen=True)
class BoundingBox:
    x: int
    y: int
    w: int
    h: int

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def center_x(self) -> float:
        return self.x + self.w / 2.0

    def as_list(self) -> list[int]:
        return [self.x, self.y, self.w, self.h]

    @classmethod
    def from_list(cls, values: list[int] | tuple[int, ...]) -> BoundingBox:
        if len(values) != 4:
            raise ValueError(f"bounding box needs [x, y, w, h], got {values!r}")
        x, y, w, h = (int(v) for v in values)
        return cls(x, y, w, h)


class SizeClass(str, Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"

    @property
    def code(self) -> str:
        """Acronym fragment: BS / BM / BL."""
        return "B" + self.value[0].upper()

    @property
    def label(self) -> str:
        return f"Bbox {self.value.capitalize()}"


@dataclass(frozen=True)
class RoiGeometry:
    """Chest box relative to the face box: size multipliers and vertical offset."""

    w_mul: float
    h_mul: float
    y_off_mul: float = 1.2

    def __post_init__(self) -> None:
        if self.w_mul <= 0 or self.h_mul <= 0:
            raise ValueError(f"ROI multipliers must be > 0, got {self}")


DEFAULT_GEOMETRY: dict[SizeClass, RoiGeometry] = {
    SizeClass.SMALL: RoiGeometry(w_mul=1.2, h_mul=0.8),
    SizeClass.MEDIUM: RoiGeometry(w_mul=1.6, h_mul=1.0),
    SizeClass.LARGE: RoiGeometry(w_mul=2.0, h_mul=1.2),
}


def _round(v: float) -> int:
    # half up, so 0.5 px offsets do not flip with banker's rounding
    return int(math.floor(v + 0.5))


def clamp_box(box: BoundingBox, frame_w: int, frame_h: int) -> BoundingBox:
    x0 = max(box.x, 0)
    y0 = max(box.y, 0)
    x1 = min(box.right, frame_w)
    y1 = min(box.bottom, frame_h)
    if x1 <= x0 or y1 <= y0:
        raise OutOfBoundsError(f"{box} does not intersect frame {frame_w}x{frame_h}")
    return BoundingBox(x0, y0, x1 - x0, y1 - y0)


def raw_chest_box(face: BoundingBox, geometry: RoiGeometry) -> BoundingBox:
    """Chest box before clamping; may extend past the frame."""
    w = _round(geometry.w_mul * face.w)
    h = _round(geometry.h_mul * face.h)
    x = _round(face.center_x - w / 2.0)
    y = _round(face.y + geometry.y_off_mul * face.h)
    return BoundingBox(x, y, w, h)


def chest_roi_from_face(
    face: BoundingBox,
    size: SizeClass,
    frame_w: int,
    frame_h: int,
    geometry: Mapping[SizeClass, RoiGeometry] | None = None,
) -> BoundingBox:
    geo = (geometry or DEFAULT_GEOMETRY)[size]
    box = clamp_box(raw_chest_box(face, geo), frame_w, frame_h)
    if box.w <= MIN_ROI_SIDE or box.h <= MIN_ROI_SIDE:
        raise RoiTooSmallError(f"{size.value} ROI {box} is degenerate after clamping")
    return box


def tracking_window(
    roi: BoundingBox, frame_w: int, frame_h: int, margin_mul: float
) -> BoundingBox:
    """Grow the ROI so tracked points can move with the chest and stay in view.

    Adds margin_mul * roi.h above and below and margin_mul * roi.w / 2 on each
    side, then clamps to the frame.
    """
    if margin_mul < 0:
        raise ValueError(f"margin_mul must be >= 0, got {margin_mul}")
    dy = _round(margin_mul * roi.h)
    dx = _round(margin_mul * roi.w / 2.0)
    grown = BoundingBox(roi.x - dx, roi.y - dy, roi.w + 2 * dx, roi.h + 2 * dy)
    return clamp_box(grown, frame_w, frame_h)


__all__ = [
    "BoundingBox",
    "SizeClass",
    "RoiGeometry",
    "DEFAULT_GEOMETRY",
    "MIN_ROI_SIDE",
    "clamp_box",
    "raw_chest_box",
    "chest_roi_from_face",
    "tracking_window",
]
