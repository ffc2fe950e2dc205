import pytest

from respicam.errors import OutOfBoundsError, RoiTooSmallError
from respicam.roi import (
    DEFAULT_GEOMETRY,
    BoundingBox,
    RoiGeometry,
    SizeClass,
    chest_roi_from_face,
    clamp_box,
    raw_chest_box,
    tracking_window,
)

FACE = BoundingBox(100, 50, 100, 100)


def test_medium_roi_geometry():
    assert chest_roi_from_face(FACE, SizeClass.MEDIUM, 1280, 720) == BoundingBox(70, 170, 160, 100)


def test_small_roi_geometry():
    assert chest_roi_from_face(FACE, SizeClass.SMALL, 1280, 720) == BoundingBox(90, 170, 120, 80)


def test_large_roi_clamped_to_frame():
    face = BoundingBox(1200, 500, 100, 100)
    roi = chest_roi_from_face(face, SizeClass.LARGE, 1280, 720)
    assert roi.right == 1280
    assert roi.bottom == 720
    assert roi == BoundingBox(1150, 620, 130, 100)


def test_face_near_bottom_has_no_chest():
    # the chest would start at y=720, entirely below the frame
    with pytest.raises(OutOfBoundsError):
        chest_roi_from_face(BoundingBox(1200, 600, 100, 100), SizeClass.LARGE, 1280, 720)


def test_degenerate_roi():
    face = BoundingBox(100, 50, 100, 100)
    with pytest.raises(RoiTooSmallError):
        chest_roi_from_face(face, SizeClass.MEDIUM, 1280, 176)


def test_clamp_box_cases():
    assert clamp_box(BoundingBox(-10, -10, 50, 50), 100, 100) == BoundingBox(0, 0, 40, 40)
    inside = BoundingBox(10, 10, 20, 20)
    assert clamp_box(inside, 100, 100) == inside
    with pytest.raises(OutOfBoundsError):
        clamp_box(BoundingBox(200, 200, 10, 10), 100, 100)


@pytest.mark.parametrize("face", [FACE, BoundingBox(13, 7, 37, 41), BoundingBox(0, 0, 64, 48)])
def test_area_monotone_and_centered(face):
    boxes = {s: raw_chest_box(face, DEFAULT_GEOMETRY[s]) for s in SizeClass}
    assert boxes[SizeClass.SMALL].area < boxes[SizeClass.MEDIUM].area < boxes[SizeClass.LARGE].area
    for box in boxes.values():
        assert abs(box.center_x - face.center_x) <= 0.5


def test_output_inside_frame():
    for x in range(0, 1280, 97):
        face = BoundingBox(x, 40, 90, 90)
        for size in SizeClass:
            roi = chest_roi_from_face(face, size, 1280, 720)
            assert roi.x >= 0 and roi.y >= 0 and roi.right <= 1280 and roi.bottom <= 720


def test_custom_geometry():
    geometry = dict(DEFAULT_GEOMETRY)
    geometry[SizeClass.MEDIUM] = RoiGeometry(w_mul=1.0, h_mul=0.5, y_off_mul=1.0)
    roi = chest_roi_from_face(FACE, SizeClass.MEDIUM, 1280, 720, geometry)
    assert roi == BoundingBox(100, 150, 100, 50)


def test_size_codes():
    assert [s.code for s in (SizeClass.MEDIUM, SizeClass.LARGE, SizeClass.SMALL)] == [
        "BM",
        "BL",
        "BS",
    ]
    assert SizeClass.MEDIUM.label == "Bbox Medium"


def test_tracking_window_grows_and_clamps():
    roi = BoundingBox(70, 170, 160, 100)
    win = tracking_window(roi, 1280, 720, 1.0)
    assert win == BoundingBox(0, 70, 310, 300)
    assert tracking_window(roi, 1280, 720, 0.0) == roi


def test_bounding_box_list_roundtrip():
    assert BoundingBox.from_list([1, 2, 3, 4]).as_list() == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        BoundingBox.from_list([1, 2, 3])
