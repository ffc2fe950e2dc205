import copy

import pytest

from respicam.schemas import MANIFEST_SCHEMA, SUBJECT_RECORD_SCHEMA, validate_manifest

RECORD = {
    "id": "s01",
    "frames_dir": "s01",
    "fps": 30.0,
    "face_box": [10, 20, 40, 40],
    "gt_rr_bpm": 12.0,
    "condition": "static",
}


def _with(**changes):
    rec = copy.deepcopy(RECORD)
    rec.update(changes)
    return rec


def test_schema_has_required_fields():
    assert set(SUBJECT_RECORD_SCHEMA["required"]) == set(RECORD)
    assert MANIFEST_SCHEMA["items"] is SUBJECT_RECORD_SCHEMA


def test_validate_minimal():
    ok, err = validate_manifest([RECORD])
    assert ok and err is None


def test_validate_empty_list_is_schema_valid():
    ok, _ = validate_manifest([])
    assert ok


@pytest.mark.parametrize(
    "data",
    [
        {"id": "s01"},
        [_with(fps=0)],
        [_with(gt_rr_bpm=-1.0)],
        [_with(face_box=[1, 2, 3])],
        [_with(face_box=[1.5, 2, 3, 4])],
        [_with(condition="walking")],
        [_with(id="")],
        [_with(extra=1)],
        [{k: v for k, v in RECORD.items() if k != "fps"}],
    ],
)
def test_validate_invalid(data):
    ok, err = validate_manifest(data)
    assert not ok
    assert err


def test_error_names_the_field():
    ok, err = validate_manifest([RECORD, _with(id="s02", fps="fast")])
    assert not ok
    assert err.startswith("1/fps")


def test_duplicate_ids_rejected():
    ok, err = validate_manifest([RECORD, _with(frames_dir="other")])
    assert not ok
    assert "duplicate" in err


@pytest.mark.parametrize("box", [[0, 0, 0, 10], [0, 0, 10, -1]])
def test_degenerate_face_box_rejected(box):
    ok, _ = validate_manifest([_with(face_box=box)])
    assert not ok
