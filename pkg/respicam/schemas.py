"""JSON Schema for the subject manifest.

A manifest is a JSON array of subject records; ``frames_dir`` may be
relative, in which case it is resolved against the manifest's directory.
"""

from __future__ import annotations

from typing import Any

import jsonschema

SUBJECT_RECORD_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "frames_dir": {"type": "string", "minLength": 1},
        "fps": {"type": "number", "exclusiveMinimum": 0},
        "face_box": {
            "type": "array",
            "items": {"type": "integer"},
            "minItems": 4,
            "maxItems": 4,
        },
        "gt_rr_bpm": {"type": "number", "exclusiveMinimum": 0},
        "condition": {"type": "string", "enum": ["static", "dynamic"]},
    },
    "required": ["id", "frames_dir", "fps", "face_box", "gt_rr_bpm", "condition"],
    "additionalProperties": False,
}


MANIFEST_SCHEMA: dict[str, Any] = {
    "type": "array",
    "items": SUBJECT_RECORD_SCHEMA,
}


def validate_manifest(data: Any) -> tuple[bool, str | None]:
    """Validate decoded manifest JSON against MANIFEST_SCHEMA.

    Returns (is_valid, error_message). Duplicate subject ids are rejected
    too, since ids key the per-subject report.
    """
    try:
        jsonschema.validate(instance=data, schema=MANIFEST_SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        return False, f"{where}: {e.message}"
    seen: set[str] = set()
    for rec in data:
        if rec["id"] in seen:
            return False, f"duplicate subject id {rec['id']!r}"
        seen.add(rec["id"])
        _, _, w, h = rec["face_box"]
        if w <= 0 or h <= 0:
            return False, f"{rec['id']}: face_box needs w > 0 and h > 0"
    return True, None


__all__ = ["SUBJECT_RECORD_SCHEMA", "MANIFEST_SCHEMA", "validate_manifest"]
