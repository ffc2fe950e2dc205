"""Subject records and the JSON manifest that lists them."""

from __future__ import annotations

import json
import os
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

from .errors import ManifestError
from .roi import BoundingBox
from .schemas import validate_manifest


class Condition(str, Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class SubjectRecord:
    id: str
    frames_dir: Path
    fps: float
    face_box: BoundingBox
    gt_rr_bpm: float
    condition: Condition = Condition.STATIC

    def __post_init__(self) -> None:
        if self.gt_rr_bpm <= 0:
            raise ValueError(f"{self.id}: gt_rr_bpm must be > 0, got {self.gt_rr_bpm}")
        if self.fps <= 0:
            raise ValueError(f"{self.id}: fps must be > 0, got {self.fps}")

    def to_dict(self, base_dir: Path | None = None) -> dict[str, Any]:
        frames_dir = self.frames_dir
        if base_dir is not None:
            try:
                frames_dir = Path(os.path.relpath(frames_dir, base_dir))
            except ValueError:  # different drive on Windows
                pass
        return {
            "id": self.id,
            "frames_dir": frames_dir.as_posix(),
            "fps": self.fps,
            "face_box": self.face_box.as_list(),
            "gt_rr_bpm": self.gt_rr_bpm,
            "condition": self.condition.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], base_dir: Path | None = None) -> SubjectRecord:
        frames_dir = Path(data["frames_dir"])
        if base_dir is not None and not frames_dir.is_absolute():
            frames_dir = base_dir / frames_dir
        return cls(
            id=str(data["id"]),
            frames_dir=frames_dir,
            fps=float(data["fps"]),
            face_box=BoundingBox.from_list(data["face_box"]),
            gt_rr_bpm=float(data["gt_rr_bpm"]),
            condition=Condition(data["condition"]),
        )


def load_manifest(path: str | Path, allow_empty: bool = False) -> list[SubjectRecord]:
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ManifestError(f"cannot read manifest {p}: {e}") from e
    ok, err = validate_manifest(data)
    if not ok:
        raise ManifestError(f"invalid manifest {p}: {err}")
    if not data and not allow_empty:
        raise ManifestError(f"manifest {p} lists no subjects")
    try:
        return [SubjectRecord.from_dict(rec, base_dir=p.parent) for rec in data]
    except ValueError as e:
        raise ManifestError(f"invalid manifest {p}: {e}") from e


def save_manifest(records: Sequence[SubjectRecord], path: str | Path) -> Path:
    """Write records as a JSON array; frame dirs are stored relative to the file."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    payload = [r.to_dict(base_dir=p.parent) for r in records]
    p.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return p


__all__ = ["Condition", "SubjectRecord", "load_manifest", "save_manifest"]
