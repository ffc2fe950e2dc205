"""Frame sequence loading, grayscale conversion and ROI cropping.

Frames live on disk as one image per file, named ``frame_%06d.<ext>`` with
ext one of pgm/ppm/png. Containers (mp4, avi) are not read here; decode them
to an image directory first, see docs/frames.md.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import numpy.typing as npt
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, DimensionMismatchError, NoFramesError, OutOfBoundsError, WriteError
from .roi import BoundingBox

logger = logging.getLogger(__name__)

FRAME_EXTENSIONS: tuple[str, ...] = (".pgm", ".ppm", ".png")
FRAME_NAME_FORMAT = "frame_{index:06d}{ext}"

# BT.601 luma
LUMA_WEIGHTS: tuple[float, float, float] = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class RgbFrame:
    pixels: npt.NDArray[np.uint8]  # (height, width, 3)

    def __post_init__(self) -> None:
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError(f"RgbFrame needs (h, w, 3) pixels, got {self.pixels.shape}")
        if self.pixels.shape[0] == 0 or self.pixels.shape[1] == 0:
            raise ValueError("RgbFrame must be non-empty")

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])


@dataclass(frozen=True)
class GrayFrame:
    """Single-channel frame.

    Pixels are uint8 straight from disk and float64 once a filter has run.
    """

    pixels: npt.NDArray[np.generic]  # (height, width)

    def __post_init__(self) -> None:
        if self.pixels.ndim != 2:
            raise ValueError(f"GrayFrame needs 2-D pixels, got {self.pixels.shape}")

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)


@dataclass(frozen=True)
class FrameSequence:
    frames: tuple[GrayFrame, ...]
    fps: float

    def __post_init__(self) -> None:
        if self.fps <= 0:
            raise ValueError(f"fps must be > 0, got {self.fps}")
        if not self.frames:
            raise NoFramesError("frame sequence is empty")
        first = self.frames[0].shape
        for i, f in enumerate(self.frames):
            if f.shape != first:
                raise DimensionMismatchError(f"frame {i} is {f.shape}, expected {first}")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def duration_s(self) -> float:
        return len(self.frames) / self.fps


def to_grayscale(frame: RgbFrame) -> GrayFrame:
    rgb = frame.pixels.astype(np.float64)
    wr, wg, wb = LUMA_WEIGHTS
    luma = wr * rgb[..., 0] + wg * rgb[..., 1] + wb * rgb[..., 2]
    # round half up, then clamp
    out = np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)
    return GrayFrame(out)


def crop_roi(frame: GrayFrame, box: BoundingBox) -> GrayFrame:
    if box.x < 0 or box.y < 0 or box.right > frame.width or box.bottom > frame.height:
        raise OutOfBoundsError(f"{box} exceeds frame {frame.width}x{frame.height}")
    return GrayFrame(frame.pixels[box.y : box.bottom, box.x : box.right])


def _decode(path: Path) -> GrayFrame:
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode == "L":
                return GrayFrame(np.asarray(img, dtype=np.uint8).copy())
            rgb = img if img.mode == "RGB" else img.convert("RGB")
            return to_grayscale(RgbFrame(np.asarray(rgb, dtype=np.uint8).copy()))
    except (UnidentifiedImageError, OSError, ValueError) as e:
        raise DecodeError(f"cannot decode {path}: {e}") from e


def list_frame_files(dir_path: str | Path) -> list[Path]:
    root = Path(dir_path)
    if not root.is_dir():
        return []
    files = [p for p in root.iterdir() if p.is_file() and p.suffix.lower() in FRAME_EXTENSIONS]
    return sorted(files, key=lambda p: p.name)


def load_sequence(dir_path: str | Path, fps: float) -> FrameSequence:
    files = list_frame_files(dir_path)
    if not files:
        raise NoFramesError(f"no {'/'.join(FRAME_EXTENSIONS)} frames in {dir_path}")
    if len(files) < 2:
        raise NoFramesError(f"need at least 2 frames in {dir_path}, found {len(files)}")
    frames: list[GrayFrame] = []
    for path in files:
        frame = _decode(path)
        if frames and frame.shape != frames[0].shape:
            raise DimensionMismatchError(
                f"{path.name} is {frame.width}x{frame.height}, "
                f"expected {frames[0].width}x{frames[0].height}"
            )
        frames.append(frame)
    logger.debug("loaded %d frames from %s", len(frames), dir_path)
    return FrameSequence(frames=tuple(frames), fps=float(fps))


def save_frame(frame: GrayFrame | RgbFrame, path: str | Path) -> Path:
    p = Path(path)
    pixels = np.clip(np.asarray(frame.pixels), 0, 255).astype(np.uint8)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(pixels).save(p)
    except (OSError, ValueError) as e:
        raise WriteError(f"cannot write {p}: {e}") from e
    return p


def write_sequence(
    frames: FrameSequence | Sequence[GrayFrame], dir_path: str | Path, ext: str = ".pgm"
) -> list[Path]:
    """Write frames as ``frame_%06d<ext>`` under dir_path, returning the paths."""
    if not ext.startswith("."):
        ext = "." + ext
    if ext.lower() not in FRAME_EXTENSIONS:
        raise ValueError(f"unsupported frame extension {ext}")
    items = frames.frames if isinstance(frames, FrameSequence) else frames
    root = Path(dir_path)
    return [
        save_frame(f, root / FRAME_NAME_FORMAT.format(index=i, ext=ext))
        for i, f in enumerate(items)
    ]


__all__ = [
    "RgbFrame",
    "GrayFrame",
    "FrameSequence",
    "FRAME_EXTENSIONS",
    "to_grayscale",
    "crop_roi",
    "list_frame_files",
    "load_sequence",
    "save_frame",
    "write_sequence",
]
