"""Synthetic breathing clips with known motion, used as ground truth.

A textured "chest" patch sits below a face box on a low-contrast background
and moves vertically by

    offset(t) = amplitude * sin(2*pi*(rr/60)*t/fps) + drift * t/fps

pixels at frame t (positive is down). The patch is placed with bilinear
sub-pixel shifts; Gaussian pixel noise is added last. Everything is driven
by ``texture_seed`` so identical specs give byte-identical frames.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from .errors import BadSpecError, WriteError
from .frame_io import FrameSequence, GrayFrame, write_sequence
from .manifest import Condition, SubjectRecord, save_manifest
from .roi import BoundingBox

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
_BLOCK = 4  # patch texture cell size, px


@dataclass(frozen=True)
class SynthSpec:
    rr_bpm: float
    amplitude_px: float = 2.0
    duration_s: float = 60.0
    fps: float = 30.0
    noise_sigma: float = 0.0
    texture_seed: int = 0
    drift_px_per_s: float = 0.0
    width: int = 192
    height: int = 224

    def validate(self) -> tuple[bool, str | None]:
        if self.fps <= 0:
            return False, "fps must be > 0"
        if self.rr_bpm <= 0:
            return False, "rr_bpm must be > 0"
        if self.rr_bpm / 60.0 >= self.fps / 2.0:
            return False, "breathing frequency must be below Nyquist"
        if self.amplitude_px <= 0:
            return False, "amplitude_px must be > 0"
        if self.duration_s <= 0:
            return False, "duration_s must be > 0"
        if self.noise_sigma < 0:
            return False, "noise_sigma must be >= 0"
        if self.width < 64 or self.height < 64:
            return False, "frames must be at least 64x64"
        if self.n_frames < 2:
            return False, "clip must have at least 2 frames"
        return True, None

    @property
    def n_frames(self) -> int:
        return int(round(self.duration_s * self.fps))

    @property
    def condition(self) -> Condition:
        return Condition.DYNAMIC if self.drift_px_per_s != 0 else Condition.STATIC


@dataclass(frozen=True)
class SynthClip:
    sequence: FrameSequence
    face_box: BoundingBox
    gt_rr: float


def motion_offset(
    spec: SynthSpec, frame_index: int | npt.NDArray[np.int64]
) -> npt.NDArray[np.float64]:
    """Vertical patch offset in px at the given frame index(es)."""
    t = np.asarray(frame_index, dtype=np.float64) / spec.fps
    f = spec.rr_bpm / 60.0
    return spec.amplitude_px * np.sin(2.0 * np.pi * f * t) + spec.drift_px_per_s * t


def face_box_for(width: int, height: int) -> BoundingBox:
    """Face box near the top centre; its chest ROIs land on the patch."""
    side = max(12, width // 5)
    return BoundingBox(x=(width - side) // 2, y=max(4, height // 30), w=side, h=side)


def _patch_canvas(
    patch: npt.NDArray[np.float64], top: int, left: int, width: int, canvas_h: int
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    tex = np.zeros((canvas_h, width), dtype=np.float64)
    alpha = np.zeros((canvas_h, width), dtype=np.float64)
    ph, pw = patch.shape
    right = min(left + pw, width)
    bottom = min(top + ph, canvas_h)
    tex[top:bottom, left:right] = patch[: bottom - top, : right - left]
    alpha[top:bottom, left:right] = 1.0
    return tex, alpha


def _composite(
    background: npt.NDArray[np.float64],
    tex: npt.NDArray[np.float64],
    alpha: npt.NDArray[np.float64],
    offset_y: float,
) -> npt.NDArray[np.float64]:
    h = background.shape[0]
    tex_s = ndimage.shift(tex, (offset_y, 0.0), order=1, mode="constant", cval=0.0)[:h]
    alpha_s = ndimage.shift(alpha, (offset_y, 0.0), order=1, mode="constant", cval=0.0)[:h]
    return background * (1.0 - alpha_s) + tex_s


def render_patch_frame(
    background: npt.NDArray[np.float64],
    patch: npt.NDArray[np.float64],
    top: int,
    left: int,
    offset_y: float,
) -> npt.NDArray[np.float64]:
    """Composite ``patch`` over ``background`` at (top + offset_y, left), bilinear."""
    h, w = background.shape
    canvas_h = max(h, top + patch.shape[0])
    tex, alpha = _patch_canvas(np.asarray(patch, dtype=np.float64), top, left, w, canvas_h)
    return _composite(np.asarray(background, dtype=np.float64), tex, alpha, offset_y)


def _textures(
    spec: SynthSpec, face: BoundingBox
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], int, int]:
    rng = np.random.default_rng(spec.texture_seed)
    background = rng.uniform(90.0, 140.0, size=(spec.height, spec.width))
    background = ndimage.gaussian_filter(background, sigma=3.0, mode="nearest")

    top = face.bottom + max(1, face.h // 20)
    left = max(0, int(face.center_x - 1.25 * face.w))
    pw = min(spec.width - left, int(2.5 * face.w))
    reach = abs(spec.amplitude_px) + abs(spec.drift_px_per_s) * spec.duration_s
    ph = spec.height - top + int(math.ceil(reach)) + 2
    cells = rng.integers(30, 226, size=(-(-ph // _BLOCK), -(-pw // _BLOCK))).astype(np.float64)
    patch = np.kron(cells, np.ones((_BLOCK, _BLOCK)))[:ph, :pw]
    patch = ndimage.gaussian_filter(patch, sigma=1.0, mode="nearest")
    return background, patch, top, left


def synth_clip(spec: SynthSpec) -> SynthClip:
    ok, err = spec.validate()
    if not ok:
        raise BadSpecError(f"invalid SynthSpec: {err}")
    face = face_box_for(spec.width, spec.height)
    background, patch, top, left = _textures(spec, face)
    canvas_h = max(spec.height, top + patch.shape[0])
    tex, alpha = _patch_canvas(patch, top, left, spec.width, canvas_h)

    noise_rng = np.random.default_rng([spec.texture_seed, 1])
    offsets = motion_offset(spec, np.arange(spec.n_frames))
    frames: list[GrayFrame] = []
    for off in offsets:
        img = _composite(background, tex, alpha, float(off))
        if spec.noise_sigma > 0:
            img = img + noise_rng.normal(0.0, spec.noise_sigma, size=img.shape)
        frames.append(GrayFrame(np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)))
    logger.debug("rendered %d synthetic frames at rr=%g", len(frames), spec.rr_bpm)
    return SynthClip(
        sequence=FrameSequence(frames=tuple(frames), fps=float(spec.fps)),
        face_box=face,
        gt_rr=float(spec.rr_bpm),
    )


def subject_id_for(index: int, spec: SynthSpec) -> str:
    return f"synth_{index:03d}_rr{spec.rr_bpm:g}_{spec.condition.value}"


def synth_manifest(
    specs: Sequence[SynthSpec], out_dir: str | Path, ext: str = ".pgm"
) -> Path:
    """Render every spec to ``out_dir/<id>/`` and write ``out_dir/manifest.json``."""
    root = Path(out_dir)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise WriteError(f"cannot create {root}: {e}") from e
    records: list[SubjectRecord] = []
    for i, spec in enumerate(specs):
        clip = synth_clip(spec)
        sid = subject_id_for(i, spec)
        write_sequence(clip.sequence, root / sid, ext=ext)
        records.append(
            SubjectRecord(
                id=sid,
                frames_dir=root / sid,
                fps=float(spec.fps),
                face_box=clip.face_box,
                gt_rr_bpm=clip.gt_rr,
                condition=spec.condition,
            )
        )
        logger.info("wrote %s (%d frames)", sid, len(clip.sequence))
    path = root / MANIFEST_NAME
    try:
        save_manifest(records, path)
    except OSError as e:
        raise WriteError(f"cannot write {path}: {e}") from e
    return path


__all__ = [
    "SynthSpec",
    "SynthClip",
    "MANIFEST_NAME",
    "motion_offset",
    "face_box_for",
    "render_patch_frame",
    "synth_clip",
    "subject_id_for",
    "synth_manifest",
]
