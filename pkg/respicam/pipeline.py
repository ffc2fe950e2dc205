"""One subject through one configuration: frames in, breaths per minute out.

    load -> chest ROI -> crop to tracking window -> filter -> corners on the
    ROI of frame 0 -> track -> full-length tracks -> signal stage -> bpm

The eighteen configurations are every filter x ROI size x detector; their
acronyms are the filter code followed by the ROI size code (FLBM = no
filter, medium box).
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from .config import DEFAULT_SETTINGS, Settings
from .errors import NoTracksError, RespicamError
from .features import DetectorKind, FeaturePoint, detect_corners
from .frame_io import FrameSequence, GrayFrame, crop_roi, load_sequence
from .imgproc import FilterKind, FloatImage, apply_filter
from .manifest import SubjectRecord
from .respsignal import estimate_rate
from .roi import BoundingBox, SizeClass, chest_roi_from_face, tracking_window
from .tracking import TrackSeries, track_point_sets

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    filter: FilterKind
    bbox: SizeClass
    detector: DetectorKind

    @property
    def acronym(self) -> str:
        return self.filter.code + self.bbox.code

    @property
    def label(self) -> str:
        """Report label, e.g. ``Harris - SOBM``."""
        return f"{self.detector.label} - {self.acronym}"

    @property
    def description(self) -> str:
        """Long form, e.g. ``Filterless-Bbox Medium``."""
        return f"{self.filter.label}-{self.bbox.label}"

    @classmethod
    def from_acronym(cls, acronym: str, detector: DetectorKind | str) -> PipelineConfig:
        det = DetectorKind(detector)
        for cfg in ALL_CONFIGS:
            if cfg.detector is det and cfg.acronym == acronym.upper():
                return cfg
        raise ValueError(f"unknown configuration acronym {acronym!r}")


# report order: detector, then filter, then medium/large/small
_FILTER_ORDER = (FilterKind.NONE, FilterKind.LAPLACIAN, FilterKind.SOBEL)
_BBOX_ORDER = (SizeClass.MEDIUM, SizeClass.LARGE, SizeClass.SMALL)
_DETECTOR_ORDER = (DetectorKind.SHI_TOMASI, DetectorKind.HARRIS)

ALL_CONFIGS: tuple[PipelineConfig, ...] = tuple(
    PipelineConfig(filter=f, bbox=b, detector=d)
    for d, f, b in itertools.product(_DETECTOR_ORDER, _FILTER_ORDER, _BBOX_ORDER)
)


@dataclass(frozen=True)
class PipelineTrace:
    """Estimate plus the intermediate counts that produced it."""

    bpm: float
    roi: BoundingBox
    window: BoundingBox
    n_corners: int
    n_tracks_full: int
    n_tracks_kept: int
    peaks: tuple[int, ...]


def _work_frames(
    seq: FrameSequence, window: BoundingBox, kind: FilterKind
) -> tuple[FloatImage, Iterator[FloatImage]]:
    def prepare(frame: GrayFrame) -> FloatImage:
        return apply_filter(crop_roi(frame, window), kind)

    first = prepare(seq.frames[0])
    rest = (prepare(f) for f in seq.frames[1:])
    return first, itertools.chain([first], rest)


def analyze_configs(
    seq: FrameSequence,
    face_box: BoundingBox,
    configs: Sequence[PipelineConfig],
    settings: Settings | None = None,
) -> dict[PipelineConfig, PipelineTrace | RespicamError]:
    """Configurations sharing a filter and ROI size, in one pass over the frames.

    Crop, filter and pyramids are computed once per frame; each detector's
    corners are tracked as their own set. A failure of the shared geometry
    raises; a failure of one detector is returned in its slot.
    """
    if not configs:
        return {}
    first_cfg = configs[0]
    if any(c.filter is not first_cfg.filter or c.bbox is not first_cfg.bbox for c in configs):
        raise ValueError("configs must share filter and ROI size")
    s = settings or DEFAULT_SETTINGS
    roi = chest_roi_from_face(face_box, first_cfg.bbox, seq.width, seq.height, s.geometry)
    window = tracking_window(roi, seq.width, seq.height, s.flow.margin_mul)
    first, frames = _work_frames(seq, window, first_cfg.filter)

    # ROI in window coordinates; only corners inside it are eligible
    region = BoundingBox(roi.x - window.x, roi.y - window.y, roi.w, roi.h)
    out: dict[PipelineConfig, PipelineTrace | RespicamError] = {}
    corners: dict[PipelineConfig, list[FeaturePoint]] = {}
    for cfg in configs:
        try:
            corners[cfg] = detect_corners(first, cfg.detector, s.features, region)
        except RespicamError as e:
            out[cfg] = e

    if corners:
        tracked = track_point_sets(frames, len(seq), list(corners.values()), s.flow)
        for (cfg, pts), tracks in zip(corners.items(), tracked):
            if isinstance(tracks, RespicamError):
                out[cfg] = tracks
                continue
            try:
                out[cfg] = _trace(seq, cfg, roi, window, len(pts), tracks, s)
            except RespicamError as e:
                out[cfg] = e
    return {cfg: out[cfg] for cfg in configs}


def _trace(
    seq: FrameSequence,
    cfg: PipelineConfig,
    roi: BoundingBox,
    window: BoundingBox,
    n_corners: int,
    tracks: list[TrackSeries],
    s: Settings,
) -> PipelineTrace:
    full = [t for t in tracks if t.alive and len(t) == len(seq)]
    if not full:
        raise NoTracksError(f"no point survived all {len(seq)} frames")
    est = estimate_rate(full, seq.fps, seq.duration_s, s.signal)
    logger.debug(
        "%s: %d corners, %d full tracks, %d kept, %.2f bpm",
        cfg.label,
        n_corners,
        len(full),
        est.n_tracks_kept,
        est.bpm,
    )
    return PipelineTrace(
        bpm=est.bpm,
        roi=roi,
        window=window,
        n_corners=n_corners,
        n_tracks_full=len(full),
        n_tracks_kept=est.n_tracks_kept,
        peaks=est.peaks,
    )


def analyze_sequence(
    seq: FrameSequence,
    face_box: BoundingBox,
    cfg: PipelineConfig,
    settings: Settings | None = None,
) -> PipelineTrace:
    result = analyze_configs(seq, face_box, [cfg], settings)[cfg]
    if isinstance(result, RespicamError):
        raise result
    return result


def run_config(
    rec: SubjectRecord,
    cfg: PipelineConfig,
    settings: Settings | None = None,
    seq: FrameSequence | None = None,
) -> float:
    """Estimated breaths per minute for one subject; ``seq`` skips reloading frames."""
    frames = seq if seq is not None else load_sequence(rec.frames_dir, rec.fps)
    return analyze_sequence(frames, rec.face_box, cfg, settings).bpm


__all__ = [
    "PipelineConfig",
    "PipelineTrace",
    "ALL_CONFIGS",
    "analyze_configs",
    "analyze_sequence",
    "run_config",
]
