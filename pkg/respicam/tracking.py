"""Pyramidal iterative Lucas-Kanade tracking of sparse feature points.

Each frame is reduced to a pyramid once (binomial 5-tap smoothing, then
2x decimation) together with its spatial gradients; a frame pair then solves
the 2x2 normal equations per point at every level, coarse to fine, refining
with bilinear reads until the update drops below eps.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from .errors import DimensionMismatchError, TrackingCollapseError
from .features import FeaturePoint
from .frame_io import FrameSequence
from .imgproc import FloatImage, ImageLike, as_float_image

logger = logging.getLogger(__name__)

_BINOMIAL5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


@dataclass(frozen=True)
class FlowParams:
    """Lucas-Kanade settings.

    ``min_eig_threshold`` is compared with the smaller eigenvalue of the
    windowed gradient matrix G itself (a sum over window^2 pixels, gradients
    in intensity units per pixel), not a per-pixel average.
    """

    window: int = 21
    pyramid_levels: int = 3
    max_iters: int = 30
    eps: float = 0.01
    min_eig_threshold: float = 1e-4
    # tracking-window growth around the ROI, in ROI heights (see roi.tracking_window)
    margin_mul: float = 2.0

    def __post_init__(self) -> None:
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and >= 3, got {self.window}")
        if self.pyramid_levels < 1:
            raise ValueError(f"pyramid_levels must be >= 1, got {self.pyramid_levels}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.eps <= 0 or self.min_eig_threshold <= 0:
            raise ValueError("eps and min_eig_threshold must be > 0")
        if self.margin_mul < 0:
            raise ValueError(f"margin_mul must be >= 0, got {self.margin_mul}")


@dataclass
class TrackSeries:
    point_id: int
    x: list[float] = field(default_factory=list)
    y: list[float] = field(default_factory=list)
    alive: bool = True

    def __len__(self) -> int:
        return len(self.y)

    def y_array(self) -> npt.NDArray[np.float64]:
        return np.asarray(self.y, dtype=np.float64)


@dataclass(frozen=True)
class _Level:
    image: FloatImage
    gx: FloatImage
    gy: FloatImage
    # image, gx, gy stacked so one gather reads all three
    stack: npt.NDArray[np.float64]


@dataclass(frozen=True)
class Pyramid:
    levels: tuple[_Level, ...]

    @property
    def shape(self) -> tuple[int, int]:
        base = self.levels[0].image
        return (int(base.shape[0]), int(base.shape[1]))


def _pyr_down(img: FloatImage) -> FloatImage:
    smooth = ndimage.correlate1d(img, _BINOMIAL5, axis=0, mode="nearest")
    smooth = ndimage.correlate1d(smooth, _BINOMIAL5, axis=1, mode="nearest")
    return smooth[::2, ::2]


def build_pyramid(img: ImageLike, levels: int) -> Pyramid:
    """Image pyramid with per-level derivatives (Sobel / 8, true d/dx and d/dy)."""
    base = as_float_image(img)
    images = [base]
    while len(images) < levels:
        prev = images[-1]
        if min(prev.shape) < 8:
            break
        images.append(_pyr_down(prev))
    out = []
    for im in images:
        gx = ndimage.sobel(im, axis=1, mode="nearest") / 8.0
        gy = ndimage.sobel(im, axis=0, mode="nearest") / 8.0
        out.append(_Level(image=im, gx=gx, gy=gy, stack=np.stack([im, gx, gy])))
    return Pyramid(levels=tuple(out))


def _window_reads(
    img: npt.NDArray[np.float64],
    cx: npt.NDArray[np.float64],
    cy: npt.NDArray[np.float64],
    half: int,
) -> npt.NDArray[np.float64]:
    """Bilinear reads of the (2*half+1)^2 window centred on each (cx, cy).

    ``img`` is (H, W) or (C, H, W); the result is (N, win, win) or
    (C, N, win, win). Every read of one window shares the same sub-pixel
    weights, so the window is gathered once on the integer grid and blended.
    Reads outside the image replicate the border.
    """
    h, w = img.shape[-2:]
    cx = np.clip(np.nan_to_num(cx, nan=-1.0), -1.0, float(w))
    cy = np.clip(np.nan_to_num(cy, nan=-1.0), -1.0, float(h))
    x0, y0 = np.floor(cx), np.floor(cy)
    ax = (cx - x0)[:, None, None]
    ay = (cy - y0)[:, None, None]
    offs = np.arange(-half, half + 2)
    cols = np.clip(x0.astype(np.intp)[:, None] + offs, 0, w - 1)
    rows = np.clip(y0.astype(np.intp)[:, None] + offs, 0, h - 1)
    block = img[..., rows[:, :, None], cols[:, None, :]]
    horiz = block[..., :-1] + ax * (block[..., 1:] - block[..., :-1])
    return horiz[..., :-1, :] + ay * (horiz[..., 1:, :] - horiz[..., :-1, :])


def _flow(
    prev: Pyramid, nxt: Pyramid, pts: npt.NDArray[np.float64], params: FlowParams
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.bool_]]:
    """Track (N, 2) xy points from prev to nxt; returns (new_pts, tracked_mask)."""
    n = pts.shape[0]
    if n == 0:
        return pts.copy(), np.zeros(0, dtype=bool)
    half = params.window // 2

    top = min(len(prev.levels), len(nxt.levels)) - 1
    guess = np.zeros((n, 2), dtype=np.float64)
    ok = np.ones(n, dtype=bool)
    for lvl in range(top, -1, -1):
        scale = float(2**lvl)
        P, J = prev.levels[lvl], nxt.levels[lvl].image
        cx, cy = pts[:, 0] / scale, pts[:, 1] / scale
        patch, gx, gy = _window_reads(P.stack, cx, cy, half).reshape(3, n, -1)
        gxx = np.sum(gx * gx, axis=1)
        gxy = np.sum(gx * gy, axis=1)
        gyy = np.sum(gy * gy, axis=1)
        det = gxx * gyy - gxy * gxy
        min_eig = ((gxx + gyy) - np.sqrt((gxx - gyy) ** 2 + 4.0 * gxy * gxy)) / 2.0
        solvable = (min_eig >= params.min_eig_threshold) & (det > 0)
        if lvl == 0:
            ok &= solvable

        v = np.zeros((n, 2), dtype=np.float64)
        active = solvable & ok
        for _ in range(params.max_iters):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            shift = guess[idx] + v[idx]
            warped = _window_reads(J, cx[idx] + shift[:, 0], cy[idx] + shift[:, 1], half)
            diff = patch[idx] - warped.reshape(idx.size, -1)
            bx = np.sum(diff * gx[idx], axis=1)
            by = np.sum(diff * gy[idx], axis=1)
            d = det[idx]
            eta_x = (gyy[idx] * bx - gxy[idx] * by) / d
            eta_y = (gxx[idx] * by - gxy[idx] * bx) / d
            v[idx, 0] += eta_x
            v[idx, 1] += eta_y
            # a NaN update stops iterating too; the point then fails the bounds check
            done = ~(np.hypot(eta_x, eta_y) >= params.eps)
            active[idx[done]] = False
        guess = 2.0 * (guess + v) if lvl > 0 else guess + v

    new_pts = pts + guess
    h, w = prev.shape
    inside = (
        (new_pts[:, 0] >= 0)
        & (new_pts[:, 0] <= w - 1)
        & (new_pts[:, 1] >= 0)
        & (new_pts[:, 1] <= h - 1)
        & np.all(np.isfinite(new_pts), axis=1)
    )
    return new_pts, ok & inside


def _points_array(pts: Sequence[FeaturePoint]) -> npt.NDArray[np.float64]:
    return np.array([[p.x, p.y] for p in pts], dtype=np.float64).reshape(-1, 2)


def lk_flow_step(
    prev: ImageLike,
    next: ImageLike,  # noqa: A002
    pts: Sequence[FeaturePoint],
    params: FlowParams | None = None,
) -> list[tuple[FeaturePoint, bool]]:
    """Track points across one frame pair; status False means lost."""
    p = params or FlowParams()
    a, b = as_float_image(prev), as_float_image(next)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"frame pair shapes differ: {a.shape} vs {b.shape}")
    prev_pyr = build_pyramid(a, p.pyramid_levels)
    next_pyr = build_pyramid(b, p.pyramid_levels)
    new_pts, status = _flow(prev_pyr, next_pyr, _points_array(pts), p)
    return [
        (FeaturePoint(float(xy[0]), float(xy[1]), src.response), bool(st))
        for xy, st, src in zip(new_pts, status, pts)
    ]


def track_points(
    seq: FrameSequence, initial: Sequence[FeaturePoint], params: FlowParams | None = None
) -> list[TrackSeries]:
    """Chain LK over consecutive frames.

    A point lost between frames t-1 and t keeps positions for frames
    0..t-1 only and is never tracked again.
    """
    return track_frames(iter(seq.frames), len(seq), initial, params)


def track_frames(
    frames: Iterator[ImageLike],
    n_frames: int,
    initial: Sequence[FeaturePoint],
    params: FlowParams | None = None,
) -> list[TrackSeries]:
    """track_points over frames produced on demand, e.g. cropped and filtered lazily."""
    (result,) = track_point_sets(frames, n_frames, [initial], params)
    if isinstance(result, TrackingCollapseError):
        raise result
    return result


def track_point_sets(
    frames: Iterator[ImageLike],
    n_frames: int,
    point_sets: Sequence[Sequence[FeaturePoint]],
    params: FlowParams | None = None,
) -> list[list[TrackSeries] | TrackingCollapseError]:
    """Track independent point sets in one pass, sharing each frame's pyramid.

    The collapse rule holds per set: a set whose points are all lost before
    the middle frame gets a TrackingCollapseError in its slot instead of
    tracks. Point ids restart at 0 in every set.
    """
    p = params or FlowParams()
    if n_frames < 2:
        raise ValueError(f"tracking needs at least 2 frames, got {n_frames}")
    if not point_sets or any(not s for s in point_sets):
        raise ValueError("no initial points to track")

    sizes = [len(s) for s in point_sets]
    owner = np.repeat(np.arange(len(point_sets)), sizes)
    pts = _points_array([pt for s in point_sets for pt in s])
    n = pts.shape[0]
    xs = np.empty((n_frames, n), dtype=np.float64)
    ys = np.empty((n_frames, n), dtype=np.float64)
    xs[0], ys[0] = pts[:, 0], pts[:, 1]
    length = np.ones(n, dtype=np.intp)
    alive = np.ones(n, dtype=bool)
    collapsed: dict[int, TrackingCollapseError] = {}

    prev_pyr = build_pyramid(next(frames), p.pyramid_levels)
    for t in range(1, n_frames):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        next_pyr = build_pyramid(next(frames), p.pyramid_levels)
        new_pts, status = _flow(prev_pyr, next_pyr, pts[idx], p)
        moved = idx[status]
        pts[moved] = new_pts[status]
        xs[t, moved] = new_pts[status, 0]
        ys[t, moved] = new_pts[status, 1]
        length[moved] = t + 1
        alive[idx[~status]] = False
        for k in np.unique(owner[idx[~status]]):
            if alive[owner == k].any():
                continue
            if t < n_frames / 2:
                collapsed[int(k)] = TrackingCollapseError(
                    f"all {sizes[k]} points lost at frame {t} of {n_frames}"
                )
            else:
                logger.debug("all points of set %d lost at frame %d of %d", k, t, n_frames)
        prev_pyr = next_pyr
    logger.debug("tracked %d/%d points over %d frames", int(alive.sum()), n, n_frames)

    out: list[list[TrackSeries] | TrackingCollapseError] = []
    first = 0
    for k, size in enumerate(sizes):
        if k in collapsed:
            out.append(collapsed[k])
        else:
            out.append(
                [
                    TrackSeries(
                        point_id=i - first,
                        x=xs[: length[i], i].tolist(),
                        y=ys[: length[i], i].tolist(),
                        alive=bool(alive[i]),
                    )
                    for i in range(first, first + size)
                ]
            )
        first += size
    return out


def forward_backward_error(
    seq: FrameSequence, initial: Sequence[FeaturePoint], params: FlowParams | None = None
) -> npt.NDArray[np.float64]:
    """Per-point distance between the start and the reverse-tracked end position.

    Points lost in either direction report inf.
    """
    fwd = track_points(seq, initial, params)
    ends = [
        FeaturePoint(t.x[-1], t.y[-1]) if t.alive else FeaturePoint(t.x[0], t.y[0])
        for t in fwd
    ]
    reversed_seq = FrameSequence(frames=tuple(reversed(seq.frames)), fps=seq.fps)
    bwd = track_points(reversed_seq, ends, params)
    err = np.full(len(fwd), np.inf)
    for i, (f, b) in enumerate(zip(fwd, bwd)):
        if f.alive and b.alive:
            err[i] = float(np.hypot(b.x[-1] - f.x[0], b.y[-1] - f.y[0]))
    return err


__all__ = [
    "FlowParams",
    "TrackSeries",
    "Pyramid",
    "build_pyramid",
    "lk_flow_step",
    "track_points",
    "track_frames",
    "track_point_sets",
    "forward_backward_error",
]
