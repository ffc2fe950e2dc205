import numpy as np
import pytest
from scipy import ndimage

from respicam.errors import DimensionMismatchError, TrackingCollapseError
from respicam.features import DetectorKind, FeatureParams, FeaturePoint, detect_corners
from respicam.frame_io import FrameSequence, GrayFrame
from respicam.roi import BoundingBox
from respicam.tracking import (
    FlowParams,
    build_pyramid,
    forward_backward_error,
    lk_flow_step,
    track_point_sets,
    track_points,
)


def _texture(shape=(96, 96), seed=0, sigma=2.0):
    rng = np.random.default_rng(seed)
    t = ndimage.gaussian_filter(rng.random(shape), sigma=sigma)
    return (t - t.min()) / np.ptp(t) * 255.0


def _shifted(img, dy, dx=0.0):
    return ndimage.shift(img, (dy, dx), order=3, mode="nearest")


def _interior_points(img, margin=24):
    h, w = img.shape
    region = BoundingBox(margin, margin, w - 2 * margin, h - 2 * margin)
    return detect_corners(img, DetectorKind.SHI_TOMASI, FeatureParams(max_count=20), region)


def _sequence(frames, fps=10.0):
    return FrameSequence(frames=tuple(GrayFrame(np.asarray(f)) for f in frames), fps=fps)


def test_zero_motion():
    img = _texture()
    pts = _interior_points(img)
    out = lk_flow_step(img, img, pts)
    assert all(ok for _, ok in out)
    for (new, _), old in zip(out, pts):
        assert new.x == old.x and new.y == old.y


@pytest.mark.parametrize("d", [0.25, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("direction", [(1.0, 0.0), (1.0, 1.0)])
def test_recovers_translation_clean(d, direction):
    img = _texture()
    dy, dx = d * direction[0], d * direction[1]
    pts = _interior_points(img)
    out = lk_flow_step(img, _shifted(img, dy, dx), pts)
    for (new, ok), old in zip(out, pts):
        assert ok
        assert abs((new.y - old.y) - dy) <= 0.1
        assert abs((new.x - old.x) - dx) <= 0.1


@pytest.mark.parametrize("d", [0.25, 0.5, 1.0, 2.0])
def test_recovers_translation_noisy(d):
    img = _texture(seed=1)
    rng = np.random.default_rng(11)
    prev = img + rng.normal(0.0, 2.0, img.shape)
    nxt = _shifted(img, d) + rng.normal(0.0, 2.0, img.shape)
    pts = _interior_points(img)
    out = lk_flow_step(prev, nxt, pts)
    for (new, ok), old in zip(out, pts):
        assert ok
        assert abs((new.y - old.y) - d) <= 0.3
        assert abs(new.x - old.x) <= 0.3


def test_flat_region_point_is_lost():
    img = _texture()
    img[:, 48:] = 100.0
    pts = [FeaturePoint(30.0, 48.0), FeaturePoint(75.0, 48.0)]
    out = lk_flow_step(img, img, pts)
    assert out[0][1] is True
    assert out[1][1] is False


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        lk_flow_step(np.zeros((20, 20)), np.zeros((20, 22)), [FeaturePoint(5.0, 5.0)])


def test_pyramid_levels_halve():
    pyr = build_pyramid(np.zeros((64, 48)), 3)
    assert [lvl.image.shape for lvl in pyr.levels] == [(64, 48), (32, 24), (16, 12)]
    assert len(build_pyramid(np.zeros((12, 12)), 5).levels) == 2


def test_flow_params_validation():
    with pytest.raises(ValueError):
        FlowParams(window=20)
    with pytest.raises(ValueError):
        FlowParams(pyramid_levels=0)


def test_static_sequence_constant_tracks():
    img = _texture()
    seq = _sequence([img] * 6)
    tracks = track_points(seq, _interior_points(img))
    for t in tracks:
        assert t.alive and len(t) == 6
        assert len(set(t.y)) == 1


def test_sinusoidal_motion_tracked():
    base = _texture(shape=(112, 96), seed=2)
    fps, n = 10.0, 40
    offsets = 2.0 * np.sin(2 * np.pi * 0.25 * np.arange(n) / fps)
    seq = _sequence([_shifted(base, off) for off in offsets], fps=fps)
    pts = _interior_points(base)
    tracks = track_points(seq, pts)
    for t, p in zip(tracks, pts):
        assert t.alive
        expected = p.y + offsets
        assert np.sqrt(np.mean((t.y_array() - expected) ** 2)) <= 0.3


def test_shift_equivariance():
    canvas = _texture(shape=(140, 140), seed=3)
    fps, n = 10.0, 12
    offsets = 1.5 * np.sin(2 * np.pi * 0.3 * np.arange(n) / fps)
    moved = [_shifted(canvas, off) for off in offsets]
    dx, dy = 8, 4
    a = _sequence([m[20:116, 20:116] for m in moved], fps)
    b = _sequence([m[20 - dy : 116 - dy, 20 - dx : 116 - dx] for m in moved], fps)
    pts = _interior_points(a.frames[0].pixels)
    ta = track_points(a, pts)
    tb = track_points(b, [p.shifted(dx, dy) for p in pts])
    for ra, rb in zip(ta, tb):
        assert ra.alive and rb.alive
        assert np.allclose(np.asarray(rb.x) - np.asarray(ra.x), dx, atol=0.1)
        assert np.allclose(np.asarray(rb.y) - np.asarray(ra.y), dy, atol=0.1)


def test_forward_backward_error_small():
    base = _texture(shape=(112, 96), seed=4)
    offsets = 2.0 * np.sin(2 * np.pi * 0.2 * np.arange(25) / 10.0)
    seq = _sequence([_shifted(base, off) for off in offsets])
    err = forward_backward_error(seq, _interior_points(base))
    assert np.all(err <= 0.5)


def test_lost_point_series_truncated():
    img = _texture()
    img[:, 48:] = 100.0
    seq = _sequence([img] * 5)
    tracks = track_points(seq, [FeaturePoint(30.0, 48.0), FeaturePoint(75.0, 48.0)])
    assert tracks[0].alive and len(tracks[0]) == 5
    assert not tracks[1].alive and len(tracks[1]) == 1


def test_collapse_when_everything_is_lost_early():
    seq = _sequence([np.full((40, 40), 50.0)] * 6)
    with pytest.raises(TrackingCollapseError):
        track_points(seq, [FeaturePoint(20.0, 20.0)])


def test_preconditions():
    img = _texture()
    with pytest.raises(ValueError):
        track_points(_sequence([img]), [FeaturePoint(10.0, 10.0)])
    with pytest.raises(ValueError):
        track_points(_sequence([img, img]), [])


def _min_eig_at(img, x, y, window=21):
    lvl = build_pyramid(img, 1).levels[0]
    half = window // 2
    win = (slice(y - half, y + half + 1), slice(x - half, x + half + 1))
    gx, gy = lvl.gx[win], lvl.gy[win]
    g = np.array([[np.sum(gx * gx), np.sum(gx * gy)], [np.sum(gx * gy), np.sum(gy * gy)]])
    return float(np.linalg.eigvalsh(g)[0])


def test_min_eig_threshold_applies_to_raw_gradient_matrix():
    rng = np.random.default_rng(11)
    faint = 100.0 + 0.01 * rng.standard_normal((64, 64))
    min_eig = _min_eig_at(faint, 32, 32)
    # texture is faint enough that a per-pixel average would fall under the default
    assert min_eig > 1e-4 > min_eig / 21**2

    params = FlowParams(pyramid_levels=1)
    ((_, kept),) = lk_flow_step(faint, faint, [FeaturePoint(32.0, 32.0)], params)
    assert kept is True

    strict = FlowParams(pyramid_levels=1, min_eig_threshold=2.0 * min_eig)
    ((_, lost),) = lk_flow_step(faint, faint, [FeaturePoint(32.0, 32.0)], strict)
    assert lost is False


def test_point_sets_match_separate_runs():
    base = _texture(shape=(112, 96), seed=6)
    offsets = 1.5 * np.sin(2 * np.pi * 0.25 * np.arange(15) / 10.0)
    seq = _sequence([_shifted(base, off) for off in offsets])
    pts = _interior_points(base)
    a, b = pts[: len(pts) // 2], pts[len(pts) // 2 :]
    joint = track_point_sets(iter(seq.frames), len(seq), [a, b])
    for got, initial in zip(joint, (a, b)):
        alone = track_points(seq, initial)
        assert [t.point_id for t in got] == list(range(len(initial)))
        for g, s in zip(got, alone):
            assert len(g) == len(s)
            assert np.allclose(g.y, s.y, atol=1e-9) and np.allclose(g.x, s.x, atol=1e-9)
        assert [t.alive for t in got] == [t.alive for t in alone]


def test_point_sets_collapse_independently():
    img = _texture()
    img[:, 48:] = 100.0
    seq = _sequence([img] * 6)
    textured, flat = [FeaturePoint(30.0, 48.0)], [FeaturePoint(75.0, 48.0)]
    kept, collapsed = track_point_sets(iter(seq.frames), len(seq), [textured, flat])
    assert isinstance(collapsed, TrackingCollapseError)
    assert len(kept) == 1 and kept[0].alive and len(kept[0]) == 6
