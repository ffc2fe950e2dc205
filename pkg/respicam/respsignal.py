"""From tracked y-trajectories to breaths per minute.

variance_trim -> aggregate_motion -> bandpass -> z_normalize -> detect_peaks
-> respiration_rate. Cutoffs are in Hz; 0.1-0.45 Hz spans 6-27 breaths/min.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import signal

from .errors import (
    BadCutoffError,
    ConstantSignalError,
    LengthMismatchError,
    NoTracksError,
    SignalTooShortError,
)
from .tracking import TrackSeries

# std at or below this fraction of max|x| counts as flat
FLAT_RTOL = 1e-9


@dataclass(frozen=True)
class MotionSignal:
    values: npt.NDArray[np.float64]
    fs: float

    def __post_init__(self) -> None:
        if self.fs <= 0:
            raise ValueError(f"fs must be > 0, got {self.fs}")
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError(f"signal needs >= 2 samples, got shape {self.values.shape}")

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class BandpassSpec:
    low_hz: float = 0.1
    high_hz: float = 0.45
    order: int = 4

    def __post_init__(self) -> None:
        if not 0.0 < self.low_hz < self.high_hz:
            raise BadCutoffError(f"need 0 < low_hz < high_hz, got {self.low_hz}, {self.high_hz}")
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")


@dataclass(frozen=True)
class PeakParams:
    min_distance: int
    min_prominence: float = 0.5

    def __post_init__(self) -> None:
        if self.min_distance < 1:
            raise ValueError(f"min_distance must be >= 1, got {self.min_distance}")

    @classmethod
    def for_band(cls, fs: float, high_hz: float, min_prominence: float = 0.5) -> PeakParams:
        """Peaks no closer than one period of the band's upper edge."""
        return cls(min_distance=max(1, math.floor(fs / high_hz)), min_prominence=min_prominence)


@dataclass(frozen=True)
class SignalParams:
    low_hz: float = 0.1
    high_hz: float = 0.45
    order: int = 4
    trim_fraction: float = 1.0 / 3.0
    min_prominence: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.trim_fraction < 0.5:
            raise ValueError(f"trim_fraction must be in (0, 0.5), got {self.trim_fraction}")
        if self.min_prominence < 0:
            raise ValueError(f"min_prominence must be >= 0, got {self.min_prominence}")
        self.bandpass_spec()

    def bandpass_spec(self) -> BandpassSpec:
        return BandpassSpec(low_hz=self.low_hz, high_hz=self.high_hz, order=self.order)


def variance_trim(tracks: Sequence[TrackSeries], fraction: float = 1.0 / 3.0) -> list[TrackSeries]:
    """Drop the floor(fraction*N) lowest- and highest-variance tracks.

    Survivors keep their input order. When nothing would survive, the single
    median-variance track is kept.
    """
    if not tracks:
        raise NoTracksError("no tracks to trim")
    if not 0.0 < fraction < 0.5:
        raise ValueError(f"fraction must be in (0, 0.5), got {fraction}")
    n = len(tracks)
    variances = np.array([np.var(t.y_array()) for t in tracks])
    order = np.argsort(variances, kind="stable")
    drop = math.floor(fraction * n)
    middle = order[drop : n - drop]
    if middle.size == 0:
        middle = order[(n - 1) // 2 : (n - 1) // 2 + 1]
    keep = set(int(i) for i in middle)
    return [t for i, t in enumerate(tracks) if i in keep]


def aggregate_motion(tracks: Sequence[TrackSeries], fs: float) -> MotionSignal:
    """Mean baseline-removed y displacement across tracks, per frame."""
    if not tracks:
        raise NoTracksError("no tracks to aggregate")
    lengths = {len(t) for t in tracks}
    if len(lengths) != 1:
        raise LengthMismatchError(f"track lengths differ: {sorted(lengths)}")
    ys = np.vstack([t.y_array() for t in tracks])
    disp = ys - ys[:, :1]
    return MotionSignal(values=disp.mean(axis=0), fs=float(fs))


def filter_padlen(sos: npt.NDArray[np.float64]) -> int:
    """Edge padding sosfiltfilt applies by default; signals must be longer."""
    ntaps = 2 * sos.shape[0] + 1
    ntaps -= min(int((sos[:, 2] == 0).sum()), int((sos[:, 5] == 0).sum()))
    return 3 * ntaps


def bandpass(sig: MotionSignal, spec: BandpassSpec | None = None) -> MotionSignal:
    """Zero-phase Butterworth band-pass (second-order sections, forward-backward)."""
    s = spec or BandpassSpec()
    nyq = 0.5 * sig.fs
    if s.high_hz >= nyq:
        raise BadCutoffError(f"high cutoff {s.high_hz} Hz is not below Nyquist {nyq} Hz")
    sos = signal.butter(s.order, [s.low_hz, s.high_hz], btype="bandpass", fs=sig.fs, output="sos")
    padlen = filter_padlen(sos)
    if len(sig) <= padlen:
        raise SignalTooShortError(
            f"{len(sig)} samples; an order-{s.order} band-pass needs more than {padlen}"
        )
    return MotionSignal(values=signal.sosfiltfilt(sos, sig.values), fs=sig.fs)


def _is_flat(values: npt.NDArray[np.float64]) -> bool:
    std = float(np.std(values))
    if not np.isfinite(std):
        return True
    return std <= FLAT_RTOL * float(np.max(np.abs(values)))


def z_normalize(sig: MotionSignal) -> MotionSignal:
    std = float(np.std(sig.values))
    if _is_flat(sig.values):
        raise ConstantSignalError(f"signal is constant (std={std:.3g})")
    mean = float(np.mean(sig.values))
    return MotionSignal(values=(sig.values - mean) / std, fs=sig.fs)


def _local_maxima(values: npt.NDArray[np.float64]) -> npt.NDArray[np.intp]:
    # runs of equal samples; a run above both neighbours is a maximum at its left edge
    starts = np.concatenate(([0], np.flatnonzero(np.diff(values) != 0) + 1))
    ends = np.append(starts[1:], values.size)
    s, e = starts[1:-1], ends[1:-1]
    return s[(values[s] > values[s - 1]) & (values[s] > values[e])]


def detect_peaks(sig: MotionSignal, p: PeakParams) -> list[int]:
    """Local maxima gated by prominence, then thinned to min_distance.

    A sample is a maximum when it is above both neighbours; a flat top of any
    width counts once, at its left edge. Thinning keeps the highest peak first
    and drops any peak within min_distance samples of a kept one; equal
    heights favour the lower index. Endpoints are never peaks.
    """
    values = sig.values
    idx = _local_maxima(values)
    if idx.size == 0:
        return []
    prominences, _, _ = signal.peak_prominences(values, idx)
    idx = idx[prominences >= p.min_prominence]
    if idx.size == 0:
        return []
    heights = values[idx]
    order = np.lexsort((idx, -heights))
    kept: list[int] = []
    for i in order:
        cand = int(idx[i])
        if all(abs(cand - k) >= p.min_distance for k in kept):
            kept.append(cand)
    return sorted(kept)


def respiration_rate(peaks: Sequence[int], duration_s: float) -> float:
    if duration_s <= 0:
        raise ValueError(f"duration_s must be > 0, got {duration_s}")
    return len(peaks) * 60.0 / duration_s


@dataclass(frozen=True)
class RateEstimate:
    bpm: float
    peaks: tuple[int, ...]
    signal: MotionSignal
    n_tracks_in: int
    n_tracks_kept: int


def estimate_rate(
    tracks: Sequence[TrackSeries],
    fs: float,
    duration_s: float,
    params: SignalParams | None = None,
) -> RateEstimate:
    """Run the whole signal stage on full-length tracks."""
    p = params or SignalParams()
    kept = variance_trim(tracks, p.trim_fraction)
    raw = aggregate_motion(kept, fs)
    if _is_flat(raw.values):
        raise ConstantSignalError("tracked points show no vertical motion")
    normalized = z_normalize(bandpass(raw, p.bandpass_spec()))
    peaks = detect_peaks(normalized, PeakParams.for_band(fs, p.high_hz, p.min_prominence))
    return RateEstimate(
        bpm=respiration_rate(peaks, duration_s),
        peaks=tuple(peaks),
        signal=normalized,
        n_tracks_in=len(tracks),
        n_tracks_kept=len(kept),
    )


__all__ = [
    "MotionSignal",
    "BandpassSpec",
    "PeakParams",
    "SignalParams",
    "RateEstimate",
    "variance_trim",
    "aggregate_motion",
    "filter_padlen",
    "bandpass",
    "z_normalize",
    "detect_peaks",
    "respiration_rate",
    "estimate_rate",
]
