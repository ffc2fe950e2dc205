"""Named synthetic cohorts.

``static`` and ``dynamic`` are the full one-minute sweeps (the dynamic one
adds 1 px/s of downward drift). ``smoke`` is a short low-frame-rate set for
quick end-to-end checks; every rate completes whole cycles in 30 s.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .synthgen import SynthSpec

_SWEEP_RATES = (8.0, 10.0, 12.0, 15.0, 18.0, 21.0, 24.0, 27.0, 10.0, 15.0, 21.0, 27.0)


@dataclass(frozen=True)
class Cohort:
    name: str
    description: str
    specs: tuple[SynthSpec, ...]

    def __len__(self) -> int:
        return len(self.specs)


def _sweep(drift: float) -> tuple[SynthSpec, ...]:
    return tuple(
        SynthSpec(
            rr_bpm=rr,
            amplitude_px=2.0,
            duration_s=60.0,
            fps=30.0,
            noise_sigma=2.0,
            texture_seed=100 + i,
            drift_px_per_s=drift,
        )
        for i, rr in enumerate(_SWEEP_RATES)
    )


_STATIC = _sweep(0.0)

COHORTS: list[Cohort] = [
    Cohort(
        name="static",
        description="12 seated clips, 60 s at 30 fps, amplitude 2 px, noise 2",
        specs=_STATIC,
    ),
    Cohort(
        name="dynamic",
        description="the static cohort with 1 px/s drift",
        specs=tuple(replace(s, drift_px_per_s=1.0) for s in _STATIC),
    ),
    Cohort(
        name="smoke",
        description="4 short clips, 30 s at 10 fps, one of them drifting",
        specs=(
            SynthSpec(rr_bpm=8.0, duration_s=30.0, fps=10.0, noise_sigma=2.0, texture_seed=1),
            SynthSpec(rr_bpm=12.0, duration_s=30.0, fps=10.0, noise_sigma=2.0, texture_seed=2),
            SynthSpec(rr_bpm=18.0, duration_s=30.0, fps=10.0, noise_sigma=2.0, texture_seed=3),
            SynthSpec(
                rr_bpm=24.0,
                duration_s=30.0,
                fps=10.0,
                noise_sigma=2.0,
                texture_seed=4,
                drift_px_per_s=1.0,
            ),
        ),
    ),
]


def get_cohort(name: str) -> Cohort | None:
    for c in COHORTS:
        if c.name == name:
            return c
    return None


__all__ = ["Cohort", "COHORTS", "get_cohort"]
