"""Moving linear front of the transverse field and the protocol timing built on it.

Sites are labelled ``1..N``. The front position is ``n_f = v t``; the field is
``g_i`` ahead of the ramp, ``g_f`` behind it and linear with slope ``alpha`` in
between, so the midpoint of the ramp (field ``(g_i + g_f) / 2``) sits on ``n_f``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "FrontProfile",
    "InvalidTimeError",
    "Schedule",
    "ScheduleMode",
    "field_at",
    "field_gradient_at",
    "fields_at_time",
    "homogeneous_field_at",
    "homogeneous_schedule",
    "kink_times",
    "schedule_for",
    "velocity_for",
]


class InvalidTimeError(ValueError):
    pass


class ScheduleMode(str, Enum):
    INHOMOGENEOUS = "inhomogeneous"
    HOMOGENEOUS = "homogeneous"


@dataclass(frozen=True)
class FrontProfile:
    """Linear front from ``g_i`` (ahead) to ``g_f`` (behind) with slope ``alpha``.

    ``smoothing`` is the width, in sites, of optional quadratic rounding of the
    two corners; ``0`` keeps the piecewise-linear front.
    """

    alpha: float
    velocity: float = 1.0
    g_i: float = 3.0
    g_f: float = 0.0
    smoothing: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.velocity > 0:
            raise ValueError(f"velocity must be positive, got {self.velocity}")
        if not self.g_i > self.g_f:
            raise ValueError(f"need g_i > g_f, got g_i={self.g_i}, g_f={self.g_f}")
        if not 0.0 <= self.smoothing <= 2.0 * self.half_width:
            raise ValueError("smoothing must lie in [0, 2 * half_width]")

    @property
    def half_width(self) -> float:
        return (self.g_i - self.g_f) / (2.0 * self.alpha)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.g_i + self.g_f)

    def with_velocity(self, velocity: float) -> "FrontProfile":
        return FrontProfile(self.alpha, velocity, self.g_i, self.g_f, self.smoothing)


def field_at(profile: FrontProfile, site, front_position: float):
    """Field on ``site`` (scalar or array, 1-based) for front position ``n_f``."""
    x = np.asarray(site, dtype=float) - front_position
    hw = profile.half_width
    g = np.clip(profile.midpoint + profile.alpha * x, profile.g_f, profile.g_i)
    w = profile.smoothing
    if w > 0:
        a = profile.alpha
        upper = np.abs(x - hw) < 0.5 * w
        lower = np.abs(x + hw) < 0.5 * w
        g = np.where(upper, profile.g_i - a * (hw + 0.5 * w - x) ** 2 / (2 * w), g)
        g = np.where(lower, profile.g_f + a * (x + hw + 0.5 * w) ** 2 / (2 * w), g)
    return g if g.ndim else float(g)


def field_gradient_at(profile: FrontProfile, site, front_position: float):
    """Derivative of the site field with respect to the front position.

    ``-alpha`` on the ramp (edges included), ``0`` on both plateaus.
    """
    x = np.asarray(site, dtype=float) - front_position
    hw = profile.half_width
    a = profile.alpha
    d = np.where(np.abs(x) <= hw, -a, 0.0)
    w = profile.smoothing
    if w > 0:
        d = np.where(np.abs(x) <= hw - 0.5 * w, -a, 0.0)
        upper = np.abs(x - hw) < 0.5 * w
        lower = np.abs(x + hw) < 0.5 * w
        d = np.where(upper, -a * (hw + 0.5 * w - x) / w, d)
        d = np.where(lower, -a * (x + hw + 0.5 * w) / w, d)
    return d if d.ndim else float(d)


@dataclass(frozen=True)
class Schedule:
    t_start: float
    t_end: float
    total_time: float
    mode: ScheduleMode
    g_i: float = 3.0
    g_f: float = 0.0
    profile: FrontProfile | None = field(default=None)

    def to_record(self) -> dict:
        rec = {
            "mode": self.mode.value,
            "t_start": self.t_start,
            "t_end": self.t_end,
            "T": self.total_time,
            "g_i": self.g_i,
            "g_f": self.g_f,
        }
        if self.profile is not None:
            rec.update(alpha=self.profile.alpha, v=self.profile.velocity)
        return rec


def schedule_for(n_sites: int, profile: FrontProfile) -> Schedule:
    """Timing of the inhomogeneous sweep: ``T = N / v + (g_i - g_f) / (alpha v)``.

    The window is placed symmetrically: at ``t_start`` the ramp sits half a site
    ahead of site 1 and at ``t_end`` half a site behind site ``N``, so every
    site is on the ``g_i`` plateau at the start and on ``g_f`` at the end.
    """
    if n_sites < 2:
        raise ValueError("schedule needs at least 2 sites")
    v = profile.velocity
    hw = profile.half_width
    T = n_sites / v + (profile.g_i - profile.g_f) / (profile.alpha * v)
    t_start = (0.5 - hw) / v
    return Schedule(t_start, t_start + T, T, ScheduleMode.INHOMOGENEOUS, profile.g_i, profile.g_f, profile)


def velocity_for(n_sites: int, alpha: float, g_i: float, g_f: float, total_time: float) -> float:
    """Front velocity that completes the sweep in ``total_time``."""
    if not total_time > 0:
        raise InvalidTimeError(f"total time must be positive, got {total_time}")
    return (n_sites + (g_i - g_f) / alpha) / total_time


def homogeneous_schedule(total_time: float, g_i: float = 3.0, g_f: float = 0.0) -> Schedule:
    if not total_time > 0:
        raise InvalidTimeError(f"total time must be positive, got {total_time}")
    return Schedule(0.0, float(total_time), float(total_time), ScheduleMode.HOMOGENEOUS, g_i, g_f)


def homogeneous_field_at(t: float, schedule: Schedule) -> float:
    """Linear ramp ``g_i -> g_f``; times outside the schedule clamp to the endpoints."""
    if schedule.mode is not ScheduleMode.HOMOGENEOUS:
        raise ValueError("homogeneous_field_at needs a homogeneous schedule")
    s = (t - schedule.t_start) / schedule.total_time
    s = min(max(s, 0.0), 1.0)
    return schedule.g_i + (schedule.g_f - schedule.g_i) * s


def fields_at_time(schedule: Schedule, n_sites: int, t: float) -> np.ndarray:
    if schedule.mode is ScheduleMode.HOMOGENEOUS:
        return np.full(n_sites, homogeneous_field_at(t, schedule))
    prof = schedule.profile
    return field_at(prof, np.arange(1, n_sites + 1), prof.velocity * t)


def kink_times(schedule: Schedule, n_sites: int) -> np.ndarray:
    """Times inside the schedule where some site field is not smooth in ``t``.

    Stepping the integrator exactly onto these keeps it at full order.
    """
    if schedule.mode is ScheduleMode.HOMOGENEOUS:
        return np.array([])
    prof = schedule.profile
    hw = prof.half_width
    sites = np.arange(1, n_sites + 1, dtype=float)
    offsets = [hw, -hw]
    if prof.smoothing > 0:
        w = 0.5 * prof.smoothing
        offsets = [hw - w, hw + w, -hw - w, -hw + w]
    t = np.concatenate([(sites - o) / prof.velocity for o in offsets])
    t = t[(t > schedule.t_start) & (t < schedule.t_end)]
    return np.unique(t)
