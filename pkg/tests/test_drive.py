import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frontsweep.drive import (
    FrontProfile,
    InvalidTimeError,
    ScheduleMode,
    field_at,
    field_gradient_at,
    fields_at_time,
    homogeneous_field_at,
    homogeneous_schedule,
    kink_times,
    schedule_for,
    velocity_for,
)


def test_leading_plateau():
    assert field_at(FrontProfile(0.5), 20, 10.0) == 3.0


def test_front_centre_is_mean_field():
    for a in (1 / 64, 0.5, 2.0):
        assert field_at(FrontProfile(a), 7, 7.0) == 1.5


def test_ramp_value():
    assert field_at(FrontProfile(0.5), 11, 10.0) == 2.0


def test_gradient_on_plateau_and_ramp():
    p = FrontProfile(1 / 32)
    assert field_gradient_at(p, 10 + 2 * p.half_width, 10.0) == 0.0
    assert field_gradient_at(p, 10, 10.0) == -1 / 32


def test_gradient_sum_over_ramp():
    p = FrontProfile(1 / 8)
    sites = np.arange(1, 201)
    total = field_gradient_at(p, sites, 100.0).sum()
    # 2*half_width + 1 sites on the closed ramp
    assert total == pytest.approx(-(p.g_i - p.g_f) - p.alpha)


@settings(max_examples=60, deadline=None)
@given(alpha=st.floats(1e-3, 4.0), nf=st.floats(-50, 50))
def test_field_monotone_and_bounded(alpha, nf):
    p = FrontProfile(alpha)
    g = field_at(p, np.arange(-60, 61), nf)
    assert np.all(np.diff(g) >= -1e-12)
    assert g.min() >= 0.0 and g.max() <= 3.0


@settings(max_examples=60, deadline=None)
@given(alpha=st.floats(1e-2, 2.0), x=st.floats(-30, 30))
def test_gradient_matches_finite_difference(alpha, x):
    p = FrontProfile(alpha)
    h = 1e-6
    if abs(abs(x) - p.half_width) < 10 * h:
        return
    # site 0, front at -x: derivative with respect to the front position
    fd = (field_at(p, 0.0, -x + h) - field_at(p, 0.0, -x - h)) / (2 * h)
    assert fd == pytest.approx(field_gradient_at(p, 0.0, -x), abs=1e-8)


def test_field_continuous_in_front_position():
    p = FrontProfile(0.25)
    nf = np.linspace(-20, 20, 40001)
    g = field_at(p, 0, nf)
    assert np.abs(np.diff(g)).max() <= p.alpha * (nf[1] - nf[0]) + 1e-12


def test_schedule_total_time():
    s = schedule_for(512, FrontProfile(1 / 32, 1.0))
    assert s.total_time == 608.0
    assert s.t_end - s.t_start == pytest.approx(608.0)


def test_schedule_plateaus_cover_chain():
    p = FrontProfile(0.25, 0.7)
    s = schedule_for(20, p)
    assert np.all(fields_at_time(s, 20, s.t_start) == 3.0)
    assert np.all(fields_at_time(s, 20, s.t_end) == 0.0)


def test_schedule_fast_limit():
    # alpha * v = 1 held fixed while v grows
    s = schedule_for(2, FrontProfile(1e-8, 1e8))
    assert s.total_time == pytest.approx(3.0, rel=1e-7)


def test_velocity_inverse():
    assert velocity_for(128, 1 / 32, 3, 0, 1e4) == pytest.approx(0.0224, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 2000), k=st.integers(-8, 3), T=st.floats(1.0, 1e5))
def test_velocity_schedule_round_trip(n, k, T):
    a = 2.0**k
    v = velocity_for(n, a, 3.0, 0.0, T)
    assert schedule_for(n, FrontProfile(a, v)).total_time == pytest.approx(T, rel=1e-12)


def test_velocity_rejects_nonpositive_time():
    with pytest.raises(InvalidTimeError):
        velocity_for(10, 0.5, 3, 0, 0.0)


def test_homogeneous_ramp_values():
    s = homogeneous_schedule(30.0)
    assert s.mode is ScheduleMode.HOMOGENEOUS
    assert homogeneous_field_at(0.0, s) == 3.0
    assert homogeneous_field_at(15.0, s) == 1.5
    assert homogeneous_field_at(30.0, s) == 0.0
    assert homogeneous_field_at(-5.0, s) == 3.0
    assert homogeneous_field_at(50.0, s) == 0.0


def test_kink_times_are_where_sites_hit_plateau_edges():
    p = FrontProfile(0.5, 2.0)
    s = schedule_for(4, p)
    kt = kink_times(s, 4)
    assert np.all((kt > s.t_start) & (kt < s.t_end))
    for t in kt:
        x = np.arange(1, 5) - p.velocity * t
        assert np.min(np.abs(np.abs(x) - p.half_width)) < 1e-12


def test_smoothing_keeps_continuity_and_range():
    p = FrontProfile(0.5, smoothing=1.0)
    x = np.linspace(-10, 10, 20001)
    g = field_at(p, x, 0.0)
    assert np.abs(np.diff(g)).max() < 1e-3
    assert g.min() >= 0 and g.max() <= 3
    d = field_gradient_at(p, x, 0.0)
    fd = np.gradient(g, x)
    # field depends on x = n - n_f, so d/dn_f = -d/dx
    assert np.abs(fd + d)[1:-1].max() < 1e-3


def test_profile_validation():
    with pytest.raises(ValueError):
        FrontProfile(0.0)
    with pytest.raises(ValueError):
        FrontProfile(0.5, g_i=0.0, g_f=1.0)
