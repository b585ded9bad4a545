import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frontsweep.disorder import sample_couplings, realization_seed
from frontsweep.drive import FrontProfile, homogeneous_schedule, schedule_for, velocity_for
from frontsweep.ensemble import (
    DEFAULT_THETA_EDGES,
    LANDSCAPE_COLUMNS,
    EnsembleResult,
    bulk_gap_samples,
    collapse_histogram,
    distribution_distance,
    fit_collapse_prefactor,
    homogeneous_gap_samples,
    landscape,
    landscape_rows,
    log_inverse_square_fit,
    parallel_map,
    powerlaw_fit,
    quantile,
    spectral_ensemble,
    theta_delta,
)
from frontsweep.observables import run_quench


def test_quantile_nearest_rank():
    v = [5.0, 1.0, 4.0, 2.0, 3.0]
    assert quantile(v, 0.5) == 3.0
    assert quantile(v, 0.2) == 1.0
    assert quantile(v, 0.21) == 2.0
    assert quantile(v, 1.0) == 5.0
    assert quantile(np.arange(1, 101), 0.01) == 1.0
    assert quantile(np.arange(1, 101), 0.99) == 99.0
    with pytest.raises(ValueError):
        quantile([], 0.5)
    with pytest.raises(ValueError):
        quantile([1.0], 0.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60))
def test_quantiles_monotone_and_from_sample(values):
    qs = [quantile(values, q) for q in (0.01, 0.05, 0.5, 0.95, 0.99)]
    assert qs == sorted(qs)
    assert all(q in values for q in qs)


def test_ensemble_result_tables():
    r = EnsembleResult.from_values({"alpha": 0.5}, [1, 2, 3], {"Q": [3.0, 1.0, 2.0]})
    assert r.n_realizations == 3
    assert r.median("Q") == 2.0
    assert r.quantiles["Q"][0.99] == 3.0


def test_theta_examples():
    assert theta_delta(1.0, 0.3) == 0.0
    assert theta_delta(math.exp(-4), 1 / 64) == pytest.approx(-1.0)


def test_histogram_normalization_and_rejection():
    rng = np.random.default_rng(0)
    gaps = np.concatenate([np.exp(rng.normal(-3, 1, 5000)), [0.0, -1.0], [1e-40]])
    h = collapse_histogram(gaps, 1 / 8)
    assert h.n_rejected == 2
    assert h.n_outside == 1
    assert np.sum(h.density * np.diff(h.edges)) == pytest.approx(1.0)
    assert np.array_equal(h.edges, DEFAULT_THETA_EDGES)


def test_distribution_distance_trivial_cases():
    x = np.linspace(0, 1, 100)
    assert distribution_distance(x, x) == 0.0
    assert distribution_distance(x, x + 5) == 1.0
    h = collapse_histogram(np.exp(x), 1.0)
    assert distribution_distance(h, h.theta) == 0.0


def test_powerlaw_fit_exact():
    x = np.array([10.0, 30.0, 100.0, 300.0])
    f = powerlaw_fit(x, 2.0 * x**-0.5)
    assert f.exponent == pytest.approx(-0.5)
    assert f.prefactor == pytest.approx(2.0)
    assert f.r2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        powerlaw_fit([1.0], [1.0])


def test_log_fit_exact_and_poor():
    T = np.array([100.0, 300.0, 1000.0, 3000.0])
    good = log_inverse_square_fit(T, 0.7 / np.log(T) ** 2 + 0.01)
    assert good.a == pytest.approx(0.7) and good.b == pytest.approx(0.01) and not good.poor
    bad = log_inverse_square_fit(T, -0.7 / np.log(T) ** 2)
    assert bad.poor


def _square(x):
    return x * x


def test_parallel_map_preserves_order():
    assert parallel_map(_square, [3, 1, 2], workers=1) == [9, 1, 4]
    assert parallel_map(_square, [3, 1, 2], workers=2) == [9, 1, 4]


def test_bulk_gap_samples_positive_and_deterministic():
    a = bulk_gap_samples(48, 1 / 4, 3, base_seed=5)
    b = bulk_gap_samples(48, 1 / 4, 3, base_seed=5)
    assert a.size > 0 and np.all(a > 0)
    assert np.array_equal(a, b)
    crit = bulk_gap_samples(48, 1 / 64, 2, base_seed=5, rule="critical")
    assert crit.size > 0


def test_homogeneous_gaps_match_dense_route():
    from frontsweep.spectral import gap_from_canonical

    gaps = homogeneous_gap_samples(12, 3, g=0.9, base_seed=2)
    for i, d in enumerate(gaps):
        c = sample_couplings(12, realization_seed(2, i))
        assert d == pytest.approx(gap_from_canonical(c, np.full(12, 0.9)), rel=1e-10)


def test_prefactor_fit_recovers_known_scale():
    rng = np.random.default_rng(1)
    c_true = 0.46
    ref = rng.normal(-1.0, 0.3, 20000)
    hom = {n: np.exp(rng.normal(-1.0, 0.3, 20000) * math.sqrt(c_true * n)) for n in (64, 128)}
    c, ks = fit_collapse_prefactor(hom, ref)
    assert c == pytest.approx(c_true, rel=0.05)
    assert ks < 0.02


def test_spectral_ensemble_shapes():
    r = spectral_ensemble(40, 1 / 4, 3, base_seed=1)
    assert r.n_realizations == 3
    assert set(r.values) == {"Delta_min", "Omega_max", "v_t_min"}
    assert np.all(r.values["Delta_min"] > 0)


def test_landscape_point_matches_run_quench():
    N, T = 16, 20.0
    res = landscape([1 / 4, None], [T], N, 2, base_seed=3, dt=0.02)
    assert [r.params["homogeneous"] for r in res] == [False, True]
    s0 = realization_seed(3, 0)
    c = sample_couplings(N, s0)
    v = velocity_for(N, 1 / 4, 3.0, 0.0, T)
    direct = run_quench(c, schedule_for(N, FrontProfile(1 / 4, v)), 0.02)
    assert res[0].values["Q"][0] == direct.residual_energy
    hom = run_quench(c, homogeneous_schedule(T), 0.02)
    assert res[1].values["Q"][0] == hom.residual_energy
    rows = landscape_rows(res)
    assert all(len(row) == len(LANDSCAPE_COLUMNS) for row in rows)
    assert rows[1][0] == 0.0 and math.isinf(rows[1][2])


def test_landscape_independent_of_grid_order():
    a = landscape([1 / 4, 1 / 2], [10.0], 12, 2, base_seed=4)
    b = landscape([1 / 2, 1 / 4], [10.0], 12, 2, base_seed=4)
    assert np.array_equal(a[0].values["Q"], b[1].values["Q"])
