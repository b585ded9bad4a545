"""End-to-end acceptance gates; each test reports one PASS/FAIL line.

The landscape gate runs about an hour on one core; set FRONTSWEEP_WORKERS to
spread the quench ensembles over processes.
"""

import os
import time

import numpy as np

from conftest import CORPUS_SEEDS, CORPUS_SIZES, report
from frontsweep.crosscheck import ED_REFERENCE_STEP, compare_quench, compare_statics
from frontsweep.disorder import CouplingKind, critical_field, realization_seed, sample_couplings
from frontsweep.drive import FrontProfile, homogeneous_schedule, schedule_for, velocity_for
from frontsweep.ensemble import (
    bulk_gap_samples,
    distribution_distance,
    fit_collapse_prefactor,
    homogeneous_gap_samples,
    landscape,
    powerlaw_fit,
    theta_delta,
)
from frontsweep.observables import run_quench
from frontsweep.spectral import scan_trajectory

WORKERS = int(os.environ.get("FRONTSWEEP_WORKERS", "1"))


def test_criterion_1_static_oracle():
    t0 = time.perf_counter()
    p = FrontProfile(0.5)
    worst = {"gap": 0.0, "mixing": 0.0}
    count = 0
    for N in CORPUS_SIZES:
        for seed in CORPUS_SEEDS:
            c = sample_couplings(N, seed)
            for frac in (0.1, 0.3, 0.5, 0.7, 0.9):
                n_f = -p.half_width + frac * (N + 2 * p.half_width)
                for comp in compare_statics(c, p, n_f):
                    worst[comp.quantity] = max(worst[comp.quantity], comp.error)
                count += 1
    elapsed = time.perf_counter() - t0
    ok = max(worst.values()) < 1e-9 and elapsed < 60
    report(1, ok, f"{count} positions, max |gap err|={worst['gap']:.1e}, max |mixing err|={worst['mixing']:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_2_dynamic_oracle_and_order():
    t0 = time.perf_counter()
    N, T = 6, 50.0
    c = sample_couplings(N, 3)
    p = FrontProfile(0.25, velocity_for(N, 0.25, 3.0, 0.0, T))
    sch = schedule_for(N, p)
    coarse = compare_quench(c, sch, 0.005, ED_REFERENCE_STEP)
    fine = compare_quench(c, sch, 0.0025, ED_REFERENCE_STEP)
    match = all(comp.error < 1e-7 for comp in coarse)
    ratios = [a.error / b.error for a, b in zip(coarse, fine)]
    order = all(12.0 <= r <= 20.0 for r in ratios)
    elapsed = time.perf_counter() - t0
    ok = match and order and elapsed < 300
    errs = ", ".join(f"{comp.quantity} err={comp.error:.1e}" for comp in coarse)
    rat = ", ".join(f"{comp.quantity} {r:.1f}" for comp, r in zip(coarse, ratios))
    report(2, ok, f"{errs}; halving-dt error ratios: {rat}; {elapsed:.0f}s")
    assert ok


def test_criterion_3_clean_calibration():
    t0 = time.perf_counter()
    N = 512
    c = sample_couplings(N, 0, CouplingKind.CLEAN)
    alphas = [2.0**-7, 2.0**-6, 2.0**-5]
    gaps_ok, vt_ok, omegas, details = True, True, [], []
    for a in alphas:
        tr = scan_trajectory(c, FrontProfile(a), bulk_only=True)
        rel_gap = tr.Delta_min / np.sqrt(8 * a) - 1
        rel_vt = tr.v_t_min / 2 - 1
        gaps_ok &= abs(rel_gap) <= 0.10
        vt_ok &= abs(rel_vt) <= 0.15
        omegas.append(tr.Omega_max)
        details.append(f"a=2^{int(np.log2(a))}: dGap={rel_gap:+.3f} dv_t={rel_vt:+.3f}")
    slope = powerlaw_fit(alphas, omegas).exponent
    elapsed = time.perf_counter() - t0
    ok = gaps_ok and vt_ok and abs(slope - 1) <= 0.1 and elapsed < 600
    report(3, ok, f"{'; '.join(details)}; Omega slope={slope:.3f}; {elapsed:.0f}s")
    assert ok


def test_criterion_4_critical_field():
    g_c = critical_field(CouplingKind.DISORDERED)
    mc = critical_field(CouplingKind.DISORDERED, n_samples=10**6, seed=1)
    ok = round(g_c, 4) == 0.9558 and abs(mc - g_c) < 1e-3
    report(4, ok, f"closed form {g_c:.6f}, Monte Carlo {mc:.6f}")
    assert ok


def test_criterion_5_clean_kzm_exponent():
    t0 = time.perf_counter()
    N = 256
    c = sample_couplings(N, 0, CouplingKind.CLEAN)
    taus = [10.0, 30.0, 100.0, 300.0, 1000.0]
    # field ramps linearly from 3 to 0 at rate 1/tau
    d = [run_quench(c, homogeneous_schedule(3.0 * tau), 0.05).kink_density for tau in taus]
    fit = powerlaw_fit(taus, d)
    elapsed = time.perf_counter() - t0
    ok = abs(fit.exponent + 0.5) <= 0.05 and elapsed < 900
    dens = ", ".join(f"{x:.2e}" for x in d)
    report(5, ok, f"kink densities [{dens}], exponent={fit.exponent:.3f}; {elapsed:.0f}s")
    assert ok


def test_criterion_6_gap_collapse():
    t0 = time.perf_counter()
    N = 256
    theta = {}
    sizes = {}
    for a in (2.0**-7, 2.0**-6, 2.0**-4):
        gaps = bulk_gap_samples(N, a, 2000, base_seed=1, per_site=0.25, rule="critical", workers=WORKERS)
        theta[a] = theta_delta(gaps, a)
        sizes[a] = gaps.size
    ks_near = distribution_distance(theta[2.0**-6], theta[2.0**-7])
    ks_far = distribution_distance(theta[2.0**-4], theta[2.0**-7])
    hom = {n: homogeneous_gap_samples(n, 4000, None, base_seed=2, workers=WORKERS) for n in (128, 256)}
    c_fit, ks_c = fit_collapse_prefactor(hom, theta[2.0**-7])
    elapsed = time.perf_counter() - t0
    enough = min(sizes[2.0**-7], sizes[2.0**-6]) >= 10**5
    ok = enough and ks_near < 0.05 and ks_far > 0.1 and abs(c_fit - 0.46) <= 0.15 and elapsed < 1800
    report(
        6,
        ok,
        f"samples {sizes[2.0**-7]}/{sizes[2.0**-6]}, KS(2^-6,2^-7)={ks_near:.3f} (<0.05), "
        f"KS(2^-4,2^-7)={ks_far:.3f} (>0.1), c={c_fit:.3f} (KS {ks_c:.3f}); {elapsed:.0f}s",
    )
    assert ok


def test_criterion_7_landscape_ordering():
    t0 = time.perf_counter()
    N = 128
    alphas = [2.0**k for k in range(-6, 1)]
    res = landscape([None, *alphas], [100.0, 2000.0], N, 100, base_seed=7, dt=0.05, workers=WORKERS)
    med = {(r.params["homogeneous"], r.params["alpha"], r.params["T"]): r.median("Q") for r in res}

    def best(T):
        return min((med[(False, a, T)], a) for a in alphas)

    hom_long, (front_long, a_long) = med[(True, 0.0, 2000.0)], best(2000.0)
    hom_short, (front_short, a_short) = med[(True, 0.0, 100.0)], best(100.0)
    elapsed = time.perf_counter() - t0
    ok = front_long * 10 <= hom_long and hom_short < front_short and elapsed < 7200
    report(
        7,
        ok,
        f"T=2000: homogeneous {hom_long:.3e} vs best front (a=2^{int(np.log2(a_long))}) {front_long:.3e} "
        f"(x{hom_long / front_long:.0f}); T=100: homogeneous {hom_short:.3e} vs best front {front_short:.3e}; {elapsed:.0f}s",
    )
    assert ok


def test_criterion_8_property_suite():
    t0 = time.perf_counter()
    worst_orth = worst_par = 0.0
    min_q = np.inf
    for i in range(6):
        seed = realization_seed(88, i)
        N = 24 + 8 * i
        c = sample_couplings(N, seed)
        for sch in (schedule_for(N, FrontProfile(2.0**-3, 1.0)), homogeneous_schedule(40.0)):
            a = run_quench(c, sch, 0.05)
            b = run_quench(c, sch, 0.05)
            assert a == b, "rerun differs"
            worst_orth = max(worst_orth, a.orthogonality_drift)
            worst_par = max(worst_par, a.parity_drift)
            min_q = min(min_q, a.residual_energy)
    res = landscape([2.0**-2, None], [20.0], 16, 20, base_seed=5)
    monotone = all(list(r.quantiles["Q"].values()) == sorted(r.quantiles["Q"].values()) for r in res)
    elapsed = time.perf_counter() - t0
    ok = worst_orth < 1e-8 and worst_par < 1e-8 and min_q >= -1e-9 and monotone and elapsed < 300
    report(8, ok, f"orthogonality {worst_orth:.1e}, parity {worst_par:.1e}, min Q {min_q:.1e}, quantiles monotone={monotone}, reruns identical; {elapsed:.0f}s")
    assert ok


def test_criterion_9_near_adiabatic_fidelity():
    t0 = time.perf_counter()
    N, a = 64, 2.0**-5
    fids = []
    for i in range(20):
        c = sample_couplings(N, realization_seed(2024, i))
        tr = scan_trajectory(c, FrontProfile(a))
        sch = schedule_for(N, FrontProfile(a, tr.v_t_min / 4))
        fids.append(run_quench(c, sch, 0.05, with_fidelity=True).fidelity)
    good = sum(f > 0.999 for f in fids)
    elapsed = time.perf_counter() - t0
    ok = good >= 18 and elapsed < 1200
    report(9, ok, f"{good}/20 realizations with fidelity > 0.999 (min {min(fids):.5f}); {elapsed:.0f}s")
    assert ok
