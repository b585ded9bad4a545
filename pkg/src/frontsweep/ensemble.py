"""Disorder-ensemble aggregation: quantiles, gap-distribution collapse, fits and landscapes."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import ks_2samp

from .disorder import CouplingKind, critical_field, realization_seed, sample_couplings
from .drive import FrontProfile, homogeneous_schedule, schedule_for, velocity_for
from .dynamics import DEFAULT_DT
from .observables import run_quench
from .spectral import BULK_MARGIN, bulk_window, scan_gaps, scan_positions, scan_trajectory

__all__ = [
    "CollapseHistogram",
    "DEFAULT_THETA_EDGES",
    "EnsembleResult",
    "LANDSCAPE_COLUMNS",
    "LogFit",
    "PowerLawFit",
    "QUANTILE_LEVELS",
    "bulk_gap_samples",
    "collapse_histogram",
    "distribution_distance",
    "fit_collapse_prefactor",
    "homogeneous_gap_samples",
    "landscape",
    "landscape_rows",
    "log_inverse_square_fit",
    "parallel_map",
    "powerlaw_fit",
    "quantile",
    "spectral_ensemble",
    "theta_delta",
]

QUANTILE_LEVELS = (0.01, 0.05, 0.50, 0.95, 0.99)
LANDSCAPE_COLUMNS = ("alpha", "T", "v", "N", "q01", "q05", "q50", "q95", "q99", "n_realizations")
DEFAULT_THETA_EDGES = np.linspace(-4.0, 1.0, 101)


def parallel_map(fn: Callable, tasks: Sequence, workers: int = 1) -> list:
    """``[fn(t) for t in tasks]``, optionally in worker processes; result order follows ``tasks``."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, os.cpu_count() or 1, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def quantile(values, q: float) -> float:
    """Nearest-rank quantile: the ``ceil(q n)``-th smallest value."""
    v = np.sort(np.asarray(values, dtype=float).reshape(-1))
    if v.size == 0:
        raise ValueError("quantile of an empty sample")
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q}")
    rank = max(int(math.ceil(q * v.size - 1e-12)), 1)
    return float(v[rank - 1])


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    """Per-realization values at one parameter point plus their quantile tables."""

    params: dict
    seeds: np.ndarray
    values: dict
    quantiles: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, params: dict, seeds, values: dict, levels: Iterable[float] = QUANTILE_LEVELS):
        vals = {k: np.asarray(v, dtype=float) for k, v in values.items()}
        table = {k: {q: quantile(v, q) for q in levels} for k, v in vals.items()}
        return cls(dict(params), np.asarray(seeds, dtype=np.uint64), vals, table)

    @property
    def n_realizations(self) -> int:
        return int(self.seeds.size)

    def median(self, key: str) -> float:
        return quantile(self.values[key], 0.5)


def theta_delta(Delta, alpha: float):
    """Scaling variable ``alpha**(1/3) * ln(Delta)``."""
    return alpha ** (1.0 / 3.0) * np.log(Delta)


@dataclass(frozen=True, eq=False)
class CollapseHistogram:
    alpha: float
    theta: np.ndarray
    edges: np.ndarray
    density: np.ndarray
    n_rejected: int
    n_outside: int


def collapse_histogram(Delta, alpha: float, edges=DEFAULT_THETA_EDGES) -> CollapseHistogram:
    """Histogram of ``theta_Delta`` on fixed edges, normalized over the in-range samples.

    Non-positive gaps are dropped and counted in ``n_rejected``.
    """
    Delta = np.asarray(Delta, dtype=float).reshape(-1)
    good = Delta > 0
    theta = theta_delta(Delta[good], alpha)
    edges = np.asarray(edges, dtype=float)
    counts, _ = np.histogram(theta, bins=edges)
    inside = int(counts.sum())
    widths = np.diff(edges)
    density = counts / (inside * widths) if inside else np.zeros_like(widths)
    return CollapseHistogram(alpha, theta, edges, density, int((~good).sum()), int(theta.size - inside))


def _samples(h) -> np.ndarray:
    return h.theta if isinstance(h, CollapseHistogram) else np.asarray(h, dtype=float)


def distribution_distance(h1, h2) -> float:
    """Two-sample Kolmogorov-Smirnov statistic on the raw samples."""
    return float(ks_2samp(_samples(h1), _samples(h2)).statistic)


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    r2: float


def powerlaw_fit(x, y) -> PowerLawFit:
    """Least squares of ``ln y = ln a + b ln x``."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if lx.size < 2:
        raise ValueError("a power-law fit needs at least two points")
    b, ln_a = np.polyfit(lx, ly, 1)
    resid = ly - (ln_a + b * lx)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(float(b), float(math.exp(ln_a)), float(r2))


@dataclass(frozen=True)
class LogFit:
    a: float
    b: float
    residuals: np.ndarray
    r2: float
    poor: bool


def log_inverse_square_fit(T, Q_density, min_r2: float = 0.9) -> LogFit:
    """Fit ``Q/N = a / ln(T)**2 + b``; ``poor`` unless ``a > 0`` and ``r2 >= min_r2``."""
    x = 1.0 / np.log(np.asarray(T, dtype=float)) ** 2
    y = np.asarray(Q_density, dtype=float)
    a, b = np.polyfit(x, y, 1)
    resid = y - (a * x + b)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else math.nan
    poor = not (a > 0 and r2 >= min_r2)
    return LogFit(float(a), float(b), resid, float(r2), bool(poor))


# --- gap sampling -------------------------------------------------------------


def _bulk_gaps_one(task):
    n_sites, alpha, seed, kind, per_site, margin, rule = task
    c = sample_couplings(n_sites, seed, kind)
    prof = FrontProfile(alpha)
    lo, hi = bulk_window(n_sites, prof, margin, rule, critical_field(kind))
    pos = scan_positions(n_sites, prof, int(round(per_site * (n_sites + 2 * prof.half_width))) + 1)
    pos = pos[(pos >= lo) & (pos <= hi)]
    return scan_gaps(c, prof, pos)


def bulk_gap_samples(
    n_sites: int,
    alpha: float,
    n_realizations: int,
    base_seed: int = 0,
    kind: CouplingKind | str = CouplingKind.DISORDERED,
    per_site: float = 1.0,
    margin: float = BULK_MARGIN,
    workers: int = 1,
    rule: str = "auto",
) -> np.ndarray:
    """Same-parity gaps at front positions inside the bulk window, pooled over realizations.

    ``per_site`` is the density of front positions; the grid is the trajectory grid
    of ``scan_positions`` restricted to the window.
    """
    kind = CouplingKind.parse(kind)
    tasks = [(n_sites, alpha, realization_seed(base_seed, i), kind, per_site, margin, rule) for i in range(n_realizations)]
    return np.concatenate(parallel_map(_bulk_gaps_one, tasks, workers))


def _homogeneous_gap_one(task):
    from .chain import low_singular_values

    n_sites, g, seed, kind = task
    c = sample_couplings(n_sites, seed, kind)
    s = low_singular_values(c, np.full(n_sites, g), 2)
    return 4.0 * (s[0] + s[1])


def homogeneous_gap_samples(
    n_sites: int,
    n_realizations: int,
    g: float | None = None,
    base_seed: int = 0,
    kind: CouplingKind | str = CouplingKind.DISORDERED,
    workers: int = 1,
) -> np.ndarray:
    """Same-parity gap of the chain in a uniform field (default the critical one), one per realization."""
    kind = CouplingKind.parse(kind)
    if g is None:
        g = critical_field(kind)
    tasks = [(n_sites, g, realization_seed(base_seed, i), kind) for i in range(n_realizations)]
    return np.asarray(parallel_map(_homogeneous_gap_one, tasks, workers))


def fit_collapse_prefactor(
    homogeneous_gaps: dict,
    theta_reference,
    c_range: tuple[float, float] = (0.05, 2.0),
    n_grid: int = 400,
) -> tuple[float, float]:
    """Prefactor ``c`` making ``ln(Delta) / sqrt(c N)`` closest (in KS distance) to ``theta_reference``.

    ``homogeneous_gaps`` maps chain length ``N`` to gap samples; all sizes are
    pooled. Returns ``(c, ks_distance)``; ``c`` is scanned on a log grid and then
    refined around the best grid point.
    """
    ref = _samples(theta_reference)
    logs = [(np.log(np.asarray(d, dtype=float)), n) for n, d in homogeneous_gaps.items()]

    def dist(c):
        x = np.concatenate([lg / math.sqrt(c * n) for lg, n in logs])
        return float(ks_2samp(x, ref).statistic)

    grid = np.geomspace(*c_range, n_grid)
    d = np.array([dist(c) for c in grid])
    k = int(np.argmin(d))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, n_grid - 1)]
    fine = np.linspace(lo, hi, 41)
    df = np.array([dist(c) for c in fine])
    j = int(np.argmin(df))
    return float(fine[j]), float(df[j])


# --- spectral and quench ensembles -------------------------------------------


def _spectral_one(task):
    n_sites, alpha, seed, kind, margin, rule = task
    tr = scan_trajectory(sample_couplings(n_sites, seed, kind), FrontProfile(alpha), margin=margin, rule=rule, bulk_only=True)
    return tr.Delta_min, tr.Omega_max, tr.v_t_min


def spectral_ensemble(
    n_sites: int,
    alpha: float,
    n_realizations: int,
    base_seed: int = 0,
    kind: CouplingKind | str = CouplingKind.DISORDERED,
    margin: float = BULK_MARGIN,
    rule: str = "auto",
    workers: int = 1,
) -> EnsembleResult:
    """Bulk ``Delta_min``, ``Omega_max`` and ``v_t_min`` over realizations."""
    kind = CouplingKind.parse(kind)
    seeds = [realization_seed(base_seed, i) for i in range(n_realizations)]
    out = np.array(parallel_map(_spectral_one, [(n_sites, alpha, s, kind, margin, rule) for s in seeds], workers))
    return EnsembleResult.from_values(
        {"alpha": alpha, "N": n_sites, "kind": kind.value},
        seeds,
        {"Delta_min": out[:, 0], "Omega_max": out[:, 1], "v_t_min": out[:, 2]},
    )


def _quench_one(task):
    n_sites, alpha, total_time, seed, kind, dt, g_i, g_f = task
    c = sample_couplings(n_sites, seed, kind)
    if alpha is None:
        sch = homogeneous_schedule(total_time, g_i, g_f)
    else:
        v = velocity_for(n_sites, alpha, g_i, g_f, total_time)
        sch = schedule_for(n_sites, FrontProfile(alpha, v, g_i, g_f))
    r = run_quench(c, sch, dt)
    return r.residual_energy, r.kink_density


def landscape(
    alphas: Sequence[float | None],
    total_times: Sequence[float],
    n_sites: int,
    n_realizations: int,
    base_seed: int = 0,
    kind: CouplingKind | str = CouplingKind.DISORDERED,
    dt: float = DEFAULT_DT,
    g_i: float = 3.0,
    g_f: float = 0.0,
    workers: int = 1,
) -> list[EnsembleResult]:
    """Residual-energy quantiles on an ``(alpha, T)`` grid; ``alpha=None`` is the homogeneous ramp.

    Realization ``i`` uses the same couplings at every grid point.
    """
    kind = CouplingKind.parse(kind)
    seeds = [realization_seed(base_seed, i) for i in range(n_realizations)]
    points = [(a, T) for T in total_times for a in alphas]
    tasks = [(n_sites, a, T, s, kind, dt, g_i, g_f) for a, T in points for s in seeds]
    flat = parallel_map(_quench_one, tasks, workers)
    out = []
    for k, (a, T) in enumerate(points):
        chunk = np.array(flat[k * n_realizations : (k + 1) * n_realizations])
        v = math.inf if a is None else velocity_for(n_sites, a, g_i, g_f, T)
        out.append(
            EnsembleResult.from_values(
                {"alpha": 0.0 if a is None else a, "T": T, "v": v, "N": n_sites, "homogeneous": a is None},
                seeds,
                {"Q": chunk[:, 0], "kink_density": chunk[:, 1]},
            )
        )
    return out


def landscape_rows(results: Sequence[EnsembleResult], key: str = "Q") -> list[tuple]:
    """Rows matching ``LANDSCAPE_COLUMNS``; the homogeneous ramp appears as ``alpha = 0``, ``v = inf``."""
    rows = []
    for r in results:
        q = r.quantiles[key]
        p = r.params
        rows.append((p["alpha"], p["T"], p["v"], p["N"], *(q[lvl] for lvl in QUANTILE_LEVELS), r.n_realizations))
    return rows
