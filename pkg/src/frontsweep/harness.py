"""Command-line experiment driver.

Every run reads a YAML config (optional) and command-line overrides, validates
the whole configuration before computing anything, writes CSV data files and a
``manifest.json`` into the output directory, and exits with

* 0 on success,
* 1 on an invalid configuration,
* 2 when a numerical invariant is violated (non-finite frame, parity or
  orthogonality drift, negative residual energy, failed oracle comparison).

Realization ``i`` of a run uses the couplings seeded by
``realization_seed(base_seed, i)``; data files are byte-identical across reruns
of the same configuration. The default worker count comes from
``FRONTSWEEP_WORKERS`` (1 if unset).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .crosscheck import compare_quench, compare_statics
from .disorder import CouplingKind, critical_field, realization_seed, sample_couplings
from .drive import FrontProfile, homogeneous_schedule, schedule_for, velocity_for
from .dynamics import DEFAULT_DT, NumericalBlowupError
from .ensemble import (
    DEFAULT_THETA_EDGES,
    LANDSCAPE_COLUMNS,
    QUANTILE_LEVELS,
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
    theta_delta,
)
from .majorana import DiagonalizationError
from .observables import run_quench
from .spectral import scan_trajectory

__all__ = ["ConfigError", "EXPERIMENTS", "RunConfig", "recipe_table", "load_config", "main", "run"]

EXPERIMENTS = ("spectral-scan", "gap-collapse", "quench", "landscape", "kzm-sweep", "oracle-check")
WORKERS_ENV = "FRONTSWEEP_WORKERS"
ALPHA_EXPONENT_RANGE = (-8.0, 1.5)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICS = 2

# invariant tolerances enforced on every quench
PARITY_TOL = 1e-8
ORTHOGONALITY_TOL = 1e-8
NEGATIVE_Q_TOL = 1e-9
STATIC_TOL = 1e-9
DYNAMIC_TOL = 1e-7


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


@dataclass
class RunConfig:
    experiment: str = "quench"
    n_sites: int = 64
    alphas: list = field(default_factory=lambda: [1 / 32])
    total_times: list = field(default_factory=list)
    velocities: list = field(default_factory=list)
    taus: list = field(default_factory=list)
    g_i: float = 3.0
    g_f: float = 0.0
    dt: float = DEFAULT_DT
    n_realizations: int = 1
    base_seed: int = 0
    output: str = "runs/out"
    clean: bool = False
    include_homogeneous: bool = True
    with_fidelity: bool = False
    oracle_check: bool = False
    margin: float = 4.0
    bulk_rule: str = "auto"
    positions_per_site: float = 4.0
    homogeneous_sizes: list = field(default_factory=list)
    homogeneous_realizations: int = 0
    workers: int | None = None

    @property
    def kind(self) -> CouplingKind:
        return CouplingKind.CLEAN if self.clean else CouplingKind.DISORDERED

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict, lines: dict | None = None) -> "RunConfig":
        lines = lines or {}
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, value in data.items():
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(_at(lines, key, f"unknown key {key!r}"))
            try:
                kwargs[name] = _coerce(name, value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(_at(lines, key, f"bad value for {key!r}: {exc}")) from None
        return cls(**kwargs)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def validate(self, lines: dict | None = None) -> "RunConfig":
        """Check every downstream constraint; raises ``ConfigError`` naming the offending key."""
        lines = lines or {}

        def fail(key, msg):
            raise ConfigError(_at(lines, key, msg))

        if self.experiment not in EXPERIMENTS:
            fail("experiment", f"experiment must be one of {', '.join(EXPERIMENTS)}")
        if self.n_sites < 2:
            fail("n_sites", "n_sites must be at least 2")
        if not self.g_i > self.g_f:
            fail("g_i", "need g_i > g_f")
        if not self.dt > 0:
            fail("dt", "dt must be positive")
        if self.n_realizations < 1:
            fail("n_realizations", "n_realizations must be at least 1")
        if self.workers is not None and self.workers < 1:
            fail("workers", "workers must be at least 1")
        if self.bulk_rule not in ("auto", "ramp", "critical"):
            fail("bulk_rule", "bulk_rule must be auto, ramp or critical")
        if self.margin < 0:
            fail("margin", "margin must be non-negative")
        if not self.positions_per_site > 0:
            fail("positions_per_site", "positions_per_site must be positive")
        for a in self.alphas:
            if not _is_grid_alpha(a):
                fail("alphas", f"alpha={a} is not a power of two 2^k with 2k integer and -8 <= k <= 1.5")
        for key in ("total_times", "velocities", "taus"):
            if any(not x > 0 for x in getattr(self, key)):
                fail(key, f"all {key} must be positive")
        exp = self.experiment
        if exp in ("spectral-scan", "gap-collapse", "quench", "landscape") and not self.alphas:
            fail("alphas", f"{exp} needs at least one alpha")
        if exp == "quench" and not (self.total_times or self.velocities):
            fail("total_times", "quench needs total_times or velocities")
        if exp == "landscape" and not self.total_times:
            fail("total_times", "landscape needs total_times")
        if exp == "kzm-sweep" and not self.taus:
            fail("taus", "kzm-sweep needs taus")
        if exp == "gap-collapse" and any(n < 2 for n in self.homogeneous_sizes):
            fail("homogeneous_sizes", "homogeneous_sizes must be at least 2")
        if (exp == "oracle-check" or self.oracle_check) and self.n_sites > 12:
            fail("n_sites", "oracle comparisons need n_sites <= 12")
        if exp == "oracle-check" and self.g_f != 0.0 and self.n_sites < 2:
            fail("g_f", "invalid final field")
        return self

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return self.workers
        env = os.environ.get(WORKERS_ENV)
        if env is None:
            return 1
        try:
            return max(int(env), 1)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None


_LIST_KEYS = {"alphas", "total_times", "velocities", "taus", "homogeneous_sizes"}
_INT_KEYS = {"n_sites", "n_realizations", "base_seed", "homogeneous_realizations"}
_BOOL_KEYS = {"clean", "include_homogeneous", "with_fidelity", "oracle_check"}
_STR_KEYS = {"experiment", "output", "bulk_rule"}


def parse_number(text) -> float:
    """Float from ``0.03125``, ``1/32``, ``2^-5`` or ``2**-5``."""
    if isinstance(text, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().replace("**", "^")
    if "^" in s:
        base, exp = s.split("^", 1)
        return float(base) ** float(Fraction(exp.strip("()")))
    if "/" in s:
        return float(Fraction(s))
    return float(s)


def _coerce(name, value):
    if name in _LIST_KEYS:
        items = value if isinstance(value, (list, tuple)) else [value]
        if name == "homogeneous_sizes":
            return [int(x) for x in items]
        return [parse_number(x) for x in items]
    if name in _INT_KEYS:
        if isinstance(value, bool) or float(value) != int(value):
            raise ValueError("expected an integer")
        return int(value)
    if name in _BOOL_KEYS:
        if not isinstance(value, bool):
            raise ValueError("expected true or false")
        return value
    if name in _STR_KEYS:
        return str(value)
    if name == "workers":
        return None if value is None else int(value)
    return parse_number(value)


def _is_grid_alpha(a: float) -> bool:
    if not a > 0:
        return False
    k2 = 2.0 * math.log2(a)
    lo, hi = ALPHA_EXPONENT_RANGE
    return abs(k2 - round(k2)) < 1e-9 and 2 * lo - 1e-9 <= k2 <= 2 * hi + 1e-9


def _at(lines: dict, key: str, msg: str) -> str:
    line = lines.get(key)
    return f"line {line}: {msg}" if line else msg


def load_config(path: str | Path) -> tuple[dict, dict]:
    """YAML mapping plus the 1-based line of each top-level key."""
    text = Path(path).read_text()
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark is not None else ""
        raise ConfigError(f"{path}: {where}invalid YAML ({getattr(exc, 'problem', exc)})") from None
    if data is None:
        return {}, {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: line 1: top level must be a mapping")
    lines = {k.value: k.start_mark.line + 1 for k, _ in node.value}
    return data, lines


# --- output helpers ------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_atomic(path: Path, text: str) -> None:
    """Write via a temporary file in the same directory and rename over ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    write_atomic(path, buf.getvalue())


# --- experiments --------------------------------------------------------------


def _seeds(cfg: RunConfig) -> list[int]:
    return [realization_seed(cfg.base_seed, i) for i in range(cfg.n_realizations)]


def _spectral_task(task):
    n_sites, alpha, seed, kind, margin, rule, pps, g_i, g_f = task
    prof = FrontProfile(alpha, 1.0, g_i, g_f)
    n_grid = int(round(pps * (n_sites + 2 * prof.half_width))) + 1
    return scan_trajectory(sample_couplings(n_sites, seed, kind), prof, n_grid=n_grid, margin=margin, rule=rule)


def _run_spectral_scan(cfg: RunConfig, out: Path, workers: int) -> dict:
    tasks = [
        (cfg.n_sites, a, s, cfg.kind, cfg.margin, cfg.bulk_rule, cfg.positions_per_site, cfg.g_i, cfg.g_f)
        for a in cfg.alphas
        for s in _seeds(cfg)
    ]
    trajs = parallel_map(_spectral_task, tasks, workers)
    rows, summary = [], []
    for task, tr in zip(tasks, trajs):
        _, a, seed = task[:3]
        rows.extend(tr.rows(seed, a))
        summary.append((seed, a, cfg.n_sites, tr.bulk_window[0], tr.bulk_window[1], tr.Delta_min, tr.Omega_max, tr.v_t_min))
    write_csv(out / "trajectories.csv", ("realization_seed", "alpha", "n_f", "Delta", "Omega", "v_t_local"), rows)
    write_csv(out / "summary.csv", ("realization_seed", "alpha", "N", "bulk_lo", "bulk_hi", "Delta_min", "Omega_max", "v_t_min"), summary)
    return {"files": ["trajectories.csv", "summary.csv"]}


def _run_gap_collapse(cfg: RunConfig, out: Path, workers: int) -> dict:
    thetas = {}
    hist_rows = []
    info = {}
    per_site = min(cfg.positions_per_site, 1.0)
    for a in cfg.alphas:
        gaps = bulk_gap_samples(cfg.n_sites, a, cfg.n_realizations, cfg.base_seed, cfg.kind, per_site, cfg.margin, workers, cfg.bulk_rule)
        h = collapse_histogram(gaps, a, DEFAULT_THETA_EDGES)
        thetas[a] = h.theta
        info[repr(a)] = {"samples": int(h.theta.size), "rejected": h.n_rejected, "outside_edges": h.n_outside}
        for lo, hi, d in zip(h.edges[:-1], h.edges[1:], h.density):
            hist_rows.append((a, lo, hi, d))
    write_csv(out / "histograms.csv", ("alpha", "theta_lo", "theta_hi", "density"), hist_rows)
    ks_rows = [(a, b, distribution_distance(thetas[a], thetas[b])) for i, a in enumerate(cfg.alphas) for b in cfg.alphas[i + 1 :]]
    write_csv(out / "distances.csv", ("alpha_1", "alpha_2", "ks_distance"), ks_rows)
    files = ["histograms.csv", "distances.csv"]
    if cfg.homogeneous_sizes and cfg.homogeneous_realizations > 0:
        hom = {
            n: homogeneous_gap_samples(n, cfg.homogeneous_realizations, None, cfg.base_seed + 1, cfg.kind, workers)
            for n in cfg.homogeneous_sizes
        }
        ref = thetas[min(cfg.alphas)]
        c, ks = fit_collapse_prefactor(hom, ref)
        write_csv(out / "prefactor.csv", ("c", "ks_distance", "reference_alpha"), [(c, ks, min(cfg.alphas))])
        files.append("prefactor.csv")
        info["prefactor"] = {"c": c, "ks_distance": ks}
    info["files"] = files
    return info


def _schedules(cfg: RunConfig, alpha: float):
    for T in cfg.total_times:
        v = velocity_for(cfg.n_sites, alpha, cfg.g_i, cfg.g_f, T)
        yield schedule_for(cfg.n_sites, FrontProfile(alpha, v, cfg.g_i, cfg.g_f))
    for v in cfg.velocities:
        yield schedule_for(cfg.n_sites, FrontProfile(alpha, v, cfg.g_i, cfg.g_f))


def _quench_task(task):
    n_sites, seed, kind, sch, dt, with_fid = task
    return run_quench(sample_couplings(n_sites, seed, kind), sch, dt, with_fidelity=with_fid, seed=seed)


def _check_result(r) -> None:
    if r.parity_drift > PARITY_TOL:
        raise InvariantViolation(f"parity drift {r.parity_drift:.3e} (seed {r.seed})")
    if r.orthogonality_drift > ORTHOGONALITY_TOL:
        raise InvariantViolation(f"orthogonality drift {r.orthogonality_drift:.3e} (seed {r.seed})")
    if r.residual_energy < -NEGATIVE_Q_TOL:
        raise InvariantViolation(f"negative residual energy {r.residual_energy:.3e} (seed {r.seed})")


_QUENCH_COLUMNS = (
    "realization_seed", "mode", "alpha", "v", "T", "N", "dt",
    "residual_energy", "kink_density", "fidelity", "parity_drift", "orthogonality_drift",
)


def _quench_row(r):
    fid = math.nan if r.fidelity is None else r.fidelity
    alpha = 0.0 if r.alpha is None else r.alpha
    v = math.inf if r.velocity is None else r.velocity
    return (r.seed, r.mode, alpha, v, r.total_time, r.n_sites, r.dt, r.residual_energy, r.kink_density, fid, r.parity_drift, r.orthogonality_drift)


def _run_quench(cfg: RunConfig, out: Path, workers: int) -> dict:
    seeds = _seeds(cfg)
    scheds = [s for a in cfg.alphas for s in _schedules(cfg, a)]
    if cfg.include_homogeneous:
        scheds += [homogeneous_schedule(T, cfg.g_i, cfg.g_f) for T in cfg.total_times]
    tasks = [(cfg.n_sites, seed, cfg.kind, sch, cfg.dt, cfg.with_fidelity) for sch in scheds for seed in seeds]
    results = parallel_map(_quench_task, tasks, workers)
    for r in results:
        _check_result(r)
    write_csv(out / "quench.csv", _QUENCH_COLUMNS, [_quench_row(r) for r in results])
    info = {"files": ["quench.csv"]}
    if cfg.oracle_check:
        rows = []
        for sch in scheds:
            for seed in seeds:
                for c in compare_quench(sample_couplings(cfg.n_sites, seed, cfg.kind), sch, cfg.dt):
                    rows.append((seed, sch.mode.value, sch.total_time, c.quantity, c.value, c.reference, c.error, c.error <= DYNAMIC_TOL))
        write_csv(out / "oracle.csv", ("realization_seed", "mode", "T", "quantity", "value", "reference", "error", "passed"), rows)
        info["files"].append("oracle.csv")
        info["oracle_passed"] = all(r[-1] for r in rows)
        if not info["oracle_passed"]:
            raise InvariantViolation("quench results disagree with the spin-space oracle (see oracle.csv)")
    return info


def _run_landscape(cfg: RunConfig, out: Path, workers: int) -> dict:
    alphas = list(cfg.alphas) + ([None] if cfg.include_homogeneous else [])
    results = landscape(alphas, cfg.total_times, cfg.n_sites, cfg.n_realizations, cfg.base_seed, cfg.kind, cfg.dt, cfg.g_i, cfg.g_f, workers)
    write_csv(out / "landscape.csv", LANDSCAPE_COLUMNS, landscape_rows(results))
    per_real = []
    for r in results:
        for seed, q, d in zip(r.seeds, r.values["Q"], r.values["kink_density"]):
            per_real.append((r.params["alpha"], r.params["T"], r.params["v"], int(seed), q, d))
    write_csv(out / "realizations.csv", ("alpha", "T", "v", "realization_seed", "residual_energy", "kink_density"), per_real)
    if any(np.min(r.values["Q"]) < -NEGATIVE_Q_TOL for r in results):
        raise InvariantViolation("negative residual energy in landscape")
    info = {"files": ["landscape.csv", "realizations.csv"]}
    if cfg.include_homogeneous and len(cfg.total_times) >= 3:
        hom = [r for r in results if r.params["homogeneous"]]
        fit = log_inverse_square_fit([r.params["T"] for r in hom], [r.median("Q") / cfg.n_sites for r in hom])
        info["homogeneous_log_fit"] = {"a": fit.a, "b": fit.b, "r2": fit.r2, "poor": fit.poor}
    return info


def _kzm_task(task):
    n_sites, seed, kind, tau, dt, g_i, g_f = task
    sch = homogeneous_schedule(tau * (g_i - g_f), g_i, g_f)
    return run_quench(sample_couplings(n_sites, seed, kind), sch, dt, seed=seed)


def _run_kzm(cfg: RunConfig, out: Path, workers: int) -> dict:
    seeds = _seeds(cfg) if not cfg.clean else [0]
    tasks = [(cfg.n_sites, s, cfg.kind, tau, cfg.dt, cfg.g_i, cfg.g_f) for tau in cfg.taus for s in seeds]
    results = parallel_map(_kzm_task, tasks, workers)
    for r in results:
        _check_result(r)
    rows = [(t[3], r.total_time, cfg.n_sites, t[1], r.kink_density, r.residual_energy) for t, r in zip(tasks, results)]
    write_csv(out / "kzm.csv", ("tau_Q", "T", "N", "realization_seed", "kink_density", "residual_energy"), rows)
    info = {"files": ["kzm.csv"]}
    if len(cfg.taus) >= 2 and cfg.g_f == 0.0:
        mean_d = [np.mean([r.kink_density for t, r in zip(tasks, results) if t[3] == tau]) for tau in cfg.taus]
        fit = powerlaw_fit(cfg.taus, mean_d)
        info["kink_density_fit"] = {"exponent": fit.exponent, "prefactor": fit.prefactor, "r2": fit.r2}
    return info


ORACLE_SIZES = (2, 4, 6, 8)
ORACLE_FRONT_FRACTIONS = (0.1, 0.3, 0.5, 0.7, 0.9)


def _run_oracle_check(cfg: RunConfig, out: Path, workers: int) -> dict:
    rows = []
    sizes = [n for n in ORACLE_SIZES if n <= cfg.n_sites] or [cfg.n_sites]
    alpha = cfg.alphas[0] if cfg.alphas else 0.5
    for N in sizes:
        prof = FrontProfile(alpha, 1.0, cfg.g_i, cfg.g_f)
        hw = prof.half_width
        for seed in _seeds(cfg):
            c = sample_couplings(N, seed, cfg.kind)
            for frac in ORACLE_FRONT_FRACTIONS:
                n_f = -hw + frac * (N + 2 * hw)
                for comp in compare_statics(c, prof, n_f):
                    rows.append(("statics", N, seed, n_f, comp.quantity, comp.value, comp.reference, comp.error, comp.error <= STATIC_TOL))
    Nd = min(cfg.n_sites, 6)
    T = cfg.total_times[0] if cfg.total_times else 50.0
    v = velocity_for(Nd, alpha, cfg.g_i, cfg.g_f, T)
    sch = schedule_for(Nd, FrontProfile(alpha, v, cfg.g_i, cfg.g_f))
    seed = _seeds(cfg)[0]
    for comp in compare_quench(sample_couplings(Nd, seed, cfg.kind), sch, cfg.dt):
        rows.append(("dynamics", Nd, seed, T, comp.quantity, comp.value, comp.reference, comp.error, comp.error <= DYNAMIC_TOL))
    write_csv(out / "oracle.csv", ("kind", "N", "realization_seed", "position_or_T", "quantity", "value", "reference", "error", "passed"), rows)
    failed = [r for r in rows if not r[-1]]
    for r in rows:
        status = "PASS" if r[-1] else "FAIL"
        print(f"{status} {r[0]} N={r[1]} seed={r[2]} {r[4]}: err={r[7]:.2e}")
    if failed:
        raise InvariantViolation(f"{len(failed)} of {len(rows)} oracle comparisons failed")
    return {"files": ["oracle.csv"], "comparisons": len(rows)}


_RUNNERS = {
    "spectral-scan": _run_spectral_scan,
    "gap-collapse": _run_gap_collapse,
    "quench": _run_quench,
    "landscape": _run_landscape,
    "kzm-sweep": _run_kzm,
    "oracle-check": _run_oracle_check,
}


def run(cfg: RunConfig) -> int:
    """Execute a validated config; returns the process exit code."""
    out = Path(cfg.output)
    workers = cfg.resolved_workers()
    t0 = time.perf_counter()
    status, error, info = EXIT_OK, None, {}
    try:
        info = _RUNNERS[cfg.experiment](cfg, out, workers)
    except (InvariantViolation, NumericalBlowupError, DiagonalizationError) as exc:
        status, error = EXIT_NUMERICS, str(exc)
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
    manifest = {
        "artifact": "frontsweep",
        "version": __version__,
        "config": cfg.to_dict(),
        "critical_field": critical_field(cfg.kind),
        "quantile_levels": list(QUANTILE_LEVELS),
        "seed_rule": "realization_seed(base_seed, i) = splitmix64(base_seed + i * 0x9E3779B97F4A7C15 mod 2^64)",
        "workers": workers,
        "wall_time_s": time.perf_counter() - t0,
        "exit_status": status,
        "error": error,
        "results": info,
    }
    write_atomic(out / "manifest.json", json.dumps(manifest, indent=2, default=float) + "\n")
    return status


# --- recipes ------------------------------------------------------------------

_POW = [2.0**k for k in range(-8, 2)]


def recipe_table() -> dict[str, RunConfig]:
    """Ready-made desk-scale configurations, keyed by recipe name."""
    return {
        "front-scan": RunConfig(experiment="spectral-scan", n_sites=512, alphas=[1 / 32], n_realizations=1, output="runs/front-scan"),
        "threshold-stats": RunConfig(
            experiment="spectral-scan", n_sites=512, alphas=[2.0**k for k in range(-7, -1)],
            n_realizations=100, positions_per_site=1.0, output="runs/threshold-stats",
        ),
        "gap-collapse": RunConfig(
            experiment="gap-collapse", n_sites=256, alphas=[2.0**-4, 2.0**-6, 2.0**-7], n_realizations=2000,
            positions_per_site=0.25, bulk_rule="critical", homogeneous_sizes=[128, 256], homogeneous_realizations=4000, output="runs/gap-collapse",
        ),
        "landscape": RunConfig(
            experiment="landscape", n_sites=128, alphas=[2.0**k for k in range(-6, 1)], total_times=[100.0, 300.0, 1000.0, 2000.0],
            n_realizations=100, dt=0.05, output="runs/landscape",
        ),
        "landscape-large": RunConfig(
            experiment="landscape", n_sites=512, alphas=[2.0**k for k in range(-8, 2)], total_times=[100.0, 1000.0, 10000.0],
            n_realizations=500, dt=0.05, output="runs/landscape-large",
        ),
        "slope-comparison": RunConfig(
            experiment="landscape", n_sites=128, alphas=[1 / 32, 1 / 16], total_times=[100.0, 300.0, 1000.0, 3000.0, 10000.0],
            n_realizations=100, dt=0.05, output="runs/slope-comparison",
        ),
        "clean-calibration": RunConfig(
            experiment="spectral-scan", n_sites=512, alphas=[2.0**-7, 2.0**-6, 2.0**-5, 2.0**-4], n_realizations=1,
            clean=True, output="runs/clean-calibration",
        ),
        "kzm": RunConfig(
            experiment="kzm-sweep", n_sites=256, taus=[10.0, 30.0, 100.0, 300.0, 1000.0], clean=True, dt=0.05,
            alphas=[], output="runs/kzm",
        ),
        "oracle": RunConfig(experiment="oracle-check", n_sites=8, alphas=[0.5], n_realizations=20, dt=0.005, output="runs/oracle"),
    }


# --- command line -------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML file with RunConfig keys")
    p.add_argument("-N", "--n-sites", type=int, dest="n_sites")
    p.add_argument("--alpha", action="append", dest="alphas", help="front slope (repeatable; accepts 1/32 or 2^-5)")
    p.add_argument("--T", action="append", dest="total_times", help="total protocol time (repeatable)")
    p.add_argument("--v", action="append", dest="velocities", help="front velocity (repeatable)")
    p.add_argument("--tau", action="append", dest="taus", help="quench time tau_Q (repeatable)")
    p.add_argument("--g-i", dest="g_i")
    p.add_argument("--g-f", dest="g_f")
    p.add_argument("--dt")
    p.add_argument("--realizations", type=int, dest="n_realizations")
    p.add_argument("--seed", type=int, dest="base_seed")
    p.add_argument("--out", dest="output")
    p.add_argument("--clean", action="store_const", const=True, default=None)
    p.add_argument("--fidelity", action="store_const", const=True, default=None, dest="with_fidelity")
    p.add_argument("--oracle-check", action="store_const", const=True, default=None, dest="oracle_check")
    p.add_argument("--no-homogeneous", action="store_const", const=False, default=None, dest="include_homogeneous")
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frontsweep", description="Inhomogeneous driving of disordered Ising chains")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        _add_common(sub.add_parser(name))
    rp = sub.add_parser("recipes", help="list ready-made configurations")
    rp.add_argument("name", nargs="?", help="print this recipe as YAML")
    return parser


_OVERRIDES = (
    "n_sites", "alphas", "total_times", "velocities", "taus", "g_i", "g_f", "dt", "n_realizations",
    "base_seed", "output", "clean", "with_fidelity", "oracle_check", "include_homogeneous", "workers",
)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data, lines = ({}, {}) if args.config is None else load_config(args.config)
    data = dict(data)
    if "experiment" in data and data["experiment"] != args.command:
        raise ConfigError(_at(lines, "experiment", f"config is for {data['experiment']!r}, command is {args.command!r}"))
    data["experiment"] = args.command
    for key in _OVERRIDES:
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
            lines.pop(key, None)
    cfg = RunConfig.from_dict(data, lines)
    return cfg.validate(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "recipes":
        recipes = recipe_table()
        if args.name:
            if args.name not in recipes:
                print(f"unknown recipe {args.name!r}", file=sys.stderr)
                return EXIT_CONFIG
            print(recipes[args.name].to_yaml(), end="")
        else:
            for name, cfg in recipes.items():
                print(f"{name:12s} {cfg.experiment:14s} N={cfg.n_sites} -> {cfg.output}")
        return EXIT_OK
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
