"""Heisenberg-picture evolution of the Majorana frame ``a(t) = O(t) b``.

``dO/dt = 4 A(t) O``. ``A`` splits into field and coupling parts whose
exponentials are disjoint planar rotations of row pairs: angle ``2 g_n dt`` on
rows ``(2n, 2n+1)`` and ``2 J_n dt`` on rows ``(2n+1, 2n+2)``. The integrator is
the fourth-order Suzuki composition of the symmetric J/2-g-J/2 step with the
fields evaluated at each substep midpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from numba import njit

from .disorder import CouplingRealization
from .drive import FrontProfile, Schedule, ScheduleMode, fields_at_time, kink_times
from .majorana import CanonicalDiag, assemble, canonical_blocks, covariance_energy

__all__ = [
    "DEFAULT_DT",
    "EvolutionState",
    "NumericalBlowupError",
    "SUZUKI_W0",
    "SUZUKI_W1",
    "Checkpoint",
    "covariance_at",
    "evolve_quench",
    "init_evolution",
    "orthogonality_drift",
    "step_plan",
    "substep_coupling",
    "substep_field",
    "trotter_step_4",
]

DEFAULT_DT = 0.02
SUZUKI_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
SUZUKI_W0 = 1.0 - 2.0 * SUZUKI_W1

_MODE_FRONT = 0
_MODE_UNIFORM = 1


class NumericalBlowupError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class EvolutionState:
    O: np.ndarray
    t: float
    step_count: int = 0

    @property
    def n_sites(self) -> int:
        return self.O.shape[0] // 2


@dataclass(frozen=True)
class Checkpoint:
    t: float
    energy: float
    orthogonality_drift: float
    parity: float


def orthogonality_drift(O: np.ndarray) -> float:
    """``max |O^T O - I|``."""
    return float(np.abs(O.T @ O - np.eye(O.shape[0])).max())


# --- compiled kernels -------------------------------------------------------


@njit(cache=True)
def _rotate_pairs(O, first_row, angles):
    """Rotate rows ``(r, r+1)``, ``r = first_row + 2k``, by ``angles[k]``."""
    ncol = O.shape[1]
    for k in range(angles.size):
        th = angles[k]
        if th == 0.0:
            continue
        c = math.cos(th)
        s = math.sin(th)
        r = first_row + 2 * k
        for j in range(ncol):
            x = O[r, j]
            y = O[r + 1, j]
            O[r, j] = c * x - s * y
            O[r + 1, j] = s * x + c * y


@njit(cache=True)
def _front_fields(t, mode, g_i, g_f, alpha, velocity, smoothing, t0, total, out):
    n_sites = out.size
    if mode == _MODE_UNIFORM:
        s = (t - t0) / total
        if s < 0.0:
            s = 0.0
        elif s > 1.0:
            s = 1.0
        val = g_i + (g_f - g_i) * s
        for n in range(n_sites):
            out[n] = val
        return
    hw = (g_i - g_f) / (2.0 * alpha)
    mid = 0.5 * (g_i + g_f)
    nf = velocity * t
    w = smoothing
    for n in range(n_sites):
        x = (n + 1) - nf
        g = mid + alpha * x
        if g < g_f:
            g = g_f
        elif g > g_i:
            g = g_i
        if w > 0.0:
            if abs(x - hw) < 0.5 * w:
                g = g_i - alpha * (hw + 0.5 * w - x) ** 2 / (2.0 * w)
            elif abs(x + hw) < 0.5 * w:
                g = g_f + alpha * (x + hw + 0.5 * w) ** 2 / (2.0 * w)
        out[n] = g


@njit(cache=True)
def _evolve_segments(O, J, seg_t0, seg_h, seg_n, mode, g_i, g_f, alpha, velocity, smoothing, t0, total, w0, w1):
    """Fourth-order steps over segments of equal-size steps; adjacent coupling halves merged."""
    N = J.size + 1
    g = np.empty(N)
    g_ang = np.empty(N)
    j_ang = np.empty(N - 1)
    ws = (w1, w0, w1)
    pending = 0.0
    for s in range(seg_t0.size):
        h = seg_h[s]
        for i in range(seg_n[s]):
            t = seg_t0[s] + i * h
            offset = 0.0
            for k in range(3):
                w = ws[k]
                pending += 0.5 * w * h
                for n in range(N - 1):
                    j_ang[n] = 2.0 * J[n] * pending
                _rotate_pairs(O, 1, j_ang)
                _front_fields(t + (offset + 0.5 * w) * h, mode, g_i, g_f, alpha, velocity, smoothing, t0, total, g)
                for n in range(N):
                    g_ang[n] = 2.0 * g[n] * w * h
                _rotate_pairs(O, 0, g_ang)
                pending = 0.5 * w * h
                offset += w
    for n in range(N - 1):
        j_ang[n] = 2.0 * J[n] * pending
    _rotate_pairs(O, 1, j_ang)


# --- public API -------------------------------------------------------------


def _couplings_array(couplings) -> np.ndarray:
    if isinstance(couplings, CouplingRealization):
        return np.ascontiguousarray(couplings.couplings, dtype=float)
    return np.ascontiguousarray(couplings, dtype=float)


def init_evolution(diag: CanonicalDiag, t_start: float = 0.0) -> EvolutionState:
    """Start from the vacuum of ``diag``: ``O = O0``."""
    return EvolutionState(np.array(diag.O0, dtype=float, order="C"), float(t_start), 0)


def substep_field(state: EvolutionState, fields, dt: float) -> EvolutionState:
    """Exact ``exp(4 A_g dt)``: rotation by ``2 g_n dt`` on rows ``(2n, 2n+1)``."""
    O = state.O.copy()
    _rotate_pairs(O, 0, 2.0 * np.asarray(fields, dtype=float) * dt)
    return replace(state, O=O)


def substep_coupling(state: EvolutionState, couplings, dt: float) -> EvolutionState:
    """Exact ``exp(4 A_J dt)``: rotation by ``2 J_n dt`` on rows ``(2n+1, 2n+2)``."""
    O = state.O.copy()
    _rotate_pairs(O, 1, 2.0 * _couplings_array(couplings) * dt)
    return replace(state, O=O)


def trotter_step_4(state: EvolutionState, hamiltonian_at: Callable[[float], tuple], dt: float) -> EvolutionState:
    """One fourth-order step of size ``dt``.

    ``hamiltonian_at(t)`` returns ``(couplings, fields)``; couplings are read at the
    midpoint of each half-substep as well, so time-dependent couplings are allowed.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    t = state.t
    s = replace(state)
    offset = 0.0
    for w in (SUZUKI_W1, SUZUKI_W0, SUZUKI_W1):
        h = w * dt
        Jq, _ = hamiltonian_at(t + (offset + 0.25 * w) * dt)
        s = substep_coupling(s, Jq, 0.5 * h)
        _, g = hamiltonian_at(t + (offset + 0.5 * w) * dt)
        s = substep_field(s, g, h)
        Jq, _ = hamiltonian_at(t + (offset + 0.75 * w) * dt)
        s = substep_coupling(s, Jq, 0.5 * h)
        offset += w
    return EvolutionState(s.O, t + dt, state.step_count + 1)


def step_plan(schedule: Schedule, n_sites: int, dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Segments ``(t0, h, n_steps)`` between consecutive kinks of the drive.

    Each segment is cut into the fewest equal steps no longer than ``dt``, so no
    step straddles a point where a site field has a corner.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    edges = np.concatenate([[schedule.t_start], kink_times(schedule, n_sites), [schedule.t_end]])
    lengths = np.diff(edges)
    keep = lengths > 1e-12 * max(schedule.total_time, 1.0)
    t0 = edges[:-1][keep]
    lengths = lengths[keep]
    n = np.maximum(np.ceil(lengths / dt - 1e-9), 1).astype(np.int64)
    return t0, lengths / n, n


def _mode_args(schedule: Schedule):
    if schedule.mode is ScheduleMode.HOMOGENEOUS:
        return (_MODE_UNIFORM, schedule.g_i, schedule.g_f, 1.0, 1.0, 0.0, schedule.t_start, schedule.total_time)
    p: FrontProfile = schedule.profile
    return (_MODE_FRONT, p.g_i, p.g_f, p.alpha, p.velocity, p.smoothing, schedule.t_start, schedule.total_time)


def _parity_of_cov(M: np.ndarray) -> float:
    from .observables import parity_expectation

    return parity_expectation(M)


def evolve_quench(
    couplings,
    schedule: Schedule,
    dt: float = DEFAULT_DT,
    diag: CanonicalDiag | None = None,
    n_checkpoints: int = 0,
) -> tuple[EvolutionState, list[Checkpoint]]:
    """Evolve the initial vacuum over the whole schedule.

    ``diag`` is the parity-fixed canonical form of the initial Hamiltonian; it is
    computed when omitted. With ``n_checkpoints > 0`` the instantaneous energy,
    orthogonality drift and parity are recorded at that many roughly evenly
    spaced segment boundaries (plus the start and the end).
    """
    J = _couplings_array(couplings)
    N = J.size + 1
    if diag is None:
        from .majorana import canonical_diagonalize, fix_parity

        g0 = fields_at_time(schedule, N, schedule.t_start)
        d0 = canonical_diagonalize(assemble(J, g0))
        diag = fix_parity(d0, d0.vacuum_parity)
    state = init_evolution(diag, schedule.t_start)
    O = state.O
    t0, h, n = step_plan(schedule, N, dt)
    args = _mode_args(schedule)

    checkpoints: list[Checkpoint] = []

    def record(t):
        if n_checkpoints > 0:
            M = covariance_at(EvolutionState(O, t))
            A = assemble(J, fields_at_time(schedule, N, t)).A
            checkpoints.append(Checkpoint(t, covariance_energy(A, M), orthogonality_drift(O), _parity_of_cov(M)))

    record(schedule.t_start)
    n_chunks = max(n_checkpoints, 1)
    cuts = np.unique(np.linspace(0, t0.size, n_chunks + 1).round().astype(int))
    for a, b in zip(cuts[:-1], cuts[1:]):
        _evolve_segments(O, J, t0[a:b], h[a:b], n[a:b], *args, SUZUKI_W0, SUZUKI_W1)
        if not np.all(np.isfinite(O)):
            raise NumericalBlowupError(f"non-finite frame entries before t = {t0[b - 1] + h[b - 1] * n[b - 1]}")
        if b < t0.size:
            record(float(t0[b]))
    record(schedule.t_end)
    return EvolutionState(O, schedule.t_end, int(n.sum())), checkpoints


def covariance_at(state: EvolutionState, diag: CanonicalDiag | None = None) -> np.ndarray:
    """Real antisymmetric ``M(t) = O(t) Lambda O(t)^T``; ``<a_m a_n> = delta_mn + i M_mn``.

    ``diag`` only fixes the size check; the initial state is always the vacuum of
    the frame ``O(t_start)``.
    """
    O = state.O
    if diag is not None and diag.O0.shape != O.shape:
        raise ValueError("state and canonical form have different sizes")
    Lam = canonical_blocks(2.0 * np.ones(O.shape[0] // 2))
    return O @ Lam @ O.T
