"""Side-by-side comparisons of the free-fermion results with the dense spin-space oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .drive import FrontProfile, Schedule, fields_at_time, kink_times
from .dynamics import evolve_quench, covariance_at
from .ed_oracle import MAX_SITES, ed_build, ed_evolve, ed_sector_eigh, sz_operator
from .majorana import assemble, canonical_diagonalize, fix_parity
from .observables import ground_state_fidelity, residual_energy
from .spectral import front_fields, front_gradients, probe_at

__all__ = ["Comparison", "compare_quench", "compare_statics", "ED_REFERENCE_STEP"]

# fixed step of the fourth-order Magnus reference; its own error is ~1e-12 for T ~ 50
ED_REFERENCE_STEP = 0.005


@dataclass(frozen=True)
class Comparison:
    quantity: str
    value: float
    reference: float

    @property
    def error(self) -> float:
        return abs(self.value - self.reference)


def compare_statics(couplings, profile: FrontProfile, n_f: float, target: int = 1) -> list[Comparison]:
    """Gap and mixing element from the chain solver against sector ED at one front position."""
    J = couplings.couplings if hasattr(couplings, "couplings") else np.asarray(couplings, float)
    N = J.size + 1
    if N > MAX_SITES:
        raise ValueError(f"oracle comparisons need N <= {MAX_SITES}")
    Delta, Omega = probe_at(J, profile, n_f, target)
    sys = ed_build(J, front_fields(N, profile, n_f))
    w, V = ed_sector_eigh(sys, target)
    diag_op = sz_operator(N, front_gradients(N, profile, n_f))
    omega_ed = abs(V[:, 0] @ (diag_op * V[:, 1]))
    return [Comparison("gap", Delta, w[1] - w[0]), Comparison("mixing", Omega, omega_ed)]


def compare_quench(
    couplings,
    schedule: Schedule,
    dt: float,
    reference_step: float = ED_REFERENCE_STEP,
) -> list[Comparison]:
    """Final residual energy and ground-state fidelity: Trotter frame vs Schrodinger evolution."""
    J = couplings.couplings if hasattr(couplings, "couplings") else np.asarray(couplings, float)
    N = J.size + 1
    if N > MAX_SITES:
        raise ValueError(f"oracle comparisons need N <= {MAX_SITES}")
    g0 = fields_at_time(schedule, N, schedule.t_start)
    g1 = fields_at_time(schedule, N, schedule.t_end)
    d0 = canonical_diagonalize(assemble(J, g0))
    target = d0.vacuum_parity
    state, _ = evolve_quench(J, schedule, dt, diag=fix_parity(d0, target))
    M = covariance_at(state)
    Q = residual_energy(M, J, g1, target)
    F = ground_state_fidelity(M, fix_parity(canonical_diagonalize(assemble(J, g1)), target))

    _, V0 = ed_sector_eigh(ed_build(J, g0), target)
    psi = ed_evolve(
        lambda t: ed_build(J, fields_at_time(schedule, N, t)).hamiltonian,
        V0[:, 0],
        schedule.t_start,
        schedule.t_end,
        breakpoints=kink_times(schedule, N),
        method="magnus4",
        dt_ref=reference_step,
        subspace=np.flatnonzero(ed_build(J, g0).parity_labels == target),
    )
    final = ed_build(J, g1)
    w, V = ed_sector_eigh(final, target)
    Q_ed = float(np.vdot(psi, final.hamiltonian @ psi).real - w[0])
    F_ed = float(abs(np.vdot(V[:, 0], psi)) ** 2)
    return [Comparison("residual_energy", Q, Q_ed), Comparison("fidelity", F, F_ed)]
