"""Final-state observables from the real Majorana covariance ``M``.

``<a_m a_n> = delta_mn + i M_mn``; in particular ``<Z_n> = -M[2n, 2n+1]`` and
``<X_n X_{n+1}> = -M[2n+1, 2n+2]``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .disorder import CouplingRealization
from .drive import Schedule, fields_at_time
from .dynamics import DEFAULT_DT, covariance_at, evolve_quench, orthogonality_drift
from .majorana import (
    CanonicalDiag,
    assemble,
    canonical_diagonalize,
    covariance_energy,
    fix_parity,
    ground_energy,
    majorana_covariance,
)

__all__ = [
    "QuenchResult",
    "ground_state_fidelity",
    "kink_density",
    "parity_expectation",
    "pfaffian",
    "residual_energy",
    "run_quench",
]

_SINGULAR_OVERLAP = 1e-12


def _J(couplings) -> np.ndarray:
    if isinstance(couplings, CouplingRealization):
        return couplings.couplings
    return np.asarray(couplings, dtype=float)


def pfaffian(A: np.ndarray) -> float:
    """Pfaffian of a real antisymmetric matrix by Parlett-Reid elimination with pivoting."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("pfaffian needs a square matrix")
    if n % 2:
        return 0.0
    pf = 1.0
    for k in range(0, n - 1, 2):
        p = k + 1 + int(np.argmax(np.abs(A[k + 1 :, k])))
        if p != k + 1:
            A[[k + 1, p], :] = A[[p, k + 1], :]
            A[:, [k + 1, p]] = A[:, [p, k + 1]]
            pf = -pf
        piv = A[k + 1, k]
        if piv == 0.0:
            return 0.0
        pf *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2 :] / A[k, k + 1]
            col = A[k + 2 :, k + 1].copy()
            A[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return float(pf)


def parity_expectation(M: np.ndarray) -> float:
    """``<prod_n Z_n> = (-1)^N Pf(M)``."""
    N = M.shape[0] // 2
    return (-1) ** N * pfaffian(M)


def residual_energy(M: np.ndarray, couplings, g_f: float | np.ndarray = 0.0, target: int = 1) -> float:
    """``<H_final> - E_gs`` in the parity sector ``target``.

    At ``g_f = 0`` this is ``sum J_n (1 + M[2n+1, 2n+2])``; otherwise the field term
    is included and ``E_gs`` comes from the canonical form of the final Hamiltonian.
    """
    J = _J(couplings)
    N = J.size + 1
    g = np.broadcast_to(np.asarray(g_f, dtype=float), (N,))
    idx = np.arange(N - 1)
    if not np.any(g):
        return float(np.sum(J * (1.0 + M[2 * idx + 1, 2 * idx + 2])))
    H = assemble(J, g)
    e_gs = ground_energy(fix_parity(canonical_diagonalize(H), target))
    return covariance_energy(H.A, M) - e_gs


def kink_density(M: np.ndarray, couplings=None) -> float:
    """Fraction of anti-aligned bonds, ``(1/(N-1)) sum (1 - <X_n X_{n+1}>) / 2``."""
    N = M.shape[0] // 2
    if N < 2:
        raise ValueError("kink density needs at least two sites")
    idx = np.arange(N - 1)
    xx = -M[2 * idx + 1, 2 * idx + 2]
    return float(np.mean(0.5 * (1.0 - xx)))


def ground_state_fidelity(M: np.ndarray, final_diag: CanonicalDiag, with_flag: bool = False):
    """``|<gs_final|psi>|^2 = |Pf((M + M_gs) / 2)|`` for two pure Gaussian states.

    ``final_diag`` must already be parity-fixed to the sector of ``psi``. Returns 0
    (and ``True`` as flag) when the overlap matrix is numerically singular.
    """
    M_gs = majorana_covariance(final_diag)
    sign, logdet = np.linalg.slogdet(0.5 * (M + M_gs))
    f = 0.0 if sign == 0 else math.exp(0.5 * logdet)
    singular = f < _SINGULAR_OVERLAP
    if singular:
        f = 0.0
    f = min(f, 1.0)
    return (f, singular) if with_flag else f


@dataclass(frozen=True)
class QuenchResult:
    residual_energy: float
    kink_density: float
    fidelity: float | None
    parity_drift: float
    orthogonality_drift: float
    alpha: float | None
    velocity: float | None
    total_time: float
    n_sites: int
    seed: int | None
    dt: float
    mode: str

    def to_record(self) -> dict:
        return asdict(self)


def run_quench(
    couplings,
    schedule: Schedule,
    dt: float = DEFAULT_DT,
    with_fidelity: bool = False,
    seed: int | None = None,
) -> QuenchResult:
    """Prepare the initial ground state, evolve, and measure the final state."""
    J = _J(couplings)
    N = J.size + 1
    if seed is None and isinstance(couplings, CouplingRealization):
        seed = couplings.seed
    d0 = canonical_diagonalize(assemble(J, fields_at_time(schedule, N, schedule.t_start)))
    target = d0.vacuum_parity
    d0 = fix_parity(d0, target)
    state, _ = evolve_quench(J, schedule, dt, diag=d0)
    M = covariance_at(state)
    g_end = fields_at_time(schedule, N, schedule.t_end)
    Q = residual_energy(M, J, g_end, target)
    fid = None
    if with_fidelity:
        d_f = fix_parity(canonical_diagonalize(assemble(J, g_end)), target)
        fid = ground_state_fidelity(M, d_f)
    parity = parity_expectation(M)
    p = schedule.profile
    return QuenchResult(
        residual_energy=float(Q),
        kink_density=kink_density(M) if not np.any(g_end) else math.nan,
        fidelity=fid,
        parity_drift=abs(parity - target),
        orthogonality_drift=orthogonality_drift(state.O),
        alpha=None if p is None else p.alpha,
        velocity=None if p is None else p.velocity,
        total_time=schedule.total_time,
        n_sites=N,
        seed=seed,
        dt=dt,
        mode=schedule.mode.value,
    )
