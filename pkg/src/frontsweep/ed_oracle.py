"""Brute-force spin-space reference for small chains (N <= 12).

Independent of the fermionic machinery: the Hamiltonian is built directly from
Pauli strings on the 2**N computational basis, with site 0 the most significant
bit and bit value 0 meaning Z = +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .disorder import CouplingRealization

__all__ = [
    "DenseSpinSystem",
    "MAX_SITES",
    "ed_build",
    "ed_evolve",
    "ed_expectation",
    "ed_majoranas",
    "ed_matrix_element",
    "ed_overlap",
    "ed_sector_eigh",
    "ed_sector_spectrum",
    "sz_operator",
]

MAX_SITES = 12


@dataclass(frozen=True, eq=False)
class DenseSpinSystem:
    n_sites: int
    hamiltonian: np.ndarray
    parity_labels: np.ndarray


def _bits(N: int) -> np.ndarray:
    states = np.arange(2**N)
    return (states[:, None] >> (N - 1 - np.arange(N))[None, :]) & 1


def _check_size(N: int):
    if N > MAX_SITES:
        raise ValueError(f"ED oracle is limited to N <= {MAX_SITES}, got {N}")


def ed_build(couplings, fields) -> DenseSpinSystem:
    """Dense ``-sum J_n X_n X_{n+1} - sum g_n Z_n``."""
    J = couplings.couplings if isinstance(couplings, CouplingRealization) else np.asarray(couplings, float)
    g = np.asarray(fields, dtype=float)
    N = g.size
    _check_size(N)
    if J.size != N - 1:
        raise ValueError("need N-1 couplings")
    bits = _bits(N)
    z = 1 - 2 * bits
    dim = 2**N
    H = np.zeros((dim, dim))
    H[np.diag_indices(dim)] = -(z @ g)
    states = np.arange(dim)
    for n in range(N - 1):
        mask = (1 << (N - 1 - n)) | (1 << (N - 2 - n))
        H[states ^ mask, states] -= J[n]
    parity = np.prod(z, axis=1)
    return DenseSpinSystem(N, H, parity)


def sz_operator(N: int, coeffs) -> np.ndarray:
    """Diagonal of ``sum_n c_n Z_n``."""
    z = 1 - 2 * _bits(N)
    return z @ np.asarray(coeffs, dtype=float)


def ed_sector_eigh(sys: DenseSpinSystem, parity: int):
    """Eigenpairs of the ``parity`` sector, embedded back into the full space."""
    idx = np.flatnonzero(sys.parity_labels == parity)
    w, v = np.linalg.eigh(sys.hamiltonian[np.ix_(idx, idx)])
    vecs = np.zeros((sys.hamiltonian.shape[0], idx.size))
    vecs[idx] = v
    return w, vecs


def ed_sector_spectrum(sys: DenseSpinSystem, parity: int) -> np.ndarray:
    return ed_sector_eigh(sys, parity)[0]


def ed_matrix_element(sys: DenseSpinSystem, coeffs, bra_index: int, ket_index: int, parity: int) -> float:
    """``<E_bra| sum c_n Z_n |E_ket>`` between sector eigenstates (sorted by energy)."""
    _, vecs = ed_sector_eigh(sys, parity)
    diag = sz_operator(sys.n_sites, coeffs)
    return float(vecs[:, bra_index] @ (diag * vecs[:, ket_index]))


def ed_majoranas(N: int) -> list[np.ndarray]:
    """Dense Jordan-Wigner Majoranas ``a_{2n} = (prod Z) X_n``, ``a_{2n+1} = -(prod Z) Y_n``."""
    _check_size(N)
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]])
    Zm = np.diag([1.0, -1.0]).astype(complex)
    I2 = np.eye(2, dtype=complex)
    out = []
    for n in range(N):
        for op, sign in ((X, 1.0), (Y, -1.0)):
            mats = [Zm] * n + [op] + [I2] * (N - n - 1)
            full = mats[0]
            for m in mats[1:]:
                full = np.kron(full, m)
            out.append(sign * full)
    return out


def ed_expectation(op: np.ndarray, psi: np.ndarray) -> complex:
    return complex(np.vdot(psi, op @ psi))


def ed_overlap(v1: np.ndarray, v2: np.ndarray) -> float:
    """``|<v1|v2>|^2`` of normalized vectors."""
    n1 = np.linalg.norm(v1)
    n2 = np.linalg.norm(v2)
    return float(abs(np.vdot(v1, v2)) ** 2 / (n1 * n2) ** 2)


_GAUSS_OFFSET = np.sqrt(3.0) / 6.0


def _magnus4_segment(hamiltonian_at, psi, a, b, dt_ref):
    n = max(int(np.ceil((b - a) / dt_ref - 1e-9)), 1)
    h = (b - a) / n
    for i in range(n):
        t = a + i * h
        H1 = hamiltonian_at(t + (0.5 - _GAUSS_OFFSET) * h)
        H2 = hamiltonian_at(t + (0.5 + _GAUSS_OFFSET) * h)
        # exp(-i K) with the Hermitian K = h (H1 + H2) / 2 - i sqrt(3) h^2 [H2, H1] / 12
        K = 0.5 * h * (H1 + H2) - 1j * (np.sqrt(3.0) / 12.0) * h * h * (H2 @ H1 - H1 @ H2)
        w, V = np.linalg.eigh(K)
        psi = V @ (np.exp(-1j * w) * (V.conj().T @ psi))
    return psi


def ed_evolve(
    hamiltonian_at: Callable[[float], np.ndarray],
    psi0: np.ndarray,
    t_start: float,
    t_end: float,
    breakpoints: Sequence[float] = (),
    rtol: float = 1e-12,
    atol: float = 1e-12,
    method: str = "DOP853",
    dt_ref: float | None = None,
    subspace: np.ndarray | None = None,
) -> np.ndarray:
    """Integrate ``i d psi/dt = H(t) psi``.

    ``method`` is a ``solve_ivp`` Runge-Kutta name (adaptive, tolerances
    ``rtol``/``atol``, optional ``dt_ref`` as maximal step) or ``"magnus4"``: the
    fourth-order Magnus propagator with two Gauss points and fixed step
    ``dt_ref``, which stays accurate below the adaptive schemes' round-off floor.
    Integration restarts at every breakpoint so kinks of ``H(t)`` never fall
    inside a step.

    ``subspace`` (basis indices of a block left invariant by every ``H(t)``, such
    as a parity sector) restricts the integration to that block; ``psi0`` must
    vanish outside it.
    """
    psi = np.asarray(psi0, dtype=complex).copy()
    if subspace is not None:
        idx = np.asarray(subspace)
        full = hamiltonian_at
        out = np.zeros_like(psi)
        out[idx] = ed_evolve(
            lambda t: full(t)[np.ix_(idx, idx)], psi[idx], t_start, t_end, breakpoints, rtol, atol, method, dt_ref
        )
        return out
    cuts = [t for t in sorted(breakpoints) if t_start < t < t_end]
    edges = [t_start, *cuts, t_end]
    if method == "magnus4":
        if dt_ref is None or not dt_ref > 0:
            raise ValueError("magnus4 needs a positive dt_ref")
        for a, b in zip(edges[:-1], edges[1:]):
            if b > a:
                psi = _magnus4_segment(hamiltonian_at, psi, a, b, dt_ref)
        return psi

    def rhs(t, y):
        return -1j * (hamiltonian_at(t) @ y)

    kw = {} if dt_ref is None else {"max_step": dt_ref}
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        sol = solve_ivp(rhs, (a, b), psi, method=method, rtol=rtol, atol=atol, **kw)
        if not sol.success:
            raise RuntimeError(f"reference integration failed: {sol.message}")
        psi = sol.y[:, -1]
    return psi
