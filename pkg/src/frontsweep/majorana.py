"""Quadratic Majorana form of the Ising chain and its canonical Bogoliubov form.

Conventions (0-based site ``n``, Majoranas ``a_{2n}, a_{2n+1}``)::

    a_{2n}   = (prod_{m<n} Z_m) X_n
    a_{2n+1} = -(prod_{m<n} Z_m) Y_n
    Z_n          = i a_{2n} a_{2n+1}
    X_n X_{n+1}  = i a_{2n+1} a_{2n+2}

The Hamiltonian is ``a^T (iA) a`` with ``A`` real antisymmetric, so
``A[2n, 2n+1] = -g_n / 2`` and ``A[2n+1, 2n+2] = -J_n / 2``. The canonical form
``O0^T A O0 = (+) [[0, -eps_k/2], [eps_k/2, 0]]`` gives
``H = sum_k eps_k (2 d_k^+ d_k - 1)`` with ``d_k = (b_{2k} - i b_{2k+1}) / 2`` and
``a = O0 b``. The Bogoliubov vacuum has parity ``det(O0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla

from .disorder import CouplingRealization

__all__ = [
    "CanonicalDiag",
    "DiagonalizationError",
    "QuadraticHamiltonian",
    "ShapeError",
    "assemble",
    "canonical_blocks",
    "canonical_diagonalize",
    "covariance_energy",
    "fix_parity",
    "ground_energy",
    "majorana_covariance",
    "vacuum_covariance",
    "vacuum_parity",
]


class ShapeError(ValueError):
    pass


class DiagonalizationError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def _as_couplings(couplings) -> np.ndarray:
    if isinstance(couplings, CouplingRealization):
        return couplings.couplings
    return np.asarray(couplings, dtype=float).reshape(-1)


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    n_sites: int
    A_J: np.ndarray
    A_g: np.ndarray

    @property
    def A(self) -> np.ndarray:
        return self.A_J + self.A_g


def assemble(couplings, fields) -> QuadraticHamiltonian:
    """Majorana matrices of the open chain with couplings ``J`` (length N-1) and fields ``g`` (length N)."""
    J = _as_couplings(couplings)
    g = np.asarray(fields, dtype=float).reshape(-1)
    N = g.size
    if N < 1 or J.size != N - 1:
        raise ShapeError(f"need N-1 couplings for N fields, got {J.size} couplings and {N} fields")
    A_g = np.zeros((2 * N, 2 * N))
    A_J = np.zeros((2 * N, 2 * N))
    idx = np.arange(N)
    A_g[2 * idx, 2 * idx + 1] = -0.5 * g
    A_g[2 * idx + 1, 2 * idx] = 0.5 * g
    idx = idx[:-1]
    A_J[2 * idx + 1, 2 * idx + 2] = -0.5 * J
    A_J[2 * idx + 2, 2 * idx + 1] = 0.5 * J
    return QuadraticHamiltonian(N, A_J, A_g)


@dataclass(frozen=True, eq=False)
class CanonicalDiag:
    """Canonical form ``a = O0 b``.

    ``eps`` is ascending and non-negative unless the parity was fixed, in which
    case ``eps[0]`` carries the sign of the flipped mode.
    """

    O0: np.ndarray
    eps: np.ndarray
    vacuum_parity: int
    parity_fixed: bool = False

    @property
    def n_sites(self) -> int:
        return self.eps.size


def canonical_blocks(eps) -> np.ndarray:
    """Block-diagonal ``(+) [[0, -e/2], [e/2, 0]]``."""
    eps = np.asarray(eps, dtype=float)
    N = eps.size
    B = np.zeros((2 * N, 2 * N))
    k = np.arange(N)
    B[2 * k, 2 * k + 1] = -0.5 * eps
    B[2 * k + 1, 2 * k] = 0.5 * eps
    return B


def _parity_of(O: np.ndarray) -> int:
    sign, _ = np.linalg.slogdet(O)
    return 1 if sign > 0 else -1


def canonical_diagonalize(H: QuadraticHamiltonian | np.ndarray, zero_tol: float = 1e-12) -> CanonicalDiag:
    """Orthogonal ``O0`` bringing ``A`` to canonical 2x2 blocks, energies ascending.

    Uses the real Schur form: for a normal (here antisymmetric) matrix it is block
    diagonal, with 2x2 blocks for ``+-i eps/2`` and 1x1 zero blocks that are paired
    up. Degenerate subspaces, including ``eps = 0``, come out orthonormal directly.
    """
    A = H.A if isinstance(H, QuadraticHamiltonian) else np.asarray(H, dtype=float)
    n2 = A.shape[0]
    if A.shape != (n2, n2) or n2 % 2:
        raise ShapeError(f"need an even square matrix, got {A.shape}")
    T, Z = sla.schur(A, output="real")
    scale = max(np.abs(A).max(), 1e-300)

    pairs: list[tuple[int, int]] = []
    singles: list[int] = []
    i = 0
    while i < n2:
        if i + 1 < n2 and abs(T[i + 1, i]) > 0.0:
            pairs.append((i, i + 1))
            i += 2
        else:
            singles.append(i)
            i += 1
    if len(singles) % 2:
        raise DiagonalizationError("odd number of real eigenvalues in an antisymmetric matrix", float(len(singles)))
    pairs.extend(zip(singles[0::2], singles[1::2]))

    cols = []
    half_eps = []
    for p, q in pairs:
        u, w = Z[:, p], Z[:, q]
        h = 0.5 * (w @ A @ u - u @ A @ w)
        if h < 0:
            w = -w
            h = -h
        cols.append((u, w))
        half_eps.append(h)
    half_eps = np.asarray(half_eps)
    half_eps[half_eps < zero_tol * max(half_eps.max(initial=0.0), 1e-300)] = 0.0
    order = np.argsort(half_eps, kind="stable")

    O0 = np.empty_like(A)
    for k, j in enumerate(order):
        O0[:, 2 * k], O0[:, 2 * k + 1] = cols[j]
    eps = 2.0 * half_eps[order]

    resid = np.abs(O0.T @ A @ O0 - canonical_blocks(eps)).max()
    if resid > 1e-10 * max(scale, 1.0):
        raise DiagonalizationError("canonical form did not converge", resid)
    return CanonicalDiag(O0, eps, _parity_of(O0))


def vacuum_parity(diag: CanonicalDiag) -> int:
    """Parity ``prod Z_n`` of the Bogoliubov vacuum, equal to ``det(O0)``."""
    return _parity_of(diag.O0)


def fix_parity(diag: CanonicalDiag, target: int = 1) -> CanonicalDiag:
    """Return the canonical form whose vacuum lies in the ``target`` parity sector.

    If the vacuum has the wrong parity the lowest quasiparticle is excited:
    ``b_1 -> -b_1`` (column 1 of ``O0``) and ``eps_0 -> -eps_0``.
    """
    if target not in (1, -1):
        raise ValueError("target parity must be +1 or -1")
    if diag.vacuum_parity == target:
        return diag if diag.parity_fixed else replace(diag, parity_fixed=True)
    O0 = diag.O0.copy()
    O0[:, 1] *= -1.0
    eps = diag.eps.copy()
    eps[0] = -eps[0]
    return CanonicalDiag(O0, eps, target, True)


def ground_energy(diag: CanonicalDiag) -> float:
    return float(-np.sum(diag.eps))


def majorana_covariance(diag: CanonicalDiag) -> np.ndarray:
    """Real antisymmetric ``M`` with ``<a_m a_n> = delta_mn + i M_mn`` in the vacuum."""
    Lam = canonical_blocks(2.0 * np.ones(diag.n_sites))
    return diag.O0 @ Lam @ diag.O0.T


def vacuum_covariance(diag: CanonicalDiag) -> np.ndarray:
    """Complex two-point matrix ``Gamma[m, n] = <a_m a_n>`` of the vacuum."""
    M = majorana_covariance(diag)
    return np.eye(M.shape[0]) + 1j * M


def covariance_energy(A: np.ndarray, M: np.ndarray) -> float:
    """``<a^T (iA) a>`` for a state with real covariance ``M``."""
    return float(np.einsum("ij,ji->", A, M))
