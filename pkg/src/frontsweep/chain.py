"""Low-lying modes of the open Ising chain from its bipartite structure.

The Majorana matrix only couples even to odd Majoranas, ``A[x, y] = K`` with the
lower-bidiagonal ``K[n, n] = -g_n / 2``, ``K[n+1, n] = J_n / 2``. Quasiparticle
energies are ``eps = 2 s`` for the singular values ``s`` of ``K``, which are the
non-negative eigenvalues of the zero-diagonal tridiagonal matrix
``[[0, K], [K^T, 0]]`` in interleaved order. Sturm-count bisection on that matrix
is accurate relative to each eigenvalue, so exponentially small gaps survive.

Mode ``k`` of the canonical frame is ``O0[2n, 2k] = x_k[n]``,
``O0[2n+1, 2k+1] = -y_k[n]`` with ``K y_k = s_k x_k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.linalg import eigh_tridiagonal

from .disorder import CouplingRealization

__all__ = ["LowModes", "low_modes", "low_singular_values", "pair_mixing", "vacuum_sign"]

# below this fraction of the largest matrix entry the lowest mode counts as a zero mode
_ZERO_MODE_REL = 1e-9


def _coeffs(couplings, fields):
    J = couplings.couplings if isinstance(couplings, CouplingRealization) else np.asarray(couplings, float)
    g = np.asarray(fields, dtype=float)
    if g.size < 2 or J.size != g.size - 1:
        raise ValueError(f"need N >= 2 fields and N-1 couplings, got {g.size} and {J.size}")
    return J, g


def _offdiag(J, g):
    e = np.empty(2 * g.size - 1)
    e[0::2] = -0.5 * g
    e[1::2] = 0.5 * J
    return e


# relative precision of the bisection used for gaps only
_SV_REL_TOL = 1e-14


@njit(cache=True)
def _count_below(e, x):
    """Number of singular values below ``x > 0``: Sturm count of the zero-diagonal matrix minus N."""
    tiny = 1e-300
    count = 0
    d = -x
    if d < 0.0:
        count += 1
    for i in range(e.size):
        if d == 0.0:
            d = -tiny
        d = -x - e[i] * e[i] / d
        if d < 0.0:
            count += 1
    return count - (e.size + 1) // 2


@njit(cache=True)
def _smallest_singular_values(e, count, rel_tol, first):
    """Bisection for the ``count`` smallest singular values, accurate relative to each value.

    Values below index ``first`` are known to vanish and are set to zero.
    """
    hi0 = 0.0
    for i in range(e.size):
        b = abs(e[i])
        if i + 1 < e.size:
            b += abs(e[i + 1])
        if b > hi0:
            hi0 = b
    out = np.zeros(count)
    for k in range(first, count):
        lo = 0.0
        hi = hi0 * (1.0 + 1e-12) + 1e-300
        while hi - lo > rel_tol * hi:
            if lo == 0.0:
                mid = 0.5 * hi
                if mid < 1e-300:
                    hi = 0.0
                    break
            else:
                mid = 0.5 * (lo + hi)
            if _count_below(e, mid) > k:
                hi = mid
            else:
                lo = mid
        out[k] = hi
    return out


def vacuum_sign(fields) -> int:
    """Parity of the Bogoliubov vacuum when no field vanishes: ``prod sign(g_n)``."""
    return -1 if np.count_nonzero(np.asarray(fields) < 0) % 2 else 1


def low_singular_values(couplings, fields, count: int = 2) -> np.ndarray:
    """The ``count`` smallest quasiparticle half-energies ``s_k = eps_k / 2``."""
    J, g = _coeffs(couplings, fields)
    # a site with zero field decouples one Majorana: an exact zero mode
    first = 1 if np.any(g == 0.0) else 0
    return _smallest_singular_values(_offdiag(J, g), count, _SV_REL_TOL, first)


@dataclass(frozen=True)
class LowModes:
    """Two lowest modes of the parity-fixed canonical frame.

    ``eps[0]`` is negative when the lowest quasiparticle had to be occupied to
    reach the target parity; ``y[0]`` already carries that sign flip.
    """

    eps: np.ndarray
    x: np.ndarray
    y: np.ndarray
    vacuum_parity: int
    target: int

    @property
    def gap(self) -> float:
        return float(2.0 * (self.eps[0] + self.eps[1]))


def _leading_direction(block: np.ndarray) -> np.ndarray:
    u, _, _ = np.linalg.svd(block, full_matrices=False)
    return u[:, 0]


def _K_dot(J, g, y):
    """``K @ y`` for the bidiagonal ``K``."""
    out = -0.5 * g * y
    out[1:] += 0.5 * J * y[:-1]
    return out


def low_modes(couplings, fields, target: int = 1) -> LowModes:
    """Lowest two modes with the vacuum forced into parity sector ``target``."""
    J, g = _coeffs(couplings, fields)
    N = g.size
    e = _offdiag(J, g)
    # vectors at default tolerance; the values themselves come from the relative-accuracy bisection
    _, Z = eigh_tridiagonal(np.zeros(2 * N), e, select="i", select_range=(N - 1, N + 1))
    s1, s2 = _smallest_singular_values(e, 2, _SV_REL_TOL, 1 if np.any(g == 0.0) else 0)
    scale = max(np.abs(g).max(), np.abs(J).max()) / 2

    # +-s1 eigenvectors may mix when s1 is tiny; their span still separates x1 from y1
    x1 = _leading_direction(Z[0::2, :2])
    y1 = _leading_direction(Z[1::2, :2])
    x2 = Z[0::2, 2] / np.linalg.norm(Z[0::2, 2])
    y2 = Z[1::2, 2] / np.linalg.norm(Z[1::2, 2])
    if x2 @ _K_dot(J, g, y2) < 0:
        y2 = -y2

    has_zero_field = bool(np.any(g == 0.0))
    if s1 > _ZERO_MODE_REL * scale and not has_zero_field:
        if x1 @ _K_dot(J, g, y1) < 0:
            y1 = -y1
        parity = vacuum_sign(g)
        eps1 = 2.0 * s1
        if parity != target:
            y1 = -y1
            eps1 = -eps1
    else:
        # relative sign of a (near) zero mode pair is fixed by demanding the target parity:
        # det(O0) = (-1)^N sign det(K + c x1 y1^T) for any c well above s1
        K = np.zeros((N, N))
        K[np.arange(N), np.arange(N)] = -0.5 * g
        K[np.arange(1, N), np.arange(N - 1)] = 0.5 * J
        sign, _ = np.linalg.slogdet(K + scale * np.outer(x1, y1))
        if (-1) ** N * sign != target:
            y1 = -y1
        if has_zero_field:
            parity = target
            eps1 = 0.0
        else:
            parity = vacuum_sign(g)
            eps1 = 2.0 * s1 if parity == target else -2.0 * s1
    return LowModes(
        eps=np.array([eps1, 2.0 * s2]),
        x=np.vstack([x1, x2]),
        y=np.vstack([y1, y2]),
        vacuum_parity=parity,
        target=target,
    )


def pair_mixing(modes: LowModes) -> np.ndarray:
    """Per-site ``<0| Z_n d_1^+ d_2^+ |0>`` (real in this frame)."""
    return modes.x[1] * modes.y[0] - modes.x[0] * modes.y[1]
