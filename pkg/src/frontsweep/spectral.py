"""Instantaneous gap, mixing element and local threshold velocity along a sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import low_modes, low_singular_values, pair_mixing, vacuum_sign
from .disorder import CouplingRealization, critical_field
from .drive import FrontProfile, field_at, field_gradient_at
from .majorana import assemble, canonical_diagonalize, fix_parity

__all__ = [
    "BULK_MARGIN",
    "DomainError",
    "OMEGA_FLOOR",
    "SpectralTrajectory",
    "bulk_window",
    "front_fields",
    "front_gradients",
    "gap_at",
    "gap_from_canonical",
    "local_threshold",
    "mixing_at",
    "mixing_from_canonical",
    "probe_at",
    "scan_gaps",
    "scan_positions",
    "scan_trajectory",
]

BULK_MARGIN = 4
OMEGA_FLOOR = 1e-14
POSITIONS_PER_SITE = 4


class DomainError(ValueError):
    pass


def _n_sites(couplings) -> int:
    if isinstance(couplings, CouplingRealization):
        return couplings.n_sites
    return np.asarray(couplings).size + 1


def front_fields(n_sites: int, profile: FrontProfile, n_f: float) -> np.ndarray:
    return field_at(profile, np.arange(1, n_sites + 1), n_f)


def front_gradients(n_sites: int, profile: FrontProfile, n_f: float) -> np.ndarray:
    return field_gradient_at(profile, np.arange(1, n_sites + 1), n_f)


def _gap_from_fields(couplings, g, target):
    eps1, eps2 = 2.0 * low_singular_values(couplings, g, 2)
    if eps1 == 0.0 or vacuum_sign(g) == target:
        return 2.0 * (eps1 + eps2)
    return 2.0 * (eps2 - eps1)


def gap_at(couplings, profile: FrontProfile, n_f: float, target: int = 1) -> float:
    """Same-parity gap ``2 (eps_1 + eps_2)`` with the front centred at ``n_f``."""
    N = _n_sites(couplings)
    if N < 2:
        raise DomainError("the two-quasiparticle gap needs N >= 2")
    return _gap_from_fields(couplings, front_fields(N, profile, n_f), target)


def probe_at(couplings, profile: FrontProfile, n_f: float, target: int = 1) -> tuple[float, float]:
    """``(Delta, Omega)`` at one front position, sharing a single mode computation."""
    N = _n_sites(couplings)
    g = front_fields(N, profile, n_f)
    dg = front_gradients(N, profile, n_f)
    if not np.any(dg):
        return _gap_from_fields(couplings, g, target), 0.0
    modes = low_modes(couplings, g, target)
    return modes.gap, float(abs(dg @ pair_mixing(modes)))


def mixing_at(couplings, profile: FrontProfile, n_f: float, target: int = 1) -> float:
    """``|<0| sum_n g'_n Z_n |1>|`` with ``|1> = d_1^+ d_2^+ |0>`` in the target sector."""
    return probe_at(couplings, profile, n_f, target)[1]


def gap_from_canonical(couplings, fields, target: int = 1) -> float:
    """Dense route: same-parity gap from the full canonical form."""
    diag = fix_parity(canonical_diagonalize(assemble(couplings, fields)), target)
    return float(2.0 * (diag.eps[0] + diag.eps[1]))


def mixing_from_canonical(couplings, fields, gradients, target: int = 1) -> float:
    """Dense route: Wick contraction of ``Z_n d_1^+ d_2^+`` through the full ``O0``."""
    diag = fix_parity(canonical_diagonalize(assemble(couplings, fields)), target)
    O = diag.O0
    # coefficient of d_k in a_p
    alpha0 = O[:, 0] + 1j * O[:, 1]
    alpha1 = O[:, 2] + 1j * O[:, 3]
    p, q = slice(0, None, 2), slice(1, None, 2)
    per_site = 1j * (alpha1[p] * alpha0[q] - alpha0[p] * alpha1[q])
    return float(abs(np.asarray(gradients) @ per_site))


def local_threshold(Delta: float, Omega: float) -> float:
    """``Delta^2 / (4 Omega)``; ``inf`` when the mixing vanishes."""
    if not Delta > 0:
        raise DomainError(f"threshold velocity needs a positive gap, got {Delta}")
    if Omega < OMEGA_FLOOR:
        return math.inf
    return Delta * Delta / (4.0 * Omega)


def bulk_window(
    n_sites: int,
    profile: FrontProfile,
    margin: float = BULK_MARGIN,
    rule: str = "auto",
    g_c: float | None = None,
) -> tuple[float, float]:
    """Front positions treated as "inside the chain".

    ``ramp``: the whole ramp plus ``margin`` sites fits in the chain.
    ``critical``: the site where the field crosses ``g_c`` stays at least
    ``max(margin, alpha**(-2/3))`` sites from both ends; usable when the ramp is
    wider than the chain.
    ``auto``: ``ramp`` unless that window is empty.
    An empty window is returned as ``(lo, hi)`` with ``lo > hi``.
    """
    hw = profile.half_width
    if rule not in ("auto", "ramp", "critical"):
        raise ValueError(f"unknown bulk rule {rule!r}")
    lo, hi = hw + margin, n_sites - hw - margin
    if rule == "ramp" or (rule == "auto" and lo <= hi):
        return lo, hi
    if g_c is None:
        g_c = 1.0
    shift = (profile.midpoint - g_c) / profile.alpha
    m = max(margin, profile.alpha ** (-2.0 / 3.0))
    return 1 + m + shift, n_sites - m + shift


def _window_g_c(couplings) -> float:
    if isinstance(couplings, CouplingRealization):
        return critical_field(couplings.kind)
    J = np.asarray(couplings, dtype=float)
    return float(np.exp(np.mean(np.log(J))))


def scan_positions(n_sites: int, profile: FrontProfile, n_grid: int | None = None) -> np.ndarray:
    hw = profile.half_width
    if n_grid is None:
        n_grid = int(round(POSITIONS_PER_SITE * (n_sites + 2 * hw))) + 1
    if n_grid < 10:
        raise ValueError("a trajectory scan needs at least 10 front positions")
    return np.linspace(-hw, n_sites + hw, n_grid)


@dataclass(frozen=True, eq=False)
class SpectralTrajectory:
    front_positions: np.ndarray
    Delta: np.ndarray
    Omega: np.ndarray
    v_t_local: np.ndarray
    bulk_window: tuple[float, float]
    Delta_min: float
    Omega_max: float
    v_t_min: float

    @property
    def in_bulk(self) -> np.ndarray:
        lo, hi = self.bulk_window
        return (self.front_positions >= lo) & (self.front_positions <= hi)

    def rows(self, seed: int, alpha: float):
        """CSV rows ``(realization_seed, alpha, n_f, Delta, Omega, v_t_local)``."""
        for nf, d, o, v in zip(self.front_positions, self.Delta, self.Omega, self.v_t_local):
            yield (seed, alpha, float(nf), float(d), float(o), float(v))


def scan_trajectory(
    couplings,
    profile: FrontProfile,
    n_grid: int | None = None,
    margin: float = BULK_MARGIN,
    rule: str = "auto",
    target: int = 1,
    bulk_only: bool = False,
) -> SpectralTrajectory:
    """Gap, mixing and local threshold on an equidistant grid of front positions.

    With ``bulk_only`` the grid is restricted to the bulk window (same spacing),
    which is all the summary statistics use.
    """
    N = _n_sites(couplings)
    window = bulk_window(N, profile, margin, rule, _window_g_c(couplings))
    pos = scan_positions(N, profile, n_grid)
    if bulk_only:
        pos = pos[(pos >= window[0]) & (pos <= window[1])]
    Delta = np.empty(pos.size)
    Omega = np.empty(pos.size)
    for i, nf in enumerate(pos):
        Delta[i], Omega[i] = probe_at(couplings, profile, nf, target)
    v_t = np.array([local_threshold(d, o) for d, o in zip(Delta, Omega)])
    inside = (pos >= window[0]) & (pos <= window[1])
    if inside.any():
        d_min = float(Delta[inside].min())
        o_max = float(Omega[inside].max())
        v_min = float(v_t[inside].min())
    else:
        d_min = o_max = v_min = math.nan
    return SpectralTrajectory(pos, Delta, Omega, v_t, window, d_min, o_max, v_min)


def scan_gaps(couplings, profile: FrontProfile, positions, target: int = 1) -> np.ndarray:
    """Gaps only (no eigenvectors) at the given front positions."""
    N = _n_sites(couplings)
    return np.array([_gap_from_fields(couplings, front_fields(N, profile, nf), target) for nf in positions])
