"""Quenched-disorder realizations of the nearest-neighbour Ising couplings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "CouplingKind",
    "CouplingRealization",
    "InvalidSizeError",
    "critical_field",
    "realization_seed",
    "sample_couplings",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

J_LOW = 0.5
J_HIGH = 1.5


class InvalidSizeError(ValueError):
    """Raised when a chain is too short for the requested operation."""


class CouplingKind(str, Enum):
    DISORDERED = "disordered"
    CLEAN = "clean"

    @classmethod
    def parse(cls, value: "CouplingKind | str") -> "CouplingKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown coupling kind {value!r}; expected 'disordered' or 'clean'") from None


@dataclass(frozen=True, eq=False)
class CouplingRealization:
    """One draw of the couplings ``J_1 .. J_{N-1}`` (units of the overall scale)."""

    n_sites: int
    couplings: np.ndarray
    seed: int
    kind: CouplingKind

    def __post_init__(self):
        c = np.asarray(self.couplings, dtype=float)
        if c.shape != (self.n_sites - 1,):
            raise InvalidSizeError(f"expected {self.n_sites - 1} couplings, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "couplings", c)

    def __eq__(self, other):
        if not isinstance(other, CouplingRealization):
            return NotImplemented
        return (
            self.n_sites == other.n_sites
            and self.seed == other.seed
            and self.kind == other.kind
            and np.array_equal(self.couplings, other.couplings)
        )

    def to_record(self) -> dict:
        return {
            "seed": int(self.seed),
            "N": int(self.n_sites),
            "kind": self.kind.value,
            "couplings": [float(x) for x in self.couplings],
        }

    @classmethod
    def from_record(cls, record: dict) -> "CouplingRealization":
        return cls(
            n_sites=int(record["N"]),
            couplings=np.asarray(record["couplings"], dtype=float),
            seed=int(record["seed"]),
            kind=CouplingKind.parse(record["kind"]),
        )

    def reversed(self) -> "CouplingRealization":
        """Mirror image ``n -> N + 1 - n`` of the chain."""
        return CouplingRealization(self.n_sites, self.couplings[::-1].copy(), self.seed, self.kind)


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def realization_seed(base_seed: int, index: int) -> int:
    """Seed of realization ``index`` in an ensemble started from ``base_seed``.

    ``base + index * golden`` is injective in ``index`` modulo 2**64 and the
    splitmix64 finalizer is a bijection, so distinct indices never collide.
    """
    if index < 0:
        raise ValueError("realization index must be non-negative")
    return _splitmix64((int(base_seed) + int(index) * _GOLDEN) & _MASK64)


def _generator(seed: int) -> np.random.Generator:
    # Philox is counter based: the stream depends only on the key, not on call order elsewhere.
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))


def sample_couplings(n_sites: int, seed: int, kind: CouplingKind | str = CouplingKind.DISORDERED) -> CouplingRealization:
    """Draw couplings uniformly from the open interval (1/2, 3/2), or all ones for a clean chain."""
    kind = CouplingKind.parse(kind)
    if n_sites < 2:
        raise InvalidSizeError(f"a chain needs at least 2 sites, got {n_sites}")
    if kind is CouplingKind.CLEAN:
        return CouplingRealization(n_sites, np.ones(n_sites - 1), int(seed), kind)

    rng = _generator(seed)
    J = J_LOW + rng.random(n_sites - 1)
    # endpoints have probability zero but 0.5 + u can round onto them
    bad = (J <= J_LOW) | (J >= J_HIGH)
    while bad.any():
        J[bad] = J_LOW + rng.random(int(bad.sum()))
        bad = (J <= J_LOW) | (J >= J_HIGH)
    return CouplingRealization(n_sites, J, int(seed), kind)


def critical_field(kind: CouplingKind | str = CouplingKind.DISORDERED, n_samples: int | None = None, seed: int = 0) -> float:
    """Ensemble critical field ``g_c = exp(mean ln J)``.

    With ``n_samples=None`` the disordered value is the closed form
    ``exp(int_{1/2}^{3/2} ln x dx)``; otherwise it is a Monte-Carlo estimate.
    """
    kind = CouplingKind.parse(kind)
    if kind is CouplingKind.CLEAN:
        return 1.0
    if n_samples is None:
        def antiderivative(x):
            return x * math.log(x) - x

        return math.exp(antiderivative(J_HIGH) - antiderivative(J_LOW))
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    J = sample_couplings(n_samples + 1, seed, kind).couplings
    return float(np.exp(np.mean(np.log(J))))
