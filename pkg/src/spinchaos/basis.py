"""Computational-basis bookkeeping for spin-1/2 lattices.

Conventions, fixed once and used identically everywhere:

* Basis states are integers in ``[0, 2**L)``.  Bit ``k`` of the integer
  is the state of qubit ``k``: bit 0 means the qubit is in ``|0>``
  (sigma_z eigenvalue +1, spin "up"), bit 1 means ``|1>`` (sigma_z
  eigenvalue -1, spin "down").
* Qubit indices are 0-based.  On the 2D torus, site ``(x, y)`` maps to
  qubit ``y * lx + x`` (row-major).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError

MAX_QUBITS = 16


@dataclass(frozen=True)
class Geometry:
    """Lattice geometry: an open chain or a periodic square torus."""

    kind: str  # "chain" | "torus2d"
    dims: tuple[int, ...]  # (L,) for chain, (lx, ly) for torus

    def __post_init__(self):
        if self.kind not in ("chain", "torus2d"):
            raise ValueError(f"unknown geometry kind {self.kind!r}")
        if self.kind == "chain":
            if len(self.dims) != 1 or self.dims[0] < 1:
                raise ValueError("chain needs dims=(L,) with L >= 1")
        else:
            if len(self.dims) != 2 or min(self.dims) < 3:
                raise ValueError("torus2d needs dims=(lx, ly) with lx, ly >= 3")
        if self.num_sites > MAX_QUBITS:
            raise CapacityError(f"{self.num_sites} sites exceed the {MAX_QUBITS}-qubit dense limit")

    @property
    def num_sites(self) -> int:
        return int(np.prod(self.dims))

    def site_index(self, x: int, y: int = 0) -> int:
        if self.kind == "chain":
            return x
        lx = self.dims[0]
        return (y % self.dims[1]) * lx + (x % lx)


def chain(L: int) -> Geometry:
    return Geometry("chain", (L,))


def torus(lx: int, ly: int) -> Geometry:
    return Geometry("torus2d", (lx, ly))


def enumerate_sector(L: int, n_up: int) -> np.ndarray:
    """All basis indices with ``n_up`` up spins, ascending.

    An up spin is a 0 bit, so the returned indices have exactly
    ``L - n_up`` bits set.  Length is C(L, n_up).
    """
    if not 0 <= L <= MAX_QUBITS:
        raise CapacityError(f"L={L} outside [0, {MAX_QUBITS}]")
    if not 0 <= n_up <= L:
        raise ValueError(f"n_up={n_up} outside [0, {L}]")
    states = np.arange(2**L, dtype=np.int64)
    return states[popcount(states) == L - n_up]


def sector_size(L: int, n_up: int) -> int:
    return math.comb(L, n_up)


def popcount(states) -> np.ndarray:
    """Number of set bits (down spins) of each basis index."""
    states = np.asarray(states, dtype=np.int64)
    counts = np.zeros_like(states)
    shifted = states.copy()
    while shifted.any():
        counts += shifted & 1
        shifted >>= 1
    return counts


@lru_cache(maxsize=None)
def sigma_z_table(L: int) -> np.ndarray:
    """(2**L, L) array of sigma_z eigenvalues: +1 for bit 0, -1 for bit 1."""
    states = np.arange(2**L, dtype=np.int64)
    bits = (states[:, None] >> np.arange(L)[None, :]) & 1
    return (1 - 2 * bits).astype(np.float64)


@lru_cache(maxsize=None)
def parity_phases(L: int) -> np.ndarray:
    """Per-state phases ``i**popcount`` used to gauge away imaginary parts.

    A Hamiltonian whose matrix elements are real except for purely
    imaginary single-bit-flip terms becomes real symmetric under
    conjugation by ``diag(i**popcount)``.
    """
    return 1j ** popcount(np.arange(2**L, dtype=np.int64))


def pairs_at_distance(geometry: Geometry, n: int) -> list[tuple[int, int]]:
    """Unordered qubit pairs in distance class ``n``, each exactly once.

    Chain: ``n = |j - k|`` for any ``1 <= n <= L-1``.  Torus: ``n = 1``
    are the periodic lattice bonds (4-neighbor), ``n = 2`` the diagonal
    neighbors; larger classes are not defined.
    """
    if n < 1:
        raise ValueError(f"distance class n={n} must be >= 1")
    if geometry.kind == "chain":
        L = geometry.dims[0]
        if n > L - 1:
            raise ValueError(f"chain of {L} sites has no pairs at distance {n}")
        return [(k, k + n) for k in range(L - n)]

    lx, ly = geometry.dims
    if n == 1:
        steps = [(1, 0), (0, 1)]
    elif n == 2:
        steps = [(1, 1), (1, -1)]
    else:
        raise ValueError(f"torus distance class n={n} unsupported (only 1 and 2)")
    pairs = set()
    for y in range(ly):
        for x in range(lx):
            a = geometry.site_index(x, y)
            for dx, dy in steps:
                b = geometry.site_index(x + dx, y + dy)
                if a != b:
                    pairs.add((min(a, b), max(a, b)))
    return sorted(pairs)


def all_pairs(L: int) -> list[tuple[int, int]]:
    """All C(L, 2) unordered qubit pairs."""
    if L < 2:
        raise ValueError(f"need at least 2 qubits, got {L}")
    return [(j, k) for j in range(L) for k in range(j + 1, L)]
