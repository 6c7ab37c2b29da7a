"""Truncated cavity (x) three-spin Hilbert space and its elementary operators.

Basis ordering: the cavity Fock index is the slowest-varying factor, then
spin 1, spin 2, spin 3 (fastest).  Each spin uses ``g -> 0``, ``e -> 1``, so

    index = n * 8 + s1 * 4 + s2 * 2 + s3

All operators are returned as ``scipy.sparse.csr_matrix`` with complex
entries.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

ATOMS = 3
_SPIN_CODE = {"g": 0, "e": 1, 0: 0, 1: 1}

# single-spin matrices in the {g, e} basis
_SIGMA = {
    "+": np.array([[0, 0], [1, 0]], dtype=complex),    # |e><g|
    "-": np.array([[0, 1], [0, 0]], dtype=complex),    # |g><e|
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),   # |e><e| - |g><g|
}


@dataclass(frozen=True)
class SpaceConfig:
    """Cavity cutoff plus three two-level atoms."""

    cavity_cutoff: int = 12
    atom_count: int = ATOMS

    def __post_init__(self):
        if self.atom_count != ATOMS:
            raise ValueError(f"atom_count is fixed to {ATOMS}, got {self.atom_count}")
        if int(self.cavity_cutoff) != self.cavity_cutoff or self.cavity_cutoff < 1:
            raise ValueError(f"cavity_cutoff must be a positive integer, got {self.cavity_cutoff}")

    @property
    def dim(self) -> int:
        return (self.cavity_cutoff + 1) * 2**ATOMS

    def encode(self, n: int, spins) -> int:
        """Basis index of ``|n, s1, s2, s3>``; spins given as 'g'/'e' or 0/1."""
        if not 0 <= n <= self.cavity_cutoff:
            raise ValueError(f"photon number {n} outside [0, {self.cavity_cutoff}]")
        if len(spins) != ATOMS:
            raise ValueError("need exactly three spin labels")
        s = [_SPIN_CODE[x] for x in spins]
        return n * 8 + s[0] * 4 + s[1] * 2 + s[2]

    def decode(self, index: int) -> tuple[int, tuple[int, int, int]]:
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} outside [0, {self.dim})")
        n, rest = divmod(index, 8)
        return n, ((rest >> 2) & 1, (rest >> 1) & 1, rest & 1)

    def photon_numbers(self) -> np.ndarray:
        """Cavity occupation of every basis state."""
        return np.repeat(np.arange(self.cavity_cutoff + 1), 8)

    def atomic_excitations(self) -> np.ndarray:
        """Number of excited atoms in every basis state."""
        per_block = np.array([bin(k).count("1") for k in range(8)])
        return np.tile(per_block, self.cavity_cutoff + 1)


def kron(*factors) -> sp.csr_matrix:
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), factors).tocsr()


def clean(op, tol: float = 1e-16) -> sp.csr_matrix:
    """Drop stored entries with magnitude at or below ``tol``."""
    op = sp.csr_matrix(op, dtype=complex)
    op.data[np.abs(op.data) <= tol] = 0
    op.eliminate_zeros()
    return op


def is_hermitian(op, tol: float = 1e-14) -> bool:
    diff = sp.csr_matrix(op - op.conj().T)
    return diff.nnz == 0 or float(np.abs(diff.data).max()) < tol


def cavity_annihilation(cutoff: int) -> sp.csr_matrix:
    """Single-mode annihilation operator on ``cutoff + 1`` Fock states."""
    return sp.diags(np.sqrt(np.arange(1, cutoff + 1)), 1, format="csr", dtype=complex)


def annihilation(space: SpaceConfig) -> sp.csr_matrix:
    """Cavity annihilation operator embedded as ``a (x) 1_spins``."""
    return clean(kron(cavity_annihilation(space.cavity_cutoff), sp.identity(8, format="csr")))


def spin_operator(slot: int, axis: str) -> sp.csr_matrix:
    """8x8 operator acting on the three-spin register only (slot is 1-based)."""
    if slot not in (1, 2, 3):
        raise ValueError(f"spin slot must be 1, 2 or 3, got {slot!r}")
    if axis not in _SIGMA:
        raise ValueError(f"unknown axis {axis!r}; expected one of {sorted(_SIGMA)}")
    eye = sp.identity(2, format="csr", dtype=complex)
    factors = [eye] * ATOMS
    factors[slot - 1] = sp.csr_matrix(_SIGMA[axis])
    return kron(*factors)


def pauli(space: SpaceConfig, j: int, axis: str) -> sp.csr_matrix:
    """Pauli or ladder operator for atom ``j`` (1..3) on the full space.

    ``axis`` is one of ``x, y, z, +, -``; ``+`` is |e><g| and ``-`` is |g><e|.
    """
    return clean(kron(sp.identity(space.cavity_cutoff + 1, format="csr"), spin_operator(j, axis)))


def excitation_number(space: SpaceConfig) -> sp.csr_matrix:
    """Total excitation number a^dag a + sum_j sigma_j^+ sigma_j^-."""
    values = space.photon_numbers() + space.atomic_excitations()
    return sp.diags(values.astype(complex), format="csr")


def number_operator(space: SpaceConfig) -> sp.csr_matrix:
    return sp.diags(space.photon_numbers().astype(complex), format="csr")
