"""Model parameters and Hamiltonians.

Frequencies are in units of the cavity decay rate kappa_a.  The effective
Hamiltonian (auxiliary cavity eliminated) is

    H = Da a^dag a + sum_j (delta/2 sz_j + Omega sx_j) + chi J+ J-
        + g_a a^dag (e^{i phi} s1- + s2- + e^{-i phi} s3-) + h.c.

``Omega`` multiplies sigma^x directly (no factor 1/2); the default weak
drive is Omega/kappa = 0.5.
The exchange term runs over all ordered pairs (j, k) including j == k, i.e.
it equals chi * J+ J- with J- = sum_j s_j-.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .hilbert import (
    ATOMS,
    SpaceConfig,
    cavity_annihilation,
    clean,
    kron,
    spin_operator,
)

TWO_PI = 2 * math.pi
DELTA_RULES = ("alpha", "chi_over_g")


@dataclass(frozen=True)
class SystemParams:
    """Rates and detunings of the effective model.

    The atomic detuning is ``delta`` when given, otherwise ``alpha * delta_a``
    (``delta_rule='alpha'``) or ``(chi / g_a) * delta_a``
    (``delta_rule='chi_over_g'``).
    """

    delta_a: float = 0.0
    alpha: float = 0.5
    delta_rule: str = "alpha"
    delta: float | None = None
    omega: float = 0.5
    g_a: float = 10.0
    chi: float = 0.0
    phi: float = 0.0
    kappa_a: float = 1.0
    gamma: float = 0.2
    gamma_e: float = 0.0

    def __post_init__(self):
        if not self.kappa_a > 0:
            raise ValueError("kappa_a must be > 0")
        for name in ("gamma", "gamma_e", "omega"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0 <= self.phi < TWO_PI:
            raise ValueError("phi must lie in [0, 2*pi)")
        if self.delta_rule not in DELTA_RULES:
            raise ValueError(f"delta_rule must be one of {DELTA_RULES}")
        for name in ("delta_a", "alpha", "omega", "g_a", "chi", "phi", "gamma", "gamma_e"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def effective_delta(self) -> float:
        if self.delta is not None:
            return float(self.delta)
        if self.delta_rule == "chi_over_g":
            return self.chi / self.g_a * self.delta_a
        return self.alpha * self.delta_a

    @property
    def atomic_decay(self) -> float:
        return self.gamma + self.gamma_e

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def echo(self) -> dict:
        """Flat parameter dictionary including the resolved detuning."""
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["delta_effective"] = self.effective_delta
        return out


def wrap_phase(phi: float) -> float:
    """Map any angle into [0, 2*pi)."""
    wrapped = math.fmod(phi, TWO_PI)
    if wrapped < 0:
        wrapped += TWO_PI
    # fmod can return 2*pi after adding a tiny negative value
    return 0.0 if wrapped >= TWO_PI else wrapped


@dataclass(frozen=True)
class AuxCavityParams:
    """The far-detuned auxiliary mode b."""

    g_b: float
    delta_b: float
    kappa_b: float

    def dispersive_ratio(self) -> float:
        scale = max(abs(self.g_b), abs(self.kappa_b))
        return math.inf if scale == 0 else abs(self.delta_b) / scale

    def check_dispersive(self, threshold: float = 10.0) -> bool:
        """Warn (not raise) when the elimination is questionable."""
        ok = self.dispersive_ratio() >= threshold
        if not ok:
            warnings.warn(
                f"auxiliary cavity not dispersive: |delta_b|/max(g_b, kappa_b) = "
                f"{self.dispersive_ratio():.3g} < {threshold}",
                RuntimeWarning,
                stacklevel=2,
            )
        return ok


def derive_effective_params(aux: AuxCavityParams) -> tuple[float, float]:
    """Exchange strength chi and extra atomic decay gamma_e from mode b."""
    denom = aux.delta_b**2 + aux.kappa_b**2
    if denom == 0:
        raise ValueError("delta_b and kappa_b cannot both be zero")
    g2 = aux.g_b**2
    chi = -g2 * aux.delta_b / denom
    gamma_e = aux.kappa_b * g2 / denom
    return chi + 0.0, gamma_e + 0.0


def _phase_weights(phi: float) -> tuple[complex, complex, complex]:
    return (np.exp(1j * phi), 1.0 + 0j, np.exp(-1j * phi))


def _spin_terms(params: SystemParams, self_exchange: bool) -> sp.csr_matrix:
    """Atomic part of H on the 8-dim spin register."""
    delta = params.effective_delta
    sz = [spin_operator(j, "z") for j in (1, 2, 3)]
    sx = [spin_operator(j, "x") for j in (1, 2, 3)]
    sm = [spin_operator(j, "-") for j in (1, 2, 3)]
    h = sum(0.5 * delta * z + params.omega * x for z, x in zip(sz, sx))
    j_minus = sum(sm)
    exchange = j_minus.conj().T @ j_minus
    if not self_exchange:
        exchange = exchange - sum(s.conj().T @ s for s in sm)
    return sp.csr_matrix(h + params.chi * exchange)


def build_effective_hamiltonian(params: SystemParams, space: SpaceConfig, *, self_exchange: bool = True):
    """Effective single-mode Hamiltonian as a sparse ``space.dim`` square matrix.

    ``self_exchange=False`` drops the j == k terms of the exchange sum; it
    exists only so validation can demonstrate that the manifold spectra
    require them.
    """
    if space.atom_count != ATOMS:
        raise ValueError("dimension mismatch: model needs three atoms")
    nc = space.cavity_cutoff
    a = cavity_annihilation(nc)
    eye_c = sp.identity(nc + 1, format="csr", dtype=complex)
    eye_s = sp.identity(8, format="csr", dtype=complex)

    h = params.delta_a * kron(a.conj().T @ a, eye_s)
    h = h + kron(eye_c, _spin_terms(params, self_exchange))
    collective = sum(w * spin_operator(j, "-") for w, j in zip(_phase_weights(params.phi), (1, 2, 3)))
    coupling = params.g_a * kron(a.conj().T, collective)
    h = h + coupling + coupling.conj().T
    h = clean(h)
    if h.shape != (space.dim, space.dim):
        raise ValueError("dimension mismatch while assembling H")
    return h


@dataclass(frozen=True)
class TwoModeSpace:
    """Cavity a (x) cavity b (x) three spins, a slowest and spins fastest."""

    cavity_cutoff: int = 3
    aux_cutoff: int = 1

    @property
    def dim(self) -> int:
        return (self.cavity_cutoff + 1) * (self.aux_cutoff + 1) * 8

    def operators(self) -> dict:
        """a, b and the lowering operators s1-, s2-, s3- on the full space."""
        a = cavity_annihilation(self.cavity_cutoff)
        b = cavity_annihilation(self.aux_cutoff)
        ia = sp.identity(self.cavity_cutoff + 1, format="csr", dtype=complex)
        ib = sp.identity(self.aux_cutoff + 1, format="csr", dtype=complex)
        i8 = sp.identity(8, format="csr", dtype=complex)
        ops = {"a": kron(a, ib, i8), "b": kron(ia, b, i8)}
        for j in (1, 2, 3):
            ops[f"sm{j}"] = kron(ia, ib, spin_operator(j, "-"))
        return ops


def build_full_hamiltonian(params: SystemParams, aux: AuxCavityParams, space2: TwoModeSpace):
    """Two-mode Hamiltonian before eliminating cavity b.

    ``params.chi`` is not used as an exchange term (mode b generates it), but
    still feeds the detuning when ``delta_rule="chi_over_g"``.
    """
    ops = space2.operators()
    a, b = ops["a"], ops["b"]
    sm = [ops[f"sm{j}"] for j in (1, 2, 3)]
    delta = params.effective_delta
    h = params.delta_a * (a.conj().T @ a) + aux.delta_b * (b.conj().T @ b)
    for s in sm:
        sd = s.conj().T
        h = h + 0.5 * delta * (sd @ s - s @ sd) + params.omega * (s + sd)
    ca = params.g_a * a.conj().T @ sum(w * s for w, s in zip(_phase_weights(params.phi), sm))
    cb = aux.g_b * b.conj().T @ sum(sm)
    h = h + ca + ca.conj().T + cb + cb.conj().T
    h = clean(h)
    if h.shape != (space2.dim, space2.dim):
        raise ValueError("dimension mismatch while assembling the two-mode H")
    return h


def relabel_atoms_1_3(space: SpaceConfig) -> sp.csr_matrix:
    """Permutation matrix exchanging spin slots 1 and 3."""
    dim = space.dim
    cols = np.arange(dim)
    rows = np.empty(dim, dtype=int)
    for idx in range(dim):
        n, (s1, s2, s3) = space.decode(idx)
        rows[idx] = space.encode(n, (s3, s2, s1))
    return sp.csr_matrix((np.ones(dim, dtype=complex), (rows, cols)), shape=(dim, dim))
