"""Excitation-manifold matrices and zero-energy resonance branches.

With the drive switched off, H conserves N = a^dag a + sum_j s_j^+ s_j^-.
Each N block is written in the ordered basis

    |N-1,gge>, |N-1,geg>, |N-1,egg>,
    |N-2,eeg>, |N-2,ege>, |N-2,gee>,
    |N-3,eee>, |N,ggg>

(states with a negative photon number dropped) and shifted by +3*delta/2 so
that |0,ggg> sits at zero energy.  A zero eigenvalue of the block marks a
multiphoton resonance with the driven ground state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .hilbert import SpaceConfig

PHI_TRIPLE = 2 * math.pi / 3

# (photon offset from N, spins) in manifold order
_TEMPLATE = (
    (-1, (0, 0, 1)),
    (-1, (0, 1, 0)),
    (-1, (1, 0, 0)),
    (-2, (1, 1, 0)),
    (-2, (1, 0, 1)),
    (-2, (0, 1, 1)),
    (-3, (1, 1, 1)),
    (0, (0, 0, 0)),
)


def _label(n, spins):
    return f"|{n},{','.join('ge'[s] for s in spins)}>"


def manifold_basis(N: int) -> list[tuple[int, tuple[int, int, int]]]:
    """(photons, spins) for every state of manifold N, in manifold order."""
    if int(N) != N or N < 1:
        raise ValueError(f"unsupported manifold N={N!r}; need an integer >= 1")
    return [(N + off, spins) for off, spins in _TEMPLATE if N + off >= 0]


@dataclass
class ManifoldMatrix:
    N: int
    n: int
    matrix: np.ndarray
    labels: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def determinant(self) -> complex:
        return complex(np.linalg.det(self.matrix))


def build_manifold_matrix(N, chi, delta_a, delta, g_a, phi) -> ManifoldMatrix:
    """Hamiltonian block of manifold N, shifted so |0,ggg> has zero energy.

    Coupling phases follow the Hamiltonian: lowering atom j while adding a
    photon carries e^{i phi}, 1, e^{-i phi} for j = 1, 2, 3.
    """
    basis = manifold_basis(N)
    weights = (np.exp(1j * phi), 1.0, np.exp(-1j * phi))
    size = len(basis)
    m = np.zeros((size, size), dtype=complex)
    for i, (ni, si) in enumerate(basis):
        m[i, i] = ni * delta_a + sum(si) * (delta + chi)
        for k, (nk, sk) in enumerate(basis):
            diff = [a - b for a, b in zip(si, sk)]
            if ni == nk and sum(si) == sum(sk) and i != k and sum(map(abs, diff)) == 2:
                # one excitation hopped between atoms
                m[i, k] = chi
            elif ni == nk + 1 and sorted(diff) == [-1, 0, 0]:
                j = diff.index(-1)
                m[i, k] = g_a * math.sqrt(ni) * weights[j]
                m[k, i] = np.conj(m[i, k])
    return ManifoldMatrix(N=N, n=N, matrix=m, labels=[_label(n, s) for n, s in basis])


def project_manifold(hamiltonian, space: SpaceConfig, N: int) -> np.ndarray:
    """Dense block of a full-space operator on manifold N (manifold order)."""
    basis = manifold_basis(N)
    if N > space.cavity_cutoff:
        raise ValueError(f"cutoff {space.cavity_cutoff} truncates manifold {N}")
    idx = [space.encode(n, s) for n, s in basis]
    return hamiltonian[idx][:, idx].toarray()


def collective_reduce(N, chi, delta_a, g_a, delta_sign=+1) -> np.ndarray:
    """Permutation-symmetric block at phi = 0 with delta = delta_sign * Da/2.

    N=1 basis {|W,0>, |ggg,1>}; N=2 basis {|W_1>, |W_2>, |G_2>}.
    """
    if delta_sign not in (+1, -1):
        raise ValueError("delta_sign must be +1 or -1")
    delta = delta_sign * delta_a / 2
    if N == 1:
        return np.array([[delta + 3 * chi, math.sqrt(3) * g_a],
                         [math.sqrt(3) * g_a, delta_a]], dtype=float)
    if N == 2:
        w1 = delta_a + delta + 3 * chi
        w2 = 2 * delta + 4 * chi
        return np.array([[w1, 2 * g_a, math.sqrt(6) * g_a],
                         [2 * g_a, w2, 0.0],
                         [math.sqrt(6) * g_a, 0.0, 2 * delta_a]], dtype=float)
    raise ValueError(f"collective reduction only for N=1, 2 (got {N!r})")


# --- root finding -----------------------------------------------------------

def companion_matrix(coeffs) -> np.ndarray:
    """Frobenius companion matrix of a polynomial, highest power first."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if c.size < 2:
        raise ValueError("polynomial must have degree >= 1")
    deg = c.size - 1
    comp = np.zeros((deg, deg))
    comp[0, :] = -c[1:] / c[0]
    comp[1:, :-1] = np.eye(deg - 1)
    return comp


def _is_real(z, tol=1e-9):
    return abs(z.imag) < tol * (1 + abs(z.real))


def _polish(coeffs, r, steps=3):
    """Newton refinement that only accepts steps reducing |p(r)|."""
    dp = np.polyder(coeffs)
    residual = abs(np.polyval(coeffs, r))
    for _ in range(steps):
        d = np.polyval(dp, r)
        if d == 0:
            break
        trial = r - np.polyval(coeffs, r) / d
        if not math.isfinite(trial) or abs(np.polyval(coeffs, trial)) >= residual:
            break
        r, residual = trial, abs(np.polyval(coeffs, trial))
    return r


def real_roots(coeffs, tol=1e-9) -> np.ndarray:
    """Sorted, de-duplicated real roots.

    Quadratics use the closed form; higher degrees use companion-matrix
    eigenvalues followed by a few Newton polishing steps.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if c.size < 2:
        return np.empty(0)
    if c.size == 2:
        candidates = [complex(-c[1] / c[0])]
    elif c.size == 3:
        a, b, cc = c
        disc = b * b - 4 * a * cc
        if disc >= 0:
            q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
            candidates = [complex(q / a), complex(cc / q) if q != 0 else complex(0.0)]
        else:
            s = math.sqrt(-disc) / (2 * a)
            candidates = [complex(-b / (2 * a), s), complex(-b / (2 * a), -s)]
    else:
        candidates = list(np.linalg.eigvals(companion_matrix(c)))
    found = sorted(z.real for z in candidates if _is_real(z, tol))
    if c.size > 3:
        found = sorted(_polish(c, r) for r in found)
    roots: list[float] = []
    for r in found:
        if roots and abs(r - roots[-1]) <= 1e-9 * (1 + abs(r)):
            continue
        roots.append(float(r))
    return np.array(roots)


@dataclass
class ResonanceBranch:
    manifold: int
    branch_id: str
    coefficients: np.ndarray
    roots: np.ndarray

    def residuals(self) -> np.ndarray:
        return np.abs(np.polyval(self.coefficients, self.roots))


def branch_polynomials(N, chi, g_a, delta_sign=+1) -> dict[str, list[float]]:
    """Zero-energy conditions in Da, highest power first."""
    c, g2 = chi, g_a * g_a
    if N == 1:
        if delta_sign > 0:
            return {"N1": [1.0, 6 * c, -6 * g2]}
        return {"N1": [1.0, -6 * c, 6 * g2]}
    if N == 2:
        if delta_sign > 0:
            return {"N2": [3.0, 18 * c, 24 * c * c - 14 * g2, -24 * g2 * c]}
        return {"N2": [1.0, 2 * c, 2 * g2 - 24 * c * c, 24 * g2 * c]}
    if N == 3:
        if delta_sign < 0:
            raise ValueError("N=3 branches are available for delta = +Da/2 only")
        return {
            "N3a": [5.0, 10 * c, -2 * g2],
            "N3b": [10.0, 17 * c, 6 * c * c - 4 * g2],
            "N3c": [10.0, 25 * c, 10 * c * c - 38 * g2, -62 * c * g2, 12 * g2 * g2 - 12 * c * c * g2],
        }
    raise ValueError(f"unsupported manifold N={N!r}")


def resonance_branches(N, chi, g_a, delta_sign=+1) -> list[ResonanceBranch]:
    """Real zero-energy detunings of manifold N.

    N=1, 2 assume phi = 0; N=3 assumes phi = 2 pi / 3 and delta = Da/2.
    A branch without real roots is returned with an empty root array.
    """
    return [
        ResonanceBranch(N, bid, np.array(coeffs), real_roots(coeffs))
        for bid, coeffs in branch_polynomials(N, chi, g_a, delta_sign).items()
    ]


def default_manifolds(phi) -> tuple[int, ...]:
    if abs(phi) < 1e-12:
        return (1, 2)
    if abs(phi - PHI_TRIPLE) < 1e-12:
        return (3,)
    raise ValueError("resonance curves are defined for phi = 0 or 2*pi/3")


def resonance_curves(chi_grid, g_a, phi=0.0, delta_sign=+1, manifolds=None) -> list[tuple[float, str, float]]:
    """Rows (chi, curve id, Da root) over a monotone chi grid.

    Roots of each polynomial are linked across the grid by nearest-root
    assignment, so a curve id is stable until its root stops being real.
    """
    chi_grid = np.asarray(chi_grid, dtype=float)
    steps = np.diff(chi_grid)
    if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("chi_grid must be strictly monotone")
    manifolds = manifolds or default_manifolds(phi)
    rows = []
    for N in manifolds:
        tracks: dict[str, dict] = {}
        counters: dict[str, int] = {}
        for chi in chi_grid:
            for br in resonance_branches(N, chi, g_a, delta_sign):
                live = {k: v for k, v in tracks.items() if v["branch"] == br.branch_id and v["alive"]}
                keys = list(live)
                roots = br.roots
                assigned: dict[int, str] = {}
                if keys and roots.size:
                    last = np.array([live[k]["last"] for k in keys])
                    cost = np.abs(roots[:, None] - last[None, :])
                    ri, ci = linear_sum_assignment(cost)
                    assigned = {int(r): keys[c] for r, c in zip(ri, ci)}
                for k in keys:
                    if k not in assigned.values():
                        tracks[k]["alive"] = False
                for i, r in enumerate(roots):
                    key = assigned.get(i)
                    if key is None:
                        counters[br.branch_id] = counters.get(br.branch_id, 0) + 1
                        key = f"{br.branch_id}-{counters[br.branch_id]}"
                        tracks[key] = {"branch": br.branch_id, "alive": True}
                    tracks[key]["last"] = r
                    rows.append((float(chi), key, float(r)))
    return rows
