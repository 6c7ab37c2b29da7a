"""Liouvillian superoperator, steady state and time propagation.

Vectorization is column stacking throughout: ``vec(X) = X.reshape(-1, order="F")``
and ``vec(A X B) = (B^T kron A) vec(X)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import NumericalFailure
from .hilbert import SpaceConfig, annihilation, pauli
from .model import SystemParams, build_effective_hamiltonian

log = logging.getLogger(__name__)

DEFAULT_CUTOFFS = (8, 10, 12, 14, 16)


def vec(rho) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, dim: int) -> np.ndarray:
    return np.asarray(v).reshape((dim, dim), order="F")


@dataclass(frozen=True)
class Liouvillian:
    matrix: sp.csr_matrix
    dim: int
    convention: str = "column-stacking"
    space: SpaceConfig | None = None

    def apply(self, rho) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)

    def trace_row(self) -> np.ndarray:
        """Row vector t with t . vec(X) = Tr X."""
        return vec(np.eye(self.dim))


def build_liouvillian(hamiltonian, collapse_list, space: SpaceConfig | None = None) -> Liouvillian:
    """Sparse generator of d rho/dt = -i[H, rho] + sum_i r_i D[c_i] rho.

    ``collapse_list`` holds ``(operator, rate)`` pairs.
    """
    h = sp.csr_matrix(hamiltonian, dtype=complex)
    d = h.shape[0]
    eye = sp.identity(d, format="csr", dtype=complex)
    gen = -1j * (sp.kron(eye, h) - sp.kron(h.T, eye))
    for op, rate in collapse_list:
        if rate < 0:
            raise ValueError(f"collapse rate must be >= 0, got {rate}")
        if rate == 0:
            continue
        c = sp.csr_matrix(op, dtype=complex)
        cdc = c.conj().T @ c
        gen = gen + rate * (
            sp.kron(c.conj(), c) - 0.5 * sp.kron(eye, cdc) - 0.5 * sp.kron(cdc.T, eye)
        )
    return Liouvillian(matrix=sp.csr_matrix(gen), dim=d, space=space)


def collapse_operators(params: SystemParams, space: SpaceConfig):
    """Cavity leakage plus independent atomic decay at gamma + gamma_e."""
    ops = [(annihilation(space), params.kappa_a)]
    ops += [(pauli(space, j, "-"), params.atomic_decay) for j in (1, 2, 3)]
    return ops


def model_liouvillian(params: SystemParams, space: SpaceConfig) -> Liouvillian:
    h = build_effective_hamiltonian(params, space)
    return build_liouvillian(h, collapse_operators(params, space), space=space)


@dataclass
class SteadyState:
    rho: np.ndarray
    residual: float
    cutoff: int | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


def steady_state(liouvillian: Liouvillian, border_index: int = 0) -> SteadyState:
    """Solve L vec(rho) = 0 with Tr rho = 1 by a bordered sparse LU.

    Row ``border_index * (d + 1)`` (the equation for rho[k, k]) is replaced by
    the trace functional.  The solution is hermitized and renormalized.
    """
    d = liouvillian.dim
    gen = liouvillian.matrix
    row = int(border_index) * (d + 1)
    if not 0 <= row < d * d:
        raise ValueError(f"border_index {border_index} outside [0, {d})")
    keep = np.ones(d * d)
    keep[row] = 0.0
    trace_cols = np.arange(d) * (d + 1)
    border = sp.csr_matrix(
        (np.ones(d, dtype=complex), (np.full(d, row), trace_cols)), shape=(d * d, d * d)
    )
    system = (sp.diags(keep) @ gen + border).tocsc()
    rhs = np.zeros(d * d, dtype=complex)
    rhs[row] = 1.0
    try:
        lu = spla.splu(system)
    except RuntimeError as exc:
        raise NumericalFailure(
            "bordered Liouvillian is singular (degenerate steady manifold?)",
            {"dim": d, "border_row": row, "error": str(exc)},
        ) from exc
    x = lu.solve(rhs)
    if not np.all(np.isfinite(x)):
        raise NumericalFailure("steady-state solve produced non-finite values", {"dim": d})
    rho = unvec(x, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    residual = float(np.abs(gen @ vec(rho)).max())
    cutoff = liouvillian.space.cavity_cutoff if liouvillian.space is not None else None
    return SteadyState(rho=rho, residual=residual, cutoff=cutoff)


def check_density_matrix(rho, tol: float = 1e-12, positivity: float = -1e-8) -> dict:
    """Trace, hermiticity and positivity diagnostics of a density matrix."""
    trace_err = abs(np.trace(rho) - 1.0)
    herm_err = float(np.abs(rho - rho.conj().T).max())
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    return {
        "trace_error": trace_err,
        "hermiticity_error": herm_err,
        "min_eigenvalue": min_eig,
        "ok": trace_err < tol and herm_err < tol and min_eig >= positivity,
    }


def propagate(liouvillian: Liouvillian, v0, tau_grid, rtol: float = 1e-10, atol: float | None = None):
    """Evaluate ``exp(L tau) v0`` on an ascending grid starting at 0.

    Uses the adaptive Dormand-Prince 8(5,3) pair; step sizes are chosen from
    its embedded error estimate.  Returns an array of shape (len(grid), d^2).
    """
    taus = np.asarray(tau_grid, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("tau_grid must be a non-empty 1-D array")
    if taus[0] != 0 or np.any(np.diff(taus) <= 0):
        raise ValueError("tau_grid must start at 0 and be strictly ascending")
    v0 = np.asarray(v0, dtype=complex)
    out = np.empty((taus.size, v0.size), dtype=complex)
    out[0] = v0
    if taus.size == 1:
        return out
    scale = float(np.abs(v0).max()) or 1.0
    if atol is None:
        atol = 1e-16 * scale
    gen = liouvillian.matrix
    sol = solve_ivp(
        lambda _t, y: gen @ y,
        (0.0, taus[-1]),
        v0,
        method="DOP853",
        t_eval=taus,
        rtol=rtol,
        atol=atol,
    )
    if sol.status != 0:
        raise NumericalFailure(f"propagation failed: {sol.message}", {"t_reached": float(sol.t[-1]) if sol.t.size else 0.0})
    out[1:] = sol.y.T[1:]
    return out


@dataclass
class ConvergenceReport:
    chosen: int | None
    table: list[dict]

    def format(self) -> str:
        lines = ["cutoff,n_s,g2_0,g3_0,max_rel_change"]
        for row in self.table:
            lines.append(
                f"{row['cutoff']},{row['n_s']:.12g},{row['g2_0']:.12g},{row['g3_0']:.12g},{row['change']:.3g}"
            )
        return "\n".join(lines)


def _rel_change(a, b):
    if np.isnan(a) and np.isnan(b):
        return 0.0
    if np.isnan(a) or np.isnan(b):
        return np.inf
    denom = max(abs(a), abs(b))
    return 0.0 if denom == 0 else abs(a - b) / denom


def convergence_scan(params: SystemParams, cutoffs=DEFAULT_CUTOFFS, tol: float = 1e-6, raise_on_failure: bool = True) -> ConvergenceReport:
    """Smallest cutoff whose n_s, g2(0), g3(0) move < ``tol`` at the next cutoff."""
    from .correlations import equal_time_observables

    cutoffs = list(cutoffs)
    if len(cutoffs) < 2 or any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("need at least two strictly ascending cutoffs")
    table = []
    for nc in cutoffs:
        space = SpaceConfig(nc)
        ss = steady_state(model_liouvillian(params, space))
        obs = equal_time_observables(ss.rho, space, orders=(2, 3), strict=False)
        table.append({"cutoff": nc, "n_s": obs["n_s"], "g2_0": obs["g2_0"], "g3_0": obs["g3_0"], "change": np.nan})
    chosen = None
    for cur, nxt in zip(table, table[1:]):
        cur["change"] = max(_rel_change(cur[k], nxt[k]) for k in ("n_s", "g2_0", "g3_0"))
        if chosen is None and cur["change"] < tol:
            chosen = cur["cutoff"]
    report = ConvergenceReport(chosen, table)
    log.debug("convergence scan\n%s", report.format())
    if chosen is None and raise_on_failure:
        raise NumericalFailure("no cutoff converged", {"table": report.format()})
    return report
