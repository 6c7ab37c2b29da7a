"""Self-checks run by ``photon-bundles validate``.

Every suite returns a :class:`SuiteResult`; the command exits non-zero if
any of them fails.  The suites are independent oracles: dense brute-force
constructions, exact symmetries, analytic roots and rerun comparisons.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlations import equal_time_observables, gn2_tau, normal_moment
from .errors import NumericalFailure
from .hilbert import SpaceConfig, excitation_number
from .lindblad import check_density_matrix, model_liouvillian, steady_state
from .model import SystemParams, build_effective_hamiltonian
from .spectrum import (
    PHI_TRIPLE,
    branch_polynomials,
    build_manifold_matrix,
    collective_reduce,
    project_manifold,
    real_roots,
)
from .sweep import Axis, SweepSpec, run_sweep, to_csv

# operating point with n_s ~ 0.21: cheap, but populates several Fock states
REFERENCE_POINT = SystemParams(delta_a=21.5)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _random_params(rng) -> SystemParams:
    return SystemParams(
        delta_a=rng.uniform(-30, 30),
        alpha=rng.uniform(-1, 1),
        omega=rng.uniform(0, 2),
        g_a=rng.uniform(0.5, 15),
        chi=rng.uniform(-5, 5),
        phi=rng.uniform(0, 2 * math.pi),
        gamma=rng.uniform(0, 1),
    )


def suite_hermiticity(seed=0, draws=20, **_) -> SuiteResult:
    rng = np.random.default_rng(seed)
    space = SpaceConfig(4)
    worst = 0.0
    trace_leak = 0.0
    for _ in range(draws):
        p = _random_params(rng)
        h = build_effective_hamiltonian(p, space)
        diff = h - h.conj().T
        worst = max(worst, float(abs(diff).max()) if diff.nnz else 0.0)
        liou = model_liouvillian(p, space)
        trace_leak = max(trace_leak, float(np.abs(liou.trace_row() @ liou.matrix).max()))
    ok = worst < 1e-14 and trace_leak < 1e-12
    return SuiteResult("hermiticity", ok, f"max|H-H^dag|={worst:.2e}, max|Tr o L|={trace_leak:.2e}")


def suite_conservation(seed=1, draws=10, **_) -> SuiteResult:
    rng = np.random.default_rng(seed)
    space = SpaceConfig(5)
    n_op = excitation_number(space)
    worst = 0.0
    for _ in range(draws):
        h = build_effective_hamiltonian(_random_params(rng).with_(omega=0.0), space)
        comm = h @ n_op - n_op @ h
        worst = max(worst, float(abs(comm).max()) if comm.nnz else 0.0)
    return SuiteResult("conservation", worst < 1e-12, f"max|[H,N]|={worst:.2e} at Omega=0")


def suite_projection(self_exchange=True, **_) -> SuiteResult:
    """Manifold blocks against the projected Hamiltonian."""
    space = SpaceConfig(4)
    worst = 0.0
    for phi in (0.0, PHI_TRIPLE):
        for chi, da, delta, g in ((0.0, 7.0, 3.5, 10.0), (4.5, -21.0, -10.5, 10.0), (1.3, 2.0, -0.7, 3.0)):
            p = SystemParams(delta_a=da, delta=delta, omega=0.0, g_a=g, chi=chi, phi=phi)
            h = build_effective_hamiltonian(p, space, self_exchange=self_exchange)
            for N in (1, 2, 3):
                ref = build_manifold_matrix(N, chi, da, delta, g, phi).eigenvalues()
                block = project_manifold(h, space, N) + 1.5 * delta * np.eye(ref.size)
                worst = max(worst, float(np.abs(np.linalg.eigvalsh(block) - ref).max()))
    return SuiteResult("projection", worst < 1e-10, f"max eigenvalue mismatch {worst:.2e}")


def _det_ok(m, tol=1e-8):
    scale = max(1.0, float(np.abs(m).max()))
    return abs(np.linalg.det(m)) < tol * scale ** m.shape[0]


def suite_det_roots(seed=2, draws=50, **_) -> SuiteResult:
    """Every analytic branch root is a zero of the manifold determinant."""
    rng = np.random.default_rng(seed)
    checked = failed = 0
    for _ in range(draws):
        chi, g = rng.uniform(-1.5, 1.5), rng.uniform(0.3, 2.0)
        cases = [(1, +1, 0.0), (1, -1, 0.0), (2, +1, 0.0), (2, -1, 0.0), (3, +1, PHI_TRIPLE)]
        for N, sign, phi in cases:
            for coeffs in branch_polynomials(N, chi, g, sign).values():
                for r in real_roots(coeffs):
                    m = build_manifold_matrix(N, chi, r, sign * r / 2, g, phi).matrix
                    checked += 1
                    failed += not _det_ok(m)
                    if N < 3:
                        checked += 1
                        failed += not _det_ok(collective_reduce(N, chi, r, g, sign))
    return SuiteResult("det_roots", failed == 0 and checked > 0, f"{checked - failed}/{checked} roots annihilate det")


def suite_steady_state(cutoff=12, **_) -> SuiteResult:
    space = SpaceConfig(cutoff)
    ss = steady_state(model_liouvillian(REFERENCE_POINT, space))
    diag = check_density_matrix(ss.rho)
    dark = steady_state(model_liouvillian(REFERENCE_POINT.with_(omega=0.0), space))
    vacuum_err = abs(dark.rho[0, 0] - 1.0) + float(np.abs(dark.rho).sum() - abs(dark.rho[0, 0]))
    ok = diag["ok"] and vacuum_err < 1e-12 and ss.residual < 1e-10
    return SuiteResult(
        "steady_state",
        ok,
        f"trace err {diag['trace_error']:.1e}, herm err {diag['hermiticity_error']:.1e}, "
        f"min eig {diag['min_eigenvalue']:.1e}, residual {ss.residual:.1e}, dark-state err {vacuum_err:.1e}",
    )


def suite_regression(regression_cutoff=6, long_delay=40.0, **_) -> SuiteResult:
    """Zero-delay value equals the moment ratio; long delay factorizes.

    The slowest relaxation rate is set by the atomic decay (~gamma), so the
    long-delay check sits several atomic lifetimes out.
    """
    space = SpaceConfig(regression_cutoff)
    liou = model_liouvillian(REFERENCE_POINT, space)
    ss = steady_state(liou)
    zero_err = long_err = 0.0
    for n in (1, 2):
        trace = gn2_tau(liou, ss.rho, n, np.array([0.0, 0.5 * long_delay, long_delay]), space)
        # <a^dag^2n a^2n> / <a^dag^n a^n>^2 from operator moments
        ref = normal_moment(ss.rho, 2 * n, space) / normal_moment(ss.rho, n, space) ** 2
        zero_err = max(zero_err, abs(trace[0] - ref) / max(abs(ref), 1e-300))
        long_err = max(long_err, abs(trace[-1] - 1.0))
    ok = zero_err < 1e-10 and long_err < 1e-3
    return SuiteResult("regression", ok, f"tau=0 rel err {zero_err:.1e}, |g({long_delay:g})-1| {long_err:.1e}")


def suite_determinism(**_) -> SuiteResult:
    spec = dict(axis1=Axis("delta_a", 20.0, 25.0, 4), params=REFERENCE_POINT, cutoff=5, observables=("p1", "pt1"))
    serial = to_csv(run_sweep(SweepSpec(workers=1, **spec)), SweepSpec(**spec).columns())
    parallel = to_csv(run_sweep(SweepSpec(workers=2, **spec)), SweepSpec(**spec).columns())
    return SuiteResult("determinism", serial == parallel, "1 vs 2 workers byte-identical" if serial == parallel else "CSV differs")


def suite_convergence(cutoff=12, tol=1e-6, **_) -> SuiteResult:
    """Observables at ``cutoff`` against ``cutoff + 2``."""
    vals = []
    for nc in (cutoff, cutoff + 2):
        space = SpaceConfig(nc)
        ss = steady_state(model_liouvillian(REFERENCE_POINT, space))
        vals.append(equal_time_observables(ss.rho, space, orders=(2, 3)))
    change = max(abs(vals[0][k] - vals[1][k]) / abs(vals[1][k]) for k in vals[0])
    return SuiteResult("convergence", change < tol, f"N_c={cutoff} vs {cutoff + 2}: max rel change {change:.2e}")


SUITES = {
    "hermiticity": suite_hermiticity,
    "conservation": suite_conservation,
    "projection": suite_projection,
    "det_roots": suite_det_roots,
    "steady_state": suite_steady_state,
    "regression": suite_regression,
    "determinism": suite_determinism,
    "convergence": suite_convergence,
}


def run_suites(names=None, **options) -> list[SuiteResult]:
    """Run the named suites (all by default); a crashing suite counts as failed."""
    results = []
    for name in names or SUITES:
        try:
            results.append(SUITES[name](**options))
        except (NumericalFailure, ValueError, ArithmeticError) as exc:
            results.append(SuiteResult(name, False, f"{type(exc).__name__}: {exc}"))
    return results
