"""Photon statistics of the cavity field.

Equal-time correlations are normal-ordered moment ratios

    g1^(n)(0) = <a^dag^n a^n> / <a^dag a>^n

and the delayed bundle correlations follow from the quantum regression
theorem with A = a^n:

    gn^(2)(tau) = Tr[A^dag A exp(L tau)(A rho A^dag)] / <A^dag A>^2
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import IncompleteRecord, UndefinedCorrelation
from .hilbert import SpaceConfig, annihilation
from .lindblad import Liouvillian, model_liouvillian, propagate, steady_state, vec
from .model import SystemParams

VACUUM_FLOOR = 1e-14
DEFAULT_TAU_MAX = 10.0
DEFAULT_TAU_POINTS = 200


def _power(op, n):
    out = sp.identity(op.shape[0], format="csr", dtype=complex)
    for _ in range(n):
        out = out @ op
    return out


def _space_of(rho, space):
    if space is None:
        dim = rho.shape[0]
        if dim % 8:
            raise ValueError("cannot infer the space from a matrix of size %d" % dim)
        space = SpaceConfig(dim // 8 - 1)
    if space.dim != rho.shape[0]:
        raise ValueError("density matrix does not match the space dimension")
    return space


def expect(op, rho) -> complex:
    """Tr(op rho) for sparse op and dense rho."""
    return complex(sp.csr_matrix(op).multiply(np.asarray(rho).T).sum())


def normal_moment(rho, n: int, space: SpaceConfig | None = None) -> float:
    """<a^dag^n a^n> from the operator product."""
    space = _space_of(rho, space)
    a_n = _power(annihilation(space), n)
    return expect(a_n.conj().T @ a_n, rho).real


def mean_photon_number(rho, space: SpaceConfig | None = None) -> float:
    return normal_moment(rho, 1, space)


def g1n_zero(rho, n: int, space: SpaceConfig | None = None) -> float:
    """Equal-time normalized correlation of order n (2, 3 or 4)."""
    if n not in (2, 3, 4):
        raise ValueError(f"order n must be 2, 3 or 4, got {n}")
    space = _space_of(rho, space)
    ns = mean_photon_number(rho, space)
    if ns <= VACUUM_FLOOR:
        raise UndefinedCorrelation(f"<a^dag a> = {ns:.3g} is vacuum; g^({n})(0) undefined")
    return normal_moment(rho, n, space) / ns**n


def photon_distribution(rho, space: SpaceConfig | None = None):
    """Cavity photon-number distribution p(q) and the vacuum-excluded p~(q).

    ``p_tilde[q-1] = p(q) / (1 - p(0))`` for q >= 1; it is ``None`` when the
    cavity is (numerically) empty.
    """
    space = _space_of(rho, space)
    diag = np.real(np.diag(rho))
    p = diag.reshape(space.cavity_cutoff + 1, 8).sum(axis=1)
    excited = p[1:].sum()
    p_tilde = None if excited <= VACUUM_FLOOR else p[1:] / excited
    return p, p_tilde


def factorial_moment(p, n: int) -> float:
    q = np.arange(len(p))
    falling = np.ones_like(q, dtype=float)
    for i in range(n):
        falling *= q - i
    return float(np.dot(falling, p))


def equal_time_observables(rho, space: SpaceConfig, orders=(2, 3, 4), strict: bool = True) -> dict:
    """n_s and g1^(n)(0) for the requested orders.

    With ``strict=False`` undefined correlations are reported as NaN.
    """
    out = {"n_s": mean_photon_number(rho, space)}
    for n in orders:
        try:
            out[f"g{n}_0"] = g1n_zero(rho, n, space)
        except UndefinedCorrelation:
            if strict:
                raise
            out[f"g{n}_0"] = float("nan")
    return out


def default_tau_grid(tau_max: float = DEFAULT_TAU_MAX, points: int = DEFAULT_TAU_POINTS) -> np.ndarray:
    return np.linspace(0.0, tau_max, points)


def gn2_tau(liouvillian: Liouvillian, rho_ss, n: int, tau_grid, space: SpaceConfig | None = None) -> np.ndarray:
    """Delayed bundle correlation gn^(2)(tau) on ``tau_grid``."""
    if n not in (1, 2, 3):
        raise ValueError(f"bundle size n must be 1, 2 or 3, got {n}")
    space = _space_of(rho_ss, space or liouvillian.space)
    a_n = _power(annihilation(space), n)
    detector = (a_n.conj().T @ a_n).tocsr()
    norm = expect(detector, rho_ss).real
    if norm <= VACUUM_FLOOR:
        raise UndefinedCorrelation(f"<a^dag^{n} a^{n}> = {norm:.3g}; g_{n}^(2)(tau) undefined")
    conditioned = a_n @ sp.csr_matrix(rho_ss) @ a_n.conj().T
    traj = propagate(liouvillian, vec(conditioned.toarray()), tau_grid)
    readout = vec(detector.T.toarray())
    return (traj @ readout).real / norm**2


@dataclass
class ObservableRecord:
    n_s: float
    g2_0: float
    g3_0: float
    g4_0: float
    p: np.ndarray
    p_tilde: np.ndarray | None
    params: dict = field(default_factory=dict)
    tau: np.ndarray | None = None
    traces: dict = field(default_factory=dict)
    residual: float = float("nan")

    def as_dict(self) -> dict:
        out = {
            "n_s": self.n_s,
            "g2_0": self.g2_0,
            "g3_0": self.g3_0,
            "g4_0": self.g4_0,
            "p": [float(x) for x in self.p],
            "p_tilde": None if self.p_tilde is None else [float(x) for x in self.p_tilde],
            "residual": self.residual,
            "params": dict(self.params),
        }
        if self.tau is not None:
            out["tau"] = [float(t) for t in self.tau]
            out["traces"] = {f"g{n}2_tau": [float(v) for v in tr] for n, tr in sorted(self.traces.items())}
        return out


def compute_record(params: SystemParams, space: SpaceConfig, tau_grid=None, bundle_sizes=()) -> ObservableRecord:
    """Steady state plus every observable of interest at one parameter point."""
    liou = model_liouvillian(params, space)
    ss = steady_state(liou)
    obs = equal_time_observables(ss.rho, space, strict=False)
    p, p_tilde = photon_distribution(ss.rho, space)
    record = ObservableRecord(
        n_s=obs["n_s"], g2_0=obs["g2_0"], g3_0=obs["g3_0"], g4_0=obs["g4_0"],
        p=p, p_tilde=p_tilde, params={**params.echo(), "cavity_cutoff": space.cavity_cutoff},
        residual=ss.residual,
    )
    if bundle_sizes:
        taus = default_tau_grid() if tau_grid is None else np.asarray(tau_grid, dtype=float)
        record.tau = taus
        for n in bundle_sizes:
            record.traces[n] = gn2_tau(liou, ss.rho, n, taus, space)
    return record


def bunched(trace) -> bool:
    """g(0) > g(tau_1) and g(0) > max over the rest of the grid."""
    trace = np.asarray(trace)
    return bool(trace[0] > trace[1] and trace[0] > trace[1:].max())


def antibunched(trace) -> bool:
    """g(0) < g(tau_1) and g(0) < max over the rest of the grid."""
    trace = np.asarray(trace)
    return bool(trace[0] < trace[1] and trace[0] < trace[1:].max())


def classify(record: ObservableRecord) -> set[str]:
    """Blockade and bundle labels from strict inequalities.

    1PB: g2(0) < 1 and g1^(2) antibunched in tau.
    nPB (n = 2, 3): g1^(n)(0) > 1 and g1^(n+1)(0) < 1.
    n-bundle (n = 2, 3): g1^(2) bunched in tau and gn^(2) antibunched in tau.
    """
    missing = [n for n in (1, 2, 3) if n not in record.traces]
    if missing:
        raise IncompleteRecord(f"classification needs g_n^(2)(tau) traces for n={missing}")
    if any(len(record.traces[n]) < 2 for n in (1, 2, 3)):
        raise IncompleteRecord("traces need at least one point beyond tau = 0")
    labels = set()
    g1 = record.traces[1]
    if record.g2_0 < 1 and antibunched(g1):
        labels.add("1PB")
    if record.g2_0 > 1 and record.g3_0 < 1:
        labels.add("2PB")
    if record.g3_0 > 1 and record.g4_0 < 1:
        labels.add("3PB")
    for n in (2, 3):
        if bunched(g1) and antibunched(record.traces[n]):
            labels.add(f"{n}-bundle")
    return labels
