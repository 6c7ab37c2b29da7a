"""Side-by-side steady states of the two-mode and the effective model."""
from __future__ import annotations

import warnings

import numpy as np

from .correlations import VACUUM_FLOOR
from .hilbert import SpaceConfig
from .lindblad import build_liouvillian, model_liouvillian, steady_state
from .model import AuxCavityParams, SystemParams, TwoModeSpace, build_full_hamiltonian, derive_effective_params


def full_model_observables(params: SystemParams, aux: AuxCavityParams, space2: TwoModeSpace) -> dict:
    """n_s and g2(0) of mode a with cavity b kept explicitly."""
    ops = space2.operators()
    h = build_full_hamiltonian(params, aux, space2)
    collapse = [(ops["a"], params.kappa_a), (ops["b"], aux.kappa_b)]
    collapse += [(ops[f"sm{j}"], params.gamma) for j in (1, 2, 3)]
    ss = steady_state(build_liouvillian(h, collapse))
    a = ops["a"]
    ada = a.conj().T @ a
    a2 = a @ a
    ns = float(np.real(ada.multiply(ss.rho.T).sum()))
    m2 = float(np.real((a2.conj().T @ a2).multiply(ss.rho.T).sum()))
    g2 = m2 / ns**2 if ns > VACUUM_FLOOR else float("nan")
    return {"n_s": ns, "g2_0": g2, "residual": ss.residual}


def effective_observables(params: SystemParams, cutoff: int) -> dict:
    from .correlations import equal_time_observables

    space = SpaceConfig(cutoff)
    ss = steady_state(model_liouvillian(params, space))
    obs = equal_time_observables(ss.rho, space, orders=(2,), strict=False)
    return {"n_s": obs["n_s"], "g2_0": obs["g2_0"], "residual": ss.residual}


def compare_models(params: SystemParams, aux: AuxCavityParams, cavity_cutoff: int = 3, aux_cutoff: int = 1) -> dict:
    """Run both models; the effective one uses (chi, gamma_e) derived from ``aux``.

    A RuntimeWarning is emitted when the auxiliary mode is not dispersive;
    deviations are reported regardless.  The default truncation keeps a single
    quantum in mode b: far detuned, it is nearly empty, and each extra level
    multiplies the factorization cost several times over.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dispersive = aux.check_dispersive()
    for w in caught:
        warnings.warn(w.message, w.category, stacklevel=2)
    chi, gamma_e = derive_effective_params(aux)
    eff_params = params.with_(chi=chi, gamma_e=gamma_e)
    full = full_model_observables(params.with_(chi=chi), aux, TwoModeSpace(cavity_cutoff, aux_cutoff))
    eff = effective_observables(eff_params, cavity_cutoff)

    def rel(a, b):
        return abs(a - b) / abs(b) if b else (0.0 if a == b else float("inf"))

    return {
        "chi": chi,
        "gamma_e": gamma_e,
        "dispersive_ratio": aux.dispersive_ratio(),
        "dispersive": dispersive,
        "full": full,
        "effective": eff,
        "rel_dev_n_s": rel(full["n_s"], eff["n_s"]),
        "rel_dev_g2_0": rel(full["g2_0"], eff["g2_0"]),
    }
