import math
import warnings

import numpy as np
import pytest

from photon_bundles.fullmodel import compare_models
from photon_bundles.hilbert import SpaceConfig, excitation_number, is_hermitian
from photon_bundles.model import (
    AuxCavityParams,
    SystemParams,
    TwoModeSpace,
    build_effective_hamiltonian,
    build_full_hamiltonian,
    derive_effective_params,
    relabel_atoms_1_3,
    wrap_phase,
)

PHI3 = 2 * math.pi / 3


def test_defaults_are_weak_drive_point():
    p = SystemParams()
    assert (p.kappa_a, p.gamma, p.g_a, p.omega, p.gamma_e) == (1.0, 0.2, 10.0, 0.5, 0.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(kappa_a=0), dict(gamma=-0.1), dict(gamma_e=-1), dict(omega=-0.5), dict(phi=7.0), dict(delta_rule="x")],
)
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        SystemParams(**kwargs)


def test_delta_rules():
    assert SystemParams(delta_a=4).effective_delta == 2
    assert SystemParams(delta_a=4, alpha=-0.5).effective_delta == -2
    assert SystemParams(delta_a=-26.2, chi=3, delta_rule="chi_over_g").effective_delta == pytest.approx(-7.86)
    assert SystemParams(delta_a=4, delta=1.5).effective_delta == 1.5


def test_wrap_phase():
    assert wrap_phase(-PHI3) == pytest.approx(2 * math.pi - PHI3)
    assert wrap_phase(2 * math.pi) == 0.0
    assert 0 <= wrap_phase(-1e-300) < 2 * math.pi


def test_diagonal_spot_value():
    space = SpaceConfig(2)
    p = SystemParams(delta_a=3.0, delta=2.0, g_a=0, omega=0, chi=0)
    h = build_effective_hamiltonian(p, space)
    i = space.encode(1, "egg")
    assert h[i, i] == pytest.approx(3.0 - 1.0)
    assert abs(h - h.getH()).max() == 0
    assert np.count_nonzero(h.toarray() - np.diag(h.diagonal())) == 0


def test_drive_multiplies_sigma_x():
    space = SpaceConfig(2)
    h = build_effective_hamiltonian(SystemParams(omega=0.5, g_a=0), space)
    assert h[space.encode(0, "ggg"), space.encode(0, "egg")] == pytest.approx(0.5)


def test_exchange_includes_self_terms():
    space = SpaceConfig(2)
    p = SystemParams(delta_a=0, delta=0, omega=0, g_a=0, chi=1.7)
    i, k = space.encode(0, "egg"), space.encode(0, "geg")
    h = build_effective_hamiltonian(p, space)
    assert h[i, i] == pytest.approx(1.7)
    assert h[i, k] == pytest.approx(1.7)
    mutated = build_effective_hamiltonian(p, space, self_exchange=False)
    assert mutated[i, i] == 0
    assert mutated[i, k] == pytest.approx(1.7)


def test_phase_cancels_bright_coupling():
    space = SpaceConfig(2)
    h = build_effective_hamiltonian(SystemParams(omega=0, phi=PHI3), space).toarray()
    bright = np.zeros(space.dim, dtype=complex)
    for spins in ("egg", "geg", "gge"):
        bright[space.encode(0, spins)] = 1 / math.sqrt(3)
    assert abs(h[space.encode(1, "ggg")] @ bright) < 1e-14


def test_conservation_without_drive():
    space = SpaceConfig(5)
    n_op = excitation_number(space)
    h = build_effective_hamiltonian(SystemParams(delta_a=3, chi=2, phi=1.1, omega=0), space)
    assert abs(h @ n_op - n_op @ h).max() < 1e-12
    h_driven = build_effective_hamiltonian(SystemParams(delta_a=3, omega=0.5), space)
    assert abs(h_driven @ n_op - n_op @ h_driven).max() > 0.1


def test_relabel_maps_phase_to_its_negative():
    space = SpaceConfig(3)
    perm = relabel_atoms_1_3(space)
    for phi in (0.3, PHI3, 4.0):
        p = SystemParams(delta_a=2, chi=0.7, phi=phi)
        h = build_effective_hamiltonian(p, space)
        h_neg = build_effective_hamiltonian(p.with_(phi=wrap_phase(-phi)), space)
        assert abs(perm @ h @ perm.T - h_neg).max() < 1e-14


def test_derive_effective_params():
    assert derive_effective_params(AuxCavityParams(10, -100, 0)) == pytest.approx((1.0, 0.0))
    assert derive_effective_params(AuxCavityParams(1, 0, 1)) == pytest.approx((0.0, 1.0))
    chi, ge = derive_effective_params(AuxCavityParams(3, -60, 1))
    assert chi == pytest.approx(9 * 60 / 3601, rel=1e-14)
    assert ge == pytest.approx(9 / 3601, rel=1e-14)
    with pytest.raises(ValueError):
        derive_effective_params(AuxCavityParams(1, 0, 0))


def test_dispersive_warning():
    with pytest.warns(RuntimeWarning, match="not dispersive"):
        assert not AuxCavityParams(3, -9, 1).check_dispersive()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert AuxCavityParams(3, -60, 1).check_dispersive()


def test_full_hamiltonian_properties():
    space2 = TwoModeSpace(2, 2)
    p = SystemParams(delta_a=3, omega=0, phi=0.4)
    aux = AuxCavityParams(1.5, -7, 1)
    h = build_full_hamiltonian(p, aux, space2)
    assert is_hermitian(h)
    ops = space2.operators()
    total = sum(o.conj().T @ o for o in ops.values())
    assert abs(h @ total - total @ h).max() < 1e-12


def test_full_hamiltonian_reduces_without_aux_coupling():
    p = SystemParams(delta_a=3.3, chi=0, phi=0.4, omega=0.5)
    space2 = TwoModeSpace(3, 2)
    h2 = build_full_hamiltonian(p, AuxCavityParams(0, -7, 1), space2).toarray()
    space = SpaceConfig(3)
    vac_b = [na * 3 * 8 + s for na in range(4) for s in range(8)]  # (n_a, n_b=0, spins)
    h1 = build_effective_hamiltonian(p, space).toarray()
    np.testing.assert_allclose(h2[np.ix_(vac_b, vac_b)], h1, atol=1e-15)


def test_full_model_matches_effective_in_dispersive_regime():
    report = compare_models(SystemParams(delta_a=25), AuxCavityParams(3, -60, 1))
    assert report["dispersive"]
    assert report["rel_dev_n_s"] < 0.10
    assert report["rel_dev_g2_0"] < 0.10


def test_full_model_exact_without_aux_coupling():
    report = compare_models(SystemParams(delta_a=25), AuxCavityParams(0, -60, 1), cavity_cutoff=3, aux_cutoff=1)
    assert report["chi"] == 0 and report["gamma_e"] == 0
    assert report["rel_dev_n_s"] < 1e-10
    assert report["rel_dev_g2_0"] < 1e-10


def test_full_model_warns_when_not_dispersive():
    with pytest.warns(RuntimeWarning):
        report = compare_models(SystemParams(delta_a=25), AuxCavityParams(3, -9, 1), cavity_cutoff=2, aux_cutoff=1)
    assert not report["dispersive"]
    assert math.isfinite(report["rel_dev_g2_0"])
