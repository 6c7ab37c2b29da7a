import math

import numpy as np
import pytest
from scipy.stats import poisson

from photon_bundles.correlations import (
    ObservableRecord,
    antibunched,
    bunched,
    classify,
    compute_record,
    equal_time_observables,
    factorial_moment,
    g1n_zero,
    gn2_tau,
    mean_photon_number,
    normal_moment,
    photon_distribution,
)
from photon_bundles.errors import IncompleteRecord, UndefinedCorrelation
from photon_bundles.hilbert import SpaceConfig
from photon_bundles.lindblad import model_liouvillian, steady_state
from photon_bundles.model import SystemParams

PHI3 = 2 * math.pi / 3


def cavity_state(space, amplitudes):
    """Pure cavity state (x) |ggg> from Fock amplitudes."""
    psi = np.zeros(space.dim, dtype=complex)
    for n, c in enumerate(amplitudes):
        psi[space.encode(n, "ggg")] = c
    return np.outer(psi, psi.conj())


def test_fock_two():
    space = SpaceConfig(4)
    rho = cavity_state(space, [0, 0, 1])
    assert g1n_zero(rho, 2, space) == pytest.approx(0.5, abs=1e-15)
    assert g1n_zero(rho, 3, space) == 0


def test_coherent_state_is_poissonian():
    space = SpaceConfig(20)
    n = np.arange(21)
    amps = np.exp(-0.5) / np.sqrt([math.factorial(k) for k in n])
    rho = cavity_state(space, amps / np.linalg.norm(amps))
    for order in (2, 3, 4):
        assert g1n_zero(rho, order, space) == pytest.approx(1.0, abs=1e-6)


def test_vacuum_and_bad_order():
    space = SpaceConfig(3)
    rho = cavity_state(space, [1])
    with pytest.raises(UndefinedCorrelation):
        g1n_zero(rho, 2, space)
    with pytest.raises(ValueError):
        g1n_zero(cavity_state(space, [0, 1]), 5, space)
    obs = equal_time_observables(rho, space, strict=False)
    assert obs["n_s"] == 0 and math.isnan(obs["g2_0"])


def test_space_inferred_from_shape():
    rho = cavity_state(SpaceConfig(3), [0, 1])
    assert mean_photon_number(rho) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        mean_photon_number(np.eye(5))


def test_photon_distribution_synthetic():
    space = SpaceConfig(5)
    p, pt = photon_distribution(cavity_state(space, [0, 0, 0, 1]), space)
    assert p[3] == pytest.approx(1) and pt[2] == pytest.approx(1)
    p, pt = photon_distribution(cavity_state(space, [1]), space)
    assert p[0] == 1 and pt is None


def test_distribution_without_drive():
    space = SpaceConfig(4)
    ss = steady_state(model_liouvillian(SystemParams(delta_a=5, omega=0), space))
    p, pt = photon_distribution(ss.rho, space)
    assert p[0] == pytest.approx(1, abs=1e-14) and pt is None


@pytest.fixture(scope="module")
def driven_state():
    space = SpaceConfig(8)
    liou = model_liouvillian(SystemParams(delta_a=-21, chi=4.5, phi=PHI3), space)
    return space, liou, steady_state(liou)


def test_moment_consistency(driven_state):
    space, _, ss = driven_state
    p, pt = photon_distribution(ss.rho, space)
    n_s = mean_photon_number(ss.rho, space)
    assert abs(np.dot(np.arange(p.size), p) - n_s) < 1e-12
    assert abs(p.sum() - 1) < 1e-10 and abs(pt.sum() - 1) < 1e-10
    for order in (2, 3, 4):
        from_p = factorial_moment(p, order) / factorial_moment(p, 1) ** order
        assert abs(from_p - g1n_zero(ss.rho, order, space)) < 1e-12 * max(1, from_p)


def test_factorial_moment_poisson():
    q = np.arange(40)
    p = poisson.pmf(q, 1.7)
    assert factorial_moment(p, 3) == pytest.approx(1.7**3, rel=1e-12)


def test_regression_zero_delay_and_long_delay(driven_state):
    space, liou, ss = driven_state
    for n in (1, 2, 3):
        trace = gn2_tau(liou, ss.rho, n, [0.0, 20.0, 40.0], space)
        ref = normal_moment(ss.rho, 2 * n, space) / normal_moment(ss.rho, n, space) ** 2
        assert trace[0] == pytest.approx(ref, rel=1e-10)
        # the slowest decay is atomic (~gamma); eight lifetimes out the trace has factorized
        assert abs(trace[-1] - 1) < 1e-3


def test_regression_errors(driven_state):
    space, liou, ss = driven_state
    with pytest.raises(ValueError):
        gn2_tau(liou, ss.rho, 4, [0, 1], space)
    vac = steady_state(model_liouvillian(SystemParams(omega=0), space))
    with pytest.raises(UndefinedCorrelation):
        gn2_tau(liou, vac.rho, 1, [0, 1], space)


def _record(g2, g3, g4, traces):
    return ObservableRecord(n_s=0.1, g2_0=g2, g3_0=g3, g4_0=g4, p=np.ones(1), p_tilde=None,
                            tau=np.linspace(0, 1, 5), traces={k: np.asarray(v) for k, v in traces.items()})


RISING = [0.13, 0.5, 0.9, 1.0, 1.0]
FALLING = [1.5, 1.2, 1.0, 1.0, 1.0]
FLAT = [1.0] * 5


def test_classify_examples():
    assert classify(_record(0.13, 0.01, 1e-3, {1: RISING, 2: RISING, 3: RISING})) == {"1PB"}
    assert classify(_record(1.21, 2e-4, 1e-6, {1: FALLING, 2: RISING, 3: FALLING})) == {"2PB", "2-bundle"}
    assert classify(_record(1.0, 1.0, 1.0, {1: FLAT, 2: FLAT, 3: FLAT})) == set()
    assert classify(_record(2.1, 3.7, 6e-4, {1: FALLING, 2: FALLING, 3: RISING})) == {"3PB", "3-bundle"}


def test_classify_incomplete():
    with pytest.raises(IncompleteRecord):
        classify(_record(1, 1, 1, {1: FLAT, 2: FLAT}))
    with pytest.raises(IncompleteRecord):
        classify(_record(1, 1, 1, {1: [1.0], 2: [1.0], 3: [1.0]}))


def test_bunching_predicates_use_first_step_and_maximum():
    assert bunched([2.0, 1.5, 1.9])
    assert not bunched([2.0, 1.5, 2.5])
    assert antibunched([0.1, 0.5, 0.2])
    assert not antibunched([0.3, 0.2, 0.9])


def test_compute_record_with_traces():
    rec = compute_record(SystemParams(delta_a=25), SpaceConfig(5), tau_grid=np.linspace(0, 2, 5), bundle_sizes=(1, 2, 3))
    assert rec.g2_0 == pytest.approx(rec.traces[1][0], rel=1e-10)
    assert min(rec.g2_0, rec.g3_0, rec.g4_0) >= 0
    d = rec.as_dict()
    assert set(d["traces"]) == {"g12_tau", "g22_tau", "g32_tau"}
    assert d["params"]["cavity_cutoff"] == 5
    assert "1PB" in classify(rec)
