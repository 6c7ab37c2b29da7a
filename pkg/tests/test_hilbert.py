import numpy as np
import pytest

from photon_bundles.hilbert import (
    SpaceConfig,
    annihilation,
    excitation_number,
    is_hermitian,
    number_operator,
    pauli,
)


def test_dimension_and_roundtrip():
    space = SpaceConfig(5)
    assert space.dim == 48
    for idx in range(space.dim):
        n, spins = space.decode(idx)
        assert space.encode(n, spins) == idx


def test_encode_accepts_letters():
    space = SpaceConfig(3)
    assert space.encode(1, "geg") == space.encode(1, (0, 1, 0)) == 8 + 2


@pytest.mark.parametrize("bad", [0, 2.5, -1])
def test_invalid_cutoff(bad):
    with pytest.raises(ValueError):
        SpaceConfig(bad)


def test_atom_count_fixed():
    with pytest.raises(ValueError):
        SpaceConfig(4, atom_count=2)


def test_annihilation_elements():
    a1 = annihilation(SpaceConfig(1)).toarray()
    assert a1[SpaceConfig(1).encode(0, "ggg"), SpaceConfig(1).encode(1, "ggg")] == 1.0
    space = SpaceConfig(2)
    a2 = annihilation(space).toarray()
    assert a2[space.encode(1, "egg"), space.encode(2, "egg")] == pytest.approx(np.sqrt(2), abs=1e-15)


def test_canonical_commutator_below_edge():
    space = SpaceConfig(4)
    a = annihilation(space)
    comm = (a @ a.conj().T - a.conj().T @ a).toarray()
    below = space.photon_numbers() < space.cavity_cutoff
    np.testing.assert_allclose(comm[np.ix_(below, below)], np.eye(below.sum()), atol=1e-14)


def test_pauli_conventions():
    space = SpaceConfig(1)
    sz1 = pauli(space, 1, "z").toarray()
    assert sz1[space.encode(0, "ggg"), space.encode(0, "ggg")] == -1
    sp2, sm2 = pauli(space, 2, "+"), pauli(space, 2, "-")
    proj = (sp2 @ sm2).toarray()
    np.testing.assert_allclose(proj @ proj, proj)
    # sigma+ raises g -> e
    assert sp2[space.encode(0, "geg"), space.encode(0, "ggg")] == 1
    x1, x2 = pauli(space, 1, "x"), pauli(space, 2, "x")
    assert abs(x1 @ x2 - x2 @ x1).max() == 0
    y = pauli(space, 3, "y")
    np.testing.assert_allclose((y @ y).toarray(), np.eye(space.dim))


def test_pauli_invalid_slot():
    with pytest.raises(ValueError):
        pauli(SpaceConfig(1), 4, "z")


def test_excitation_number_spectrum():
    space = SpaceConfig(4)
    n_op = excitation_number(space)
    assert is_hermitian(n_op)
    diag = n_op.diagonal().real
    assert diag[space.encode(0, "ggg")] == 0
    assert diag[space.encode(1, "geg")] == 2
    assert sorted(set(diag.astype(int))) == list(range(space.cavity_cutoff + 4))
    # same operator assembled from its definition
    a = annihilation(space)
    built = a.conj().T @ a + sum(pauli(space, j, "+") @ pauli(space, j, "-") for j in (1, 2, 3))
    assert abs(built - n_op).max() < 1e-14
    assert abs(number_operator(space) - a.conj().T @ a).max() < 1e-14


def test_no_explicit_zeros():
    space = SpaceConfig(3)
    for op in (annihilation(space), excitation_number(space), pauli(space, 2, "x")):
        assert np.all(np.abs(op.data) > 1e-16)
