import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellenergy.families import tight8, xyz_settings
from bellenergy.fermion import (
    MajoranaMatrix,
    assemble_majorana,
    canonical_form,
    ground_energy,
    sector_energy,
    violation,
    williamson,
)
from bellenergy.model import OBC, PBC, SpinHamiltonian, compile_hamiltonian
from bellenergy.oracle import dense_hamiltonian, dense_sector_energies
from instances import random_hamiltonian


def williamson_residual(H):
    form = williamson(MajoranaMatrix(H))
    O = form.O
    return max(
        np.abs(O.T @ H @ O - form.J()).max(),
        np.abs(O.T @ O - np.eye(len(H))).max(),
    ), form


def random_antisymmetric(rng, N):
    A = rng.normal(size=(N, N))
    return A - A.T


def test_majorana_matrix_is_antisymmetric_and_parity_dependent():
    h = random_hamiltonian(np.random.default_rng(0), 4, 2)
    Hp = assemble_majorana(h, 1).H
    Hm = assemble_majorana(h, -1).H
    assert np.allclose(Hp, -Hp.T) and np.allclose(Hm, -Hm.T)
    assert not np.allclose(Hp, Hm)
    with pytest.raises(ValueError):
        assemble_majorana(h, 0)


def test_williamson_generic():
    rng = np.random.default_rng(1)
    for N in (2, 4, 8, 20):
        res, form = williamson_residual(random_antisymmetric(rng, N))
        assert res < 1e-10
        assert form.detO in (1, -1)


def test_williamson_rejects_symmetric():
    with pytest.raises(ValueError):
        williamson(MajoranaMatrix(np.eye(4)))


def test_williamson_zero_and_empty():
    res, form = williamson_residual(np.zeros((6, 6)))
    assert res == 0 and np.all(form.eps == 0)
    assert williamson(MajoranaMatrix(np.zeros((0, 0)))).eps.size == 0


def test_williamson_degenerate_blocks():
    rng = np.random.default_rng(2)
    for copies in (2, 3, 5):
        B = random_antisymmetric(rng, 4)
        H = np.kron(np.eye(copies), B)
        Q, _ = np.linalg.qr(rng.normal(size=H.shape))
        res, _ = williamson_residual(Q @ H @ Q.T)
        assert res < 1e-8


def test_sector_energy_flips_weakest_mode():
    e, s, corrected, zero = sector_energy([3.0, 1.0, -2.0], 1, 1, 1e-12)
    # unconstrained signs (-1, -1, +1) have product +1: already in sector +1
    assert e == -6 and not corrected
    e, s, corrected, zero = sector_energy([3.0, 1.0, -2.0], 1, -1, 1e-12)
    assert e == -4 and corrected and s.tolist() == [-1, 1, 1]
    e, _, corrected, zero = sector_energy([3.0, 0.0], 1, -1, 1e-12)
    assert e == -3 and zero and not corrected


def test_tight8_sectors():
    rep = ground_energy(compile_hamiltonian(tight8(), xyz_settings()))
    s2 = math.sqrt(2)
    assert rep.e0_per_parity[-1] == pytest.approx(-16 - 8 * s2, abs=1e-9)
    assert rep.e0_per_parity[1] == pytest.approx(
        -8 * (s2 + 2 * math.cos(math.pi / 8) + 2 * math.sin(math.pi / 8)), abs=1e-9)
    assert violation(tight8(), xyz_settings()) == pytest.approx(-0.2187, abs=1e-3)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 8), R=st.integers(1, 3),
       boundary=st.sampled_from([OBC, PBC]))
def test_free_fermion_equals_dense_per_sector(seed, n, R, boundary):
    R = min(R, n - 1)
    h = random_hamiltonian(np.random.default_rng(seed), n, R, boundary)
    rep = ground_energy(h)
    dense = dense_sector_energies(dense_hamiltonian(h))
    for p in (1, -1):
        assert rep.e0_per_parity[p] == pytest.approx(dense[p], abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(1, 12))
def test_williamson_residual_property(seed, N):
    res, form = williamson_residual(random_antisymmetric(np.random.default_rng(seed), 2 * N))
    assert res < 1e-9
    assert np.all(form.eps >= 0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6))
def test_diagonal_hamiltonian_is_a_product_state(seed, n):
    """Only Z terms: the ground energy is -sum |t_i| and lives in the sector of prod(-sign t_i)."""
    t = np.random.default_rng(seed).normal(size=n)
    h = SpinHamiltonian(n, 1, PBC, t, np.zeros((n, 1, 2, 2)))
    rep = ground_energy(h)
    p = int(np.prod(-np.sign(t)))
    assert rep.e0_per_parity[p] == pytest.approx(-np.abs(t).sum(), abs=1e-10)
    assert rep.e0 == pytest.approx(-np.abs(t).sum(), abs=1e-10)


def test_canonical_form_layout():
    J = canonical_form([1.0, 2.0])
    assert J[0, 1] == 1 and J[1, 0] == -1 and J[2, 3] == 2 and J[3, 2] == -2
