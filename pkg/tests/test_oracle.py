import math

import numpy as np
import pytest

from bellenergy.families import (
    TETRAHEDRON,
    tight8,
    xxz_elegant_inequality,
    xxz_pauli_couplings,
    xyz_settings,
)
from bellenergy.model import DeterministicStrategy, MeasurementSettings, compile_hamiltonian, evaluate_strategy
from bellenergy.oracle import (
    MAX_STRATEGIES,
    DenseOperator,
    X,
    Y,
    Z,
    dense_bell_operator,
    dense_correlator_operator,
    dense_ground_energy,
    dense_hamiltonian,
    dense_parity_transform_check,
    dense_pauli_chain,
    dense_sector_energies,
    exhaustive_classical_bound,
    jordan_wigner_majoranas,
    product_operator,
    settings_observables,
)
from instances import random_hamiltonian, random_structured

# Heisenberg ring of 8 sites at the isotropic point, couplings 4/sqrt(3) per Pauli pair,
# computed by full diagonalization and frozen here.
HEISENBERG8 = -33.727356199781504


def test_product_operator_ordering():
    # site 0 is the most significant qubit
    op = product_operator(2, {0: Z}).toarray()
    assert np.allclose(np.diag(op), [1, 1, -1, -1])


def test_jordan_wigner_algebra():
    c = jordan_wigner_majoranas(3)
    for a in range(6):
        for b in range(6):
            anti = c[a] @ c[b] + c[b] @ c[a]
            assert np.allclose(anti, 2 * np.eye(8) * (a == b))
    # Z_0 = i c_0 c_1
    assert np.allclose(1j * c[0] @ c[1], product_operator(3, {0: Z}).toarray())


def test_dense_bell_operator_matches_compiled_hamiltonian():
    ineq, s = tight8(), xyz_settings()
    a = dense_bell_operator(ineq, s).toarray()
    b = dense_hamiltonian(compile_hamiltonian(ineq, s)).toarray()
    assert np.allclose(a, b)


def test_heisenberg_golden_value():
    op = dense_pauli_chain(xxz_pauli_couplings(8, 1.0, 0.0))
    assert dense_ground_energy(op) == pytest.approx(HEISENBERG8, abs=1e-9)


def test_elegant_chain_observables_reproduce_pauli_form():
    n, delta, eps = 4, 0.7, 0.3
    ineq = xxz_elegant_inequality(n, delta, eps)
    tet = [sum(v[a] * P for a, P in enumerate((X, Y, Z))) for v in TETRAHEDRON]
    obs = [tet if i % 2 == 0 else [X, Y, Z] for i in range(n)]
    a = dense_correlator_operator(ineq, obs).toarray()
    b = dense_pauli_chain(xxz_pauli_couplings(n, delta, eps)).toarray()
    assert np.allclose(a, b)


def test_lanczos_path_agrees_with_full_solve():
    h = random_hamiltonian(np.random.default_rng(5), 11, 2)
    op = dense_hamiltonian(h)
    lanczos = dense_ground_energy(op)
    full = float(np.linalg.eigvalsh(op.toarray())[0])
    assert lanczos == pytest.approx(full, abs=1e-8)


def test_sector_energies_bracket_ground_energy():
    op = dense_hamiltonian(random_hamiltonian(np.random.default_rng(6), 5, 2))
    sec = dense_sector_energies(op)
    assert min(sec.values()) == pytest.approx(dense_ground_energy(op), abs=1e-10)


def test_caps():
    with pytest.raises(ValueError):
        DenseOperator(np.zeros((2, 2)), 15)
    with pytest.raises(ValueError):
        DenseOperator(np.array([[0, 1], [0, 0]]), 1)
    ineq = random_structured(np.random.default_rng(0), 9, 2, 1)
    assert 8**9 > MAX_STRATEGIES
    with pytest.raises(ValueError):
        exhaustive_classical_bound(ineq)


def test_settings_observables_shape():
    obs = settings_observables(tight8(), MeasurementSettings.uniform((0.0, math.pi / 2)))
    assert len(obs) == 8 and len(obs[0]) == 3
    assert np.allclose(obs[0][0], X) and np.allclose(obs[0][1], Y) and np.allclose(obs[0][2], Z)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_parity_transform(n):
    for seed in range(5):
        res, det = dense_parity_transform_check(n, reflection_count=seed + 1, seed=seed)
        assert res < 1e-9
        assert det == (-1) ** (seed + 1)


def test_diagonal_observables_reproduce_strategy_values():
    """Setting k at site i measured as s[k, i] Z on |0...0>: the dense expectation is the strategy value."""
    rng = np.random.default_rng(8)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        ineq = random_structured(rng, n, 2, min(2, n - 1))
        sc = ineq.scenario
        s = DeterministicStrategy.from_local_states(rng.integers(0, sc.local_states, size=n), sc.rows)
        obs = [[s.values[k, i] * Z for k in range(sc.rows)] for i in range(n)]
        psi = np.zeros(2**n)
        psi[0] = 1
        assert dense_correlator_operator(ineq, obs).expectation(psi) == pytest.approx(
            evaluate_strategy(ineq, s), abs=1e-9)
