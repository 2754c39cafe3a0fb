import math

import numpy as np
import pytest

from bellenergy.experiments import (
    SweepSpec,
    format_number,
    gaussian_couplings,
    phase_rows,
    run_chained,
    run_spin_glass,
    run_tight8,
    run_xxz_elegant,
    verify_table2,
    write_csv,
)
from bellenergy.families import (
    chained_settings,
    coupling_ring,
    xxz_classical_minimum,
    xxz_pauli_couplings,
    xxz_region,
)
from bellenergy.fermion import ground_energy
from bellenergy.model import SpinHamiltonian
from bellenergy.oracle import dense_bell_operator, dense_ground_energy, dense_pauli_chain, exhaustive_classical_bound


def test_tight8_report():
    rep = run_tight8()
    assert rep.ok, [c for c in rep.checks if not c.ok]
    assert rep.beta_c == 32


def test_catalogue_named_rows():
    checks = verify_table2(optimize=False)
    assert all(c.ok for c in checks)
    first3 = next(c for c in checks if c.n == 3)
    assert first3.beta_c == 6 and first3.qv == pytest.approx(-2.9282032303, abs=1e-6)
    first4 = next(c for c in checks if c.n == 4)
    assert first4.beta_c == 8 and first4.qv == pytest.approx(8 - 8 * math.sqrt(2), abs=1e-6)
    five = next(c for c in checks if c.n == 5)
    assert five.beta_c == 12 and five.qv == pytest.approx(-0.3107341487, abs=1e-6)


def test_chained_rows():
    rep = run_chained(2, 4, [0.0, 1.0])
    zero, one = rep.rows
    assert zero.violation > 0
    assert one.beta_q_per_site / one.beta_c_per_site == pytest.approx(math.sqrt(2), abs=1e-10)
    for r in rep.rows:
        assert r.beta_c == r.beta_c_formula
        assert r.e0 == pytest.approx(r.e0_numeric, abs=1e-9)
    assert rep.window == pytest.approx((0.327618, 3.05234), abs=1e-4)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec((0.0, 0.0), (1.0,))
    with pytest.raises(ValueError):
        SweepSpec((), (1.0,))
    with pytest.raises(ValueError):
        SweepSpec((0.0,), (1.0,), realizations=0)


def test_gaussian_couplings_deterministic():
    a = gaussian_couplings(1001, 0.5, 2.0, (0, 1, 2, 3))
    b = gaussian_couplings(1001, 0.5, 2.0, (0, 1, 2, 3))
    c = gaussian_couplings(1001, 0.5, 2.0, (0, 1, 2, 4))
    assert a.shape == (1001,) and (a == b).all() and not (a == c).all()
    big = gaussian_couplings(200000, 0.0, 1.0, (9,))
    assert abs(big.mean()) < 0.01 and abs(big.std() - 1) < 0.01


def test_spin_glass_reproducible_and_threads_agree():
    spec = SweepSpec((-1.0, 1.0), (0.5,), n=10, realizations=8, base_seed=7)
    a = run_spin_glass(spec)
    b = run_spin_glass(spec)
    c = run_spin_glass(spec, threads=2)
    assert phase_rows(a) == phase_rows(b) == phase_rows(c)


def test_spin_glass_sign_symmetry():
    spec = SweepSpec((-1.0, 1.0), (0.5,), n=20, realizations=60, base_seed=3)
    neg, pos = run_spin_glass(spec)
    assert abs(neg.ratio - pos.ratio) <= 3 * math.hypot(neg.stderr, pos.stderr)


def test_spin_glass_ratio_matches_brute_force_single_realization():
    spec = SweepSpec((0.3,), (0.8,), n=8, realizations=1, base_seed=11)
    (pt,) = run_spin_glass(spec)
    J = gaussian_couplings(8, 0.3, 0.8, (11, 0, 0, 0))
    ineq = coupling_ring(J)
    beta = exhaustive_classical_bound(ineq).beta_c
    e0 = dense_ground_energy(dense_bell_operator(ineq, chained_settings(2)))
    assert pt.beta_c == pytest.approx(beta, abs=1e-10)
    assert pt.e0 == pytest.approx(e0, abs=1e-8)


def test_xxz_examples():
    assert xxz_classical_minimum(8, 1.0, 0.0) == -48
    assert xxz_region(3.0, 0.5) == "II"
    assert xxz_classical_minimum(8, 3.0, 0.5) == -4 * 8 * 3
    pts = run_xxz_elegant(8, [1.0, 3.0], [0.0, 0.5])
    assert all(p.extra["match"] for p in pts)


def test_xx_point_free_fermion():
    n = 8
    c = xxz_pauli_couplings(n, 0.0, 0.0)
    strings = np.zeros((n, 1, 2, 2))
    strings[:, 0] = c[:, :2, :2]
    ff = ground_energy(SpinHamiltonian(n, 1, "pbc", np.zeros(n), strings)).e0
    assert ff == pytest.approx(dense_ground_energy(dense_pauli_chain(c)), abs=1e-8)


def test_format_number():
    assert format_number(32) == "32"
    assert format_number(32.0) == "32"
    assert format_number(1 / 3) == "0.3333333333"
    assert format_number(-0.21871593700679) == "-0.218715937"
    assert format_number(2.5, digits=1) == "2"
    assert format_number(3.5, digits=1) == "4"


def test_csv_is_deterministic(tmp_path):
    rows = [[1, 0.5], [2, 1 / 3]]
    a = write_csv(tmp_path / "a.csv", ["x", "y"], rows, {"seed": 1})
    b = write_csv(tmp_path / "b.csv", ["x", "y"], rows, {"seed": 1})
    assert a == b == "# seed: 1\nx,y\n1,0.5\n2,0.3333333333\n"
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
