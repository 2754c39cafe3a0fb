import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellenergy.classical_dp import (
    TransferTable,
    classical_bound,
    classical_bound_obc,
    classical_bound_pbc,
    classical_bound_ti,
    common_denominator,
    min_plus_identity,
    min_plus_product,
    min_plus_square,
    ring_minima,
    site_tables,
)
from bellenergy.families import chained_inequality, coupling_ring, tight8
from bellenergy.model import OBC, PBC, BellInequality, BellScenario, Term, evaluate_strategy
from bellenergy.oracle import exhaustive_classical_bound
from instances import random_generic, random_structured


def test_min_plus_square_small():
    t = TransferTable(np.array([[1, 5], [2, 3]]), 1)
    sq = min_plus_square(t)
    # (1,1) entry is min(2 + 5, 3 + 3) = 6
    assert sq.table.tolist() == [[2, 6], [3, 6]]
    assert sq.t == 2


def test_min_plus_identity_is_neutral():
    a = np.array([[0, 4, 1], [2, 7, -3], [5, 5, 5]])
    e = min_plus_identity(3)
    assert (min_plus_product(a, e) == a).all()
    assert (min_plus_product(e, a) == a).all()


def test_common_denominator():
    assert common_denominator([1, -2, 3]) == 1
    assert common_denominator([0.3, 1.7, 1]) == 10
    assert common_denominator([1 / 3]) == 3
    assert common_denominator([np.pi]) is None


def test_tight8_bound():
    res = classical_bound(tight8())
    assert res.classical_minimum == -32 and res.beta_c == 32 and res.exact
    assert isinstance(res.beta_c, int)
    assert evaluate_strategy(tight8(), res.witness) == -32
    assert classical_bound_ti(tight8()).beta_c == 32


def test_decimal_weights_are_exact():
    sc = BellScenario(n=4, m=2, R=1, has_z=False)
    ineq = BellInequality(sc, (), tuple(Term(i, 1, 0, 0, 0.3) for i in range(4)))
    res = classical_bound(ineq)
    assert res.exact and res.classical_minimum == pytest.approx(-1.2, abs=0)


def test_irrational_weights_fall_back_to_float():
    ineq = coupling_ring([np.pi, 1.0, -np.e, 0.5])
    res = classical_bound(ineq)
    ex = exhaustive_classical_bound(ineq)
    assert not res.exact
    assert res.classical_minimum == pytest.approx(ex.classical_minimum, abs=1e-12)


def test_obc_matches_exhaustive_and_witness():
    rng = np.random.default_rng(1)
    for _ in range(10):
        ineq = random_structured(rng, 4, 2, 2, boundary=OBC)
        res = classical_bound_obc(ineq)
        ex = exhaustive_classical_bound(ineq)
        assert res.classical_minimum == ex.classical_minimum
        assert (res.witness.values == ex.witness.values).all()


def test_probability_form_d3():
    rng = np.random.default_rng(2)
    for _ in range(10):
        ineq = random_generic(rng, 4, 2, 3, 2)
        assert classical_bound(ineq).classical_minimum == exhaustive_classical_bound(ineq).classical_minimum


def test_ring_minima_batches_pbc():
    rng = np.random.default_rng(3)
    J = rng.integers(-3, 4, size=(5, 6)).astype(float)
    tab = site_tables(coupling_ring([1.0, 0, 0, 0, 0, 0]))[0].astype(float)
    got = ring_minima(J[:, :, None, None] * tab)
    want = [classical_bound_pbc(coupling_ring(j), witness=False).classical_minimum for j in J]
    assert np.allclose(got, want)


def test_ti_period_must_divide_n_and_short_rings_fall_back():
    rng = np.random.default_rng(4)
    ineq = random_structured(rng, 3, 2, 2, ti=True)
    with pytest.raises(ValueError):
        classical_bound_ti(ineq, period=2)
    two = chained_inequality(2, 1, 0.5)
    assert classical_bound_ti(two, period=2).classical_minimum == exhaustive_classical_bound(two).classical_minimum


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 5), m=st.integers(1, 2), R=st.integers(1, 2),
       boundary=st.sampled_from([OBC, PBC]), has_z=st.booleans())
def test_dp_equals_enumeration(seed, n, m, R, boundary, has_z):
    R = min(R, n - 1)
    rng = np.random.default_rng(seed)
    ineq = random_structured(rng, n, m, R, boundary=boundary, has_z=has_z)
    res = classical_bound(ineq)
    ex = exhaustive_classical_bound(ineq)
    assert res.classical_minimum == ex.classical_minimum
    assert evaluate_strategy(ineq, res.witness) == res.classical_minimum
    assert (res.witness.values == ex.witness.values).all()


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 9), R=st.integers(1, 2), scale=st.integers(1, 5))
def test_bound_scales_linearly(seed, n, R, scale):
    ineq = random_structured(np.random.default_rng(seed), n, 2, R)
    base = classical_bound(ineq, witness=False).classical_minimum
    assert classical_bound(ineq.with_gammas(scale), witness=False).classical_minimum == scale * base


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 12), R=st.integers(1, 2), m=st.integers(1, 2))
def test_ti_doubling_equals_generic_ring(seed, n, R, m):
    ineq = random_structured(np.random.default_rng(seed), n, m, R, ti=True)
    assert classical_bound_ti(ineq).classical_minimum == classical_bound_pbc(ineq.expanded()).classical_minimum


def test_chained_four_pairs_at_zero_eps():
    ineq = chained_inequality(2, 4, 0.0)
    assert classical_bound(ineq).classical_minimum == -16
    assert classical_bound_ti(ineq, period=2).classical_minimum == -16
