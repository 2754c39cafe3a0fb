import json
import math

import numpy as np
import pytest

from bellenergy.families import tight8, xyz_settings
from bellenergy.model import (
    OBC,
    PBC,
    BellInequality,
    BellScenario,
    DeterministicStrategy,
    GeneralTerm,
    MeasurementSettings,
    SpinHamiltonian,
    Term,
    compile_hamiltonian,
    evaluate_strategy,
    inequality_from_dict,
    inequality_to_dict,
    settings_from_dict,
    settings_to_dict,
)


def test_scenario_validation():
    with pytest.raises(ValueError):
        BellScenario(n=1, m=2)
    with pytest.raises(ValueError):
        BellScenario(n=3, m=2, R=3)
    with pytest.raises(ValueError):
        BellScenario(n=3, m=2, boundary="open")
    sc = BellScenario(n=4, m=2, has_z=True)
    assert sc.rows == 3 and sc.z_index == 2 and sc.local_states == 8
    assert BellScenario(n=4, m=3, d=3, has_z=False).local_states == 27


def test_inequality_validation():
    sc = BellScenario(n=3, m=2, R=2, boundary=OBC)
    with pytest.raises(ValueError, match="leaves the chain"):
        BellInequality(sc, (), (Term(2, 1, 0, 0, 1),))
    with pytest.raises(ValueError, match="range"):
        BellInequality(BellScenario(n=3, m=2, R=1), (), (Term(0, 2, 0, 0, 1),))
    with pytest.raises(ValueError, match="has_z"):
        BellInequality(BellScenario(n=4, m=2, R=2, has_z=False), (), (Term(0, 2, 0, 0, 1),))
    with pytest.raises(ValueError, match="d = 2"):
        BellInequality(BellScenario(n=3, m=2, d=3, has_z=False), (), (Term(0, 1, 0, 0, 1),))
    with pytest.raises(ValueError, match="outcome"):
        BellInequality(BellScenario(n=3, m=2, d=3, has_z=False), (), (), (GeneralTerm(0, 0, (0,), 1.0),))
    with pytest.raises(ValueError, match="i = 0"):
        BellInequality(BellScenario(n=3, m=2, ti=True), (0,), (Term(1, 1, 0, 0, 1),))


def test_ti_obc_expansion_skips_terms_past_the_end():
    sc = BellScenario(n=4, m=1, R=2, boundary=OBC, ti=True)
    ineq = BellInequality(sc, (1,), (Term(0, 1, 0, 0, 1), Term(0, 2, 0, 0, 1)))
    ex = ineq.expanded()
    assert len(ex.terms) == 3 + 2
    assert len(list(ineq.factors())) == len(list(ex.factors()))


def test_strategy_encoding_and_evaluation():
    s = DeterministicStrategy.from_local_states([0, 1, 2], rows=2)
    assert s.values.tolist() == [[1, -1, 1], [1, 1, -1]]
    sc = BellScenario(n=3, m=1, R=1, boundary=PBC, has_z=True)
    ineq = BellInequality(sc, (1, 0, 0), (Term(0, 1, 0, 0, 2), Term(2, 1, 0, 0, 3)))
    # Z_0 = 1; A_0 A_1 = -1; A_2 A_0 = 1
    assert evaluate_strategy(ineq, s) == 1 - 2 + 3
    with pytest.raises(ValueError):
        DeterministicStrategy([[1, 0]])


def test_json_round_trip(tmp_path):
    ineq = tight8()
    d = inequality_to_dict(ineq)
    assert inequality_from_dict(json.loads(json.dumps(d))) == ineq
    s = xyz_settings()
    assert settings_from_dict(settings_to_dict(s)) == s
    with pytest.raises(ValueError, match="unknown"):
        inequality_from_dict({**d, "bogus": 1})
    gen = BellInequality(BellScenario(n=3, m=2, d=3, has_z=False), (), (), (GeneralTerm(1, 1, (0, 1), 2.5, (2, 0)),))
    assert inequality_from_dict(inequality_to_dict(gen)) == gen


def test_compile_hamiltonian_planar_product():
    sc = BellScenario(n=3, m=2, R=1, ti=True)
    ineq = BellInequality(sc, (0.5,), (Term(0, 1, 0, 1, 2.0),))
    h = compile_hamiltonian(ineq, MeasurementSettings.uniform((0.0, math.pi / 2)))
    # X on the left, Y on the right: Str_{0,1}
    expect = np.zeros((2, 2))
    expect[0, 1] = 2.0
    assert np.allclose(h.strings[:, 0], expect)
    assert np.allclose(h.one_body, 0.5)
    with pytest.raises(ValueError):
        compile_hamiltonian(ineq, MeasurementSettings.uniform((0.0,)))


def test_hamiltonian_obc_rejects_wrapping_string():
    st = np.zeros((3, 1, 2, 2))
    st[2, 0, 0, 0] = 1
    with pytest.raises(ValueError):
        SpinHamiltonian(3, 1, OBC, np.zeros(3), st)
    assert SpinHamiltonian(3, 1, PBC, np.zeros(3), st).crosses_origin
