import copy
import json

import pytest

import synth
from linv.errors import FixtureError
from linv.fixtures import load_fixture, serialize_problem, validate_arithmetic


def test_load_gross_c2():
    prob = load_fixture(synth.gross_c2_fixture())
    assert prob.d() == 1
    assert prob.d_plus() == 0
    assert prob.f_frob_fixed() == 1
    assert prob.units.rank_units == 0
    assert prob.units.rank_total == 2


def test_validate_arithmetic_gross_c2():
    prob = load_fixture(synth.gross_c2_fixture())
    rep = validate_arithmetic(prob)
    assert rep.ok, rep.lines()


def test_validate_arithmetic_weight1_regular():
    # nontrivial G_p: exercises the Frobenius-equivariance check on E
    prob = load_fixture(synth.weight1_regular_fixture())
    assert prob.d_plus() == 1
    assert prob.f_frob_fixed() == 1
    rep = validate_arithmetic(prob)
    assert rep.ok, rep.lines()


def test_validate_arithmetic_cm_and_adjoint():
    for data in (synth.cm_d4_fixture(), synth.adjoint_cm_fixture()):
        prob = load_fixture(data)
        rep = validate_arithmetic(prob)
        assert rep.ok, rep.lines()


def test_refinement_dim_checked():
    data = synth.weight1_irregular_fixture()
    data = copy.deepcopy(data)
    data["refinements"][0]["basis"] = [[1, 0], [0, 1]]  # dim 2, d+ = 1
    with pytest.raises(FixtureError) as err:
        load_fixture(data)
    assert any("d+" in d for d in err.value.details)


def test_action_composition_failure_names_pair():
    data = copy.deepcopy(synth.gross_c2_fixture())
    data["units"]["action"][1] = [[1, 0], [0, 2]]  # breaks composition
    with pytest.raises(FixtureError) as err:
        load_fixture(data)
    assert any("pair" in d for d in err.value.details)


def test_rank_accounting_failure_reports_both_numbers():
    data = copy.deepcopy(synth.gross_c2_fixture())
    data["units"]["rank_units"] = 1  # R - r now wrong
    with pytest.raises(FixtureError) as err:
        load_fixture(data)
    assert any("[G : G_p]" in d for d in err.value.details)


def test_embedding_ord_mismatch_names_index():
    data = copy.deepcopy(synth.gross_c2_fixture())
    data["units"]["ord_p"] = [1, 1]
    with pytest.raises(FixtureError) as err:
        load_fixture(data)
    assert any("valuation" in d for d in err.value.details)


def test_unit_with_nonzero_ord_rejected():
    data = copy.deepcopy(synth.weight1_regular_fixture())
    # declare the single global unit to have ord 1 (and fix embeddings to match)
    data["units"]["ord_p"][0] = 1
    with pytest.raises(FixtureError):
        load_fixture(data)


def test_non_gp_stable_refinement_rejected():
    data = copy.deepcopy(synth.weight1_regular_fixture())
    data["refinements"][0]["basis"] = [[1, 1]]  # not a Frobenius eigenline
    with pytest.raises(FixtureError) as err:
        load_fixture(data)
    assert any("stable" in d for d in err.value.details)


def test_missing_key_reported():
    data = copy.deepcopy(synth.gross_c2_fixture())
    del data["units"]
    with pytest.raises(FixtureError):
        load_fixture(data)


def test_logs_fallback_warns():
    data = copy.deepcopy(synth.gross_c2_fixture())
    prob0 = load_fixture(data)
    logs = [x.to_payload() for x in prob0.units.logs_in(prob0.coeff_field)]
    # logs of the E-side basis
    from linv.padic import iwasawa_log
    logs_e = [iwasawa_log(x).to_payload() for x in prob0.units.embeddings]
    del data["units"]["embeddings"]
    data["units"]["logs"] = logs_e
    prob = load_fixture(data)
    rep = validate_arithmetic(prob)
    assert rep.ok
    assert any("unverifiable" in w for w in rep.warnings)


def test_roundtrip_serialization():
    for data in (synth.gross_c2_fixture(), synth.weight1_regular_fixture(),
                 synth.cm_d4_fixture()):
        prob = load_fixture(data)
        out = serialize_problem(prob)
        prob2 = load_fixture(json.dumps(out))
        assert prob2.group.mult == prob.group.mult
        assert prob2.units.ord_p == prob.units.ord_p
        for a, b in zip(prob.units.embeddings, prob2.units.embeddings):
            assert a.agrees_with(b)
        for ma, mb in zip(prob.W.matrices, prob2.W.matrices):
            for ra, rb in zip(ma.rows, mb.rows):
                for xa, xb in zip(ra, rb):
                    assert xa.agrees_with(xb)


def test_precision_override_truncates():
    prob = load_fixture(synth.gross_c2_fixture(N=40), precision_override=20)
    assert prob.precision == 20
    assert prob.coeff_field.precision == 20


def test_frobenius_equivariance_violation_detected():
    # corrupt one embedding of a fixture with a nontrivial decomposition
    # group: the arithmetic report must flag the equivariance failure
    import copy

    from linv.padic import make_field

    data = copy.deepcopy(synth.weight1_regular_fixture())
    prob0 = load_fixture(data)
    E = prob0.field_E
    import random as _random
    bad = E.random_unit(_random.Random(99))
    # replace a unit-direction embedding (ord 0 stays consistent)
    idx = 0
    assert prob0.units.ord_p[idx] == 0
    data["units"]["embeddings"][idx] = bad.to_payload()
    prob = load_fixture(data)
    rep = validate_arithmetic(prob)
    assert not rep.ok
    assert any("equivari" in n and not ok for n, ok, _ in rep.items)
