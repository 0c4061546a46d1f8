import random
from fractions import Fraction

import pytest

import synth
from linv.engine import (
    BasesOverride,
    Pipeline,
    Refinement,
    dual_l_invariant,
    l_invariant,
    w_circle,
)
from linv.errors import PrecisionError, SingularRefinementError
from linv.fixtures import load_fixture
from linv.linalg import PMatrix
from linv.padic import iwasawa_log, embed


def get(problem_data):
    return load_fixture(problem_data)


# -- W-circle -------------------------------------------------------------------

def test_w_circle_full_when_no_units():
    prob = get(synth.gross_c2_fixture())
    basis = w_circle(prob)
    assert len(basis) == prob.d()  # d+ = 0: no conditions


def test_w_circle_general_position_dim():
    # random synthetic fixtures: dim W-circle = d - d+
    for seed in range(4):
        prob = get(synth.weight1_irregular_fixture(seed=seed))
        basis = w_circle(prob)
        assert len(basis) == prob.d() - prob.d_plus()


# -- regulator and regularity ------------------------------------------------------

def test_regulator_empty_when_dplus_zero():
    prob = get(synth.gross_c2_fixture())
    pipe = Pipeline(prob)
    ref = Refinement.named(prob, "default")
    assert pipe.regulator(ref).agrees_with(prob.coeff_field.one())
    assert pipe.is_regular(ref).regular  # W+ = 0 automatically regular


def test_regulator_1x1_is_log_kappa():
    prob = get(synth.weight1_irregular_fixture())
    pipe = Pipeline(prob)
    ref = Refinement.named(prob, "s=1")
    reg = pipe.regulator(ref)
    kappa = pipe.kappas[0]
    direct = pipe.log_hom(kappa, ref.basis[0])
    assert reg.agrees_with(direct)


def test_singular_locus_is_w_circle_line():
    prob = get(synth.weight1_irregular_fixture())
    pipe = Pipeline(prob)
    wc = pipe.w_circle()
    assert len(wc) == 1
    singular = Refinement([wc[0]], "w_circle_line")
    verdict = pipe.is_regular(singular)
    assert not verdict.regular
    with pytest.raises(SingularRefinementError):
        pipe.l_invariant(singular)


def test_regularity_criteria_agree_on_random_refinements():
    rng = random.Random(999)
    prob = get(synth.weight1_irregular_fixture())
    pipe = Pipeline(prob)
    L = prob.coeff_field
    seen_regular = 0
    for _ in range(30):
        vec = [L.from_int(rng.randint(-6, 6)), L.from_int(rng.randint(-6, 6))]
        if all(x.is_exact_zero() or x.is_zero_to_precision() for x in vec):
            continue
        verdict = pipe.is_regular(Refinement([vec], "rand"))
        # is_regular raises PrecisionError if the two criteria disagree
        seen_regular += bool(verdict.regular)
    assert seen_regular > 0


# -- extra zeros ---------------------------------------------------------------------

def test_extra_zero_weight1_alpha_one():
    prob = get(synth.weight1_regular_fixture())
    pipe = Pipeline(prob)
    ref = Refinement.named(prob, "w_beta")
    e, w_minus, w_minus_one = pipe.extra_zero_order(ref)
    assert e == 1
    assert len(w_minus) == 1
    # the minus-one part of W/W+ is trivial here: frobenius has order 2 and
    # the only -1-eigenline is W+ itself
    assert w_minus_one == []


def test_extra_zero_alpha_not_one_gives_trivial_value():
    prob = get(synth.gross_c4_fixture(frob_idx=2))  # Frobenius acts by -1
    pipe = Pipeline(prob)
    ref = Refinement.named(prob, "default")
    e, _, _ = pipe.extra_zero_order(ref)
    assert e == 0
    report = pipe.l_invariant(ref)
    assert report.e == 0
    assert report.value.agrees_with(prob.coeff_field.one())


def test_extra_zero_adjoint_cm_is_two():
    prob = get(synth.adjoint_cm_fixture())
    pipe = Pipeline(prob)
    e, _, _ = pipe.extra_zero_order(Refinement.named(prob, "theta"))
    assert e == 2


# -- kappa-prime kernel ---------------------------------------------------------------

def test_kernel_dimension_matches_dplus_plus_e():
    for data, refname in [
        (synth.weight1_regular_fixture(), "w_beta"),
        (synth.weight1_irregular_fixture(), "s=1"),
        (synth.adjoint_cm_fixture(), "theta"),
    ]:
        prob = get(data)
        pipe = Pipeline(prob)
        ref = Refinement.named(prob, refname)
        kern, e = pipe.kernel_ord_on_w1plus(ref)
        assert len(kern) == prob.d_plus() + e


def test_kappa_prime_empty_when_e_zero():
    prob = get(synth.gross_c4_fixture(frob_idx=2))
    pipe = Pipeline(prob)
    homs, e = pipe.kappa_prime_basis(Refinement.named(prob, "default"))
    assert e == 0 and homs == []


# -- the main formula -------------------------------------------------------------------

def desk_value_gross_c2(prob):
    """Independent desk evaluation for the C2 Gross fixture:
    L = -(log of the ord-1 embedding - log of the other)."""
    L = prob.coeff_field
    logs = [embed(iwasawa_log(x), L) for x in prob.units.embeddings]
    # kappa'(w) = u_1 - u_2 (tau swaps the two p-unit directions);
    # B- = log(u1) - log(u2), O- = ord1 - ord2 = 1, e = 1
    return -(logs[0] - logs[1])


def test_l_invariant_gross_c2_desk_value():
    prob = get(synth.gross_c2_fixture())
    report = l_invariant(prob, Refinement.named(prob, "default"))
    assert report.e == 1
    expected = desk_value_gross_c2(prob)
    assert report.value.agrees_with(expected, digits=30)
    assert report.value_schur.agrees_with(expected, digits=30)


def test_routes_agree_across_scenarios():
    cases = [
        (synth.gross_c2_fixture(seed=3), "default"),
        (synth.gross_c4_fixture(seed=4), "default"),
        (synth.weight1_regular_fixture(seed=5), "w_beta"),
        (synth.weight1_irregular_fixture(seed=6), "s=1"),
        (synth.adjoint_cm_fixture(seed=7), "theta"),
    ]
    for data, name in cases:
        prob = get(data)
        report = l_invariant(prob, Refinement.named(prob, name))
        assert report.value_block.agrees_with(report.value_schur, digits=25)
        assert report.certified_digits >= 25


def test_basis_independence_overrides():
    rng = random.Random(31337)
    prob = get(synth.adjoint_cm_fixture())
    pipe = Pipeline(prob)
    ref = Refinement.named(prob, "theta")
    base_report = pipe.l_invariant(ref)
    L = prob.coeff_field
    e = base_report.e

    # deterministic pieces to transform
    w1p = pipe.w1_plus_basis(ref)
    _, w_minus, _ = pipe.extra_zero_order(ref)
    kappa_primes, _ = pipe.kappa_prime_basis(ref)
    kappas = pipe.kappas

    for _ in range(8):
        # scale W+ basis (1-dim here), mix w_minus by a random invertible
        # matrix plus W_1^+ parts, rescale kappas, mix kappa-primes and add
        # kappa multiples: all filtration-respecting changes
        def random_invertible():
            while True:
                mm = [[rng.choice([1, 2, -1, 0]) for _ in range(e)]
                      for _ in range(e)]
                if mm[0][0] * mm[1][1] - mm[0][1] * mm[1][0] != 0:
                    return mm

        c = L.from_int(rng.choice([1, 2, 3, -1, -2]))
        new_w_plus = [[c * x for x in ref.basis[0]]]
        m = random_invertible()
        new_w_minus = []
        for i in range(e):
            vec = [L.zero()] * prob.d()
            for j in range(e):
                cij = L.from_int(m[i][j])
                vec = [a + cij * b for a, b in zip(vec, w_minus[j])]
            for wp in w1p:
                cc = L.from_int(rng.randint(-2, 2))
                vec = [a + cc * b for a, b in zip(vec, wp)]
            new_w_minus.append(vec)
        ck = L.from_int(rng.choice([1, 2, -2, 3]))
        new_kappas = [k * ck for k in kappas]
        mix = random_invertible()
        new_kps = []
        for i in range(e):
            acc = PMatrix.zeros(L, prob.units.rank_total, prob.d())
            for j in range(e):
                acc = acc + kappa_primes[j] * L.from_int(mix[i][j])
            acc = acc + kappas[0] * L.from_int(rng.randint(-2, 2))
            new_kps.append(acc)
        override = BasesOverride(w_plus=new_w_plus, w_minus=new_w_minus,
                                 kappas=new_kappas, kappa_primes=new_kps)
        try:
            report = pipe.l_invariant(ref, bases=override)
        except PrecisionError:
            continue
        assert report.value.agrees_with(base_report.value, digits=25)


def test_frobenius_trivial_w_circle_completion_kills_a_minus():
    # Frobenius trivial on W and w_minus chosen inside W-circle: A- = 0 and
    # the formula collapses to (-1)^e det B- / det O-
    prob = get(synth.weight1_irregular_fixture())
    pipe = Pipeline(prob)
    ref = Refinement.named(prob, "s=1")
    wc = pipe.w_circle()
    override = BasesOverride(w_minus=[wc[0]])
    A_plus, A_minus, B_plus, B_minus, O_minus, e, _ = \
        pipe.assemble_matrices(ref, bases=override)
    assert e == 1
    assert all(x.is_zero_to_precision() or x.is_exact_zero()
               for row in A_minus.rows for x in row)
    report = pipe.l_invariant(ref, bases=override)
    short = dual_like = -(linalg_det(B_minus) / linalg_det(O_minus))
    assert report.value.agrees_with(short, digits=25)


def linalg_det(m):
    from linv.linalg import determinant
    return determinant(m)


# -- dual route ---------------------------------------------------------------------

def test_dual_l_invariant_identity_quotient():
    prob = get(synth.gross_c2_fixture())
    L = prob.coeff_field
    rng = random.Random(5)
    m = PMatrix(L, [[L.random_unit(rng), L.zero()], [L.zero(), L.random_unit(rng)]])
    val = dual_l_invariant(m, m)
    assert val.agrees_with(L.one())  # e = 2: (+1) det(identity)


def test_dual_l_invariant_scalar():
    prob = get(synth.gross_c2_fixture())
    L = prob.coeff_field
    a, c = L.from_int(6), L.from_int(2)
    val = dual_l_invariant(PMatrix(L, [[a]]), PMatrix(L, [[c]]))
    assert val.agrees_with(L.from_int(-3))  # e = 1: -a/c


# -- precision stability ----------------------------------------------------------------

def test_precision_stability_double_n():
    lo = get(synth.gross_c2_fixture(N=40, seed=11))
    hi = get(synth.gross_c2_fixture(N=80, seed=11))
    # same seed draws different digits at different N; instead reload the
    # N=80 fixture truncated to 40 and compare against the full N=80 run
    hi_trunc = load_fixture(synth.gross_c2_fixture(N=80, seed=11),
                            precision_override=40)
    r_hi = l_invariant(hi, Refinement.named(hi, "default"))
    r_lo = l_invariant(hi_trunc, Refinement.named(hi_trunc, "default"))
    lifted = synth.lift_to(r_lo.value, r_hi.value.field)
    assert lifted.agrees_with(r_hi.value, digits=min(30, r_lo.certified_digits))


def test_report_payload_roundtrips():
    import json

    prob = get(synth.weight1_regular_fixture())
    report = l_invariant(prob, Refinement.named(prob, "w_beta"))
    payload = report.to_payload()
    assert json.dumps(payload)  # serializable
    assert payload["e"] == 1
    assert payload["dims"]["d_plus"] == 1


def test_engine_over_ramified_coefficient_field():
    # Eisenstein step on the coefficient field: same value, tracked precision
    base_prob = load_fixture(synth.gross_c2_fixture(seed=2))
    base_rep = l_invariant(base_prob, Refinement.named(base_prob, "default"))
    data = synth.gross_c2_fixture(seed=2)
    data["coeff_field"]["eisenstein"] = [-5, 0]  # x^2 - 5 over Q_5
    prob = load_fixture(data)
    rep = l_invariant(prob, Refinement.named(prob, "default"))
    assert rep.certified_digits >= 30
    v = rep.value.normalized()
    assert all(c == 0 for c in v.vec[1:])  # the value lies in Q_5
    from linv.padic import FieldElement
    lifted = FieldElement(base_prob.coeff_field, (v.vec[0],), v.shift,
                          int(v.aprec // prob.coeff_field.e))
    assert lifted.agrees_with(base_rep.value, digits=30)


def test_extra_zero_frobenius_eigen_split_nontrivial():
    # d = 4 with Frobenius of order 2: W/W+ splits as a 2-dim fixed part
    # (e = 2) plus a genuine (-1)-part
    prob = get(synth.four_dim_fixture())
    pipe = Pipeline(prob)
    ref = Refinement.named(prob, "generic")
    e, w_minus, w_minus_one = pipe.extra_zero_order(ref)
    assert e == 2
    assert len(w_minus) == 2
    assert len(w_minus_one) == 1
    L = prob.coeff_field
    # the lifts of W+ and both parts of the quotient splitting fill W
    from linv import linalg
    stacked = [list(v) for v in ref.basis] + [list(v) for v in w_minus] \
        + [list(v) for v in w_minus_one]
    assert linalg.rank(linalg.PMatrix(L, stacked), assume_zeros=True) == 4
    # the minus-one lift really carries Frobenius eigenvalue -1 modulo W+
    frob_mat = prob.W.matrix(prob.group.frobenius)
    v = w_minus_one[0]
    img = frob_mat.apply(v)
    plus_img = [a + b for a, b in zip(img, v)]  # (Frob + 1) v should be in W+
    test_rows = [list(ref.basis[0]), plus_img]
    assert linalg.rank(linalg.PMatrix(L, test_rows), assume_zeros=True) == 1


def test_gross_d4_trace_route_engine_agreement():
    from linv.special import gross_regulator

    prob = get(synth.gross_d4_fixture(seed=1))
    rep = l_invariant(prob, Refinement.named(prob, "default"))
    rp = gross_regulator(prob)
    expected = rp if rep.e % 2 == 0 else -rp
    assert rep.e == 1
    assert rep.value.agrees_with(expected, digits=30)


def stacked_equivariant_homs(prob):
    """Independent oracle for the equivariant Hom space: kernel of the
    equivariance system stacked over every group element (the engine uses
    the averaging projector instead)."""
    from linv import linalg
    from linv.linalg import PMatrix

    L = prob.coeff_field
    W, U, g = prob.W, prob.units, prob.group
    R, d = U.rank_total, W.dim
    n = R * d
    rows = []
    for gg in range(g.order):
        a = U.action[gg]
        b = W.matrix(gg)
        # (A X - X B)[i][j] = sum_k A[i][k] X[k][j] - sum_k X[i][k] B[k][j]
        for i in range(R):
            for j in range(d):
                row = [L.zero()] * n
                for k in range(R):
                    row[j * R + k] = row[j * R + k] + a.rows[i][k]
                for k in range(d):
                    row[k * R + i] = row[k * R + i] - b.rows[k][j]
                rows.append(row)
    kern = linalg.kernel_basis(PMatrix(L, rows), assume_zeros=True)
    out = []
    for vec in kern:
        out.append(PMatrix(L, [[vec[j * R + i] for j in range(d)]
                               for i in range(R)]))
    return out


def test_hom_space_projector_vs_stacked_oracle():
    from linv import linalg
    from linv.linalg import PMatrix

    for data in (synth.gross_c2_fixture(), synth.weight1_regular_fixture(),
                 synth.cm_d4_fixture(), synth.adjoint_cm_fixture()):
        prob = get(data)
        pipe = Pipeline(prob)
        oracle = stacked_equivariant_homs(prob)
        assert len(oracle) == len(pipe.homs_p)
        # identical spans: stacking both families does not raise the rank
        L = prob.coeff_field
        flat = lambda m: [x for row in m.rows for x in row]
        a = [flat(m) for m in pipe.homs_p]
        b = [flat(m) for m in oracle]
        rk_a = linalg.rank(PMatrix(L, a), assume_zeros=True)
        rk_ab = linalg.rank(PMatrix(L, a + b), assume_zeros=True)
        assert rk_a == len(a) == rk_ab


def test_kappa_prime_rotation_changes_basis_not_value():
    prob = get(synth.adjoint_cm_s3_fixture())
    pipe = Pipeline(prob)
    ref = Refinement.named(prob, "theta")
    base = pipe.l_invariant(ref)
    for rot in (1, 2):
        kps, e = pipe.kappa_prime_basis(ref, rotation=rot)
        assert e == 2
        from linv.engine import BasesOverride
        rep = pipe.l_invariant(ref, bases=BasesOverride(kappa_primes=kps))
        assert rep.value.agrees_with(base.value, digits=30)


def test_parallel_refinement_evaluation():
    # the pipeline is a pure function of (problem, refinement): independent
    # refinements evaluate concurrently with no coordination and agree with
    # the sequential results
    from concurrent.futures import ThreadPoolExecutor

    prob = get(synth.cm_d4_fixture())
    pipe = Pipeline(prob)
    L = prob.coeff_field
    refs = [Refinement.line(prob, L.from_int(s)) for s in range(6)]
    sequential = [pipe.l_invariant(r).value for r in refs]
    with ThreadPoolExecutor(max_workers=4) as pool:
        parallel = list(pool.map(lambda r: pipe.l_invariant(r).value, refs))
    for a, b in zip(sequential, parallel):
        assert a.agrees_with(b)
