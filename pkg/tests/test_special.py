import random
from fractions import Fraction

import pytest

import synth
from linv.engine import Pipeline, Refinement, dual_l_invariant, l_invariant
from linv.errors import LinvError, PrecisionError, SingularRefinementError
from linv.fixtures import load_fixture
from linv.linalg import PMatrix
from linv.padic import make_field, sqrt
from linv.special import (
    INFINITY,
    AdjointCMData,
    CMData,
    adjoint_cm_family_value,
    adjoint_cm_l_invariant,
    adjoint_cm_matrices,
    cm_char_l_invariant,
    cm_line_l_invariant,
    cm_slope,
    family_xi,
    gross_regulator,
    weight1_l_invariant,
)


F = make_field(5, 1, None, 30)


def rnd_units(rng, n, field=F):
    return [field.random_unit(rng) for _ in range(n)]


# -- slopes ---------------------------------------------------------------------

def test_cm_slope_inverse_unit():
    # tau(eps) = eps^-1 means log tau(eps) = -log eps: slope 1
    prob = load_fixture(synth.cm_d4_fixture())
    L = prob.coeff_field
    U = prob.units
    # the first global unit direction v: tau swaps the two coset values, so
    # build an artificial vector and its tau image instead
    vec = [L.zero()] * U.rank_total
    vec[0] = L.one()
    slope = cm_slope(prob, vec, tau_image=[-x for x in vec])
    assert slope.agrees_with(L.one())
    slope2 = cm_slope(prob, vec, tau_image=vec)
    assert slope2.agrees_with(L.from_int(-1))


def test_cm_slope_synthetic_ratio():
    prob = load_fixture(synth.cm_d4_fixture())
    L = prob.coeff_field
    U = prob.units
    e0 = [L.one()] + [L.zero()] * (U.rank_total - 1)
    e1 = [L.zero(), L.one()] + [L.zero()] * (U.rank_total - 2)
    a, b = U.log_of(e0, L), U.log_of(e1, L)
    got = cm_slope(prob, e0, tau_image=e1)
    assert got.agrees_with(-(a / b))


# -- character L-invariants --------------------------------------------------------

def test_cm_char_l_invariant_substitution():
    # synthetic (log tau u, log u, S-bar, ord tau u) = (a, b, c, 1) -> -(a + c b)
    prob = load_fixture(synth.cm_d4_fixture())
    data = CMData.from_problem(prob)  # runs both routes internally
    assert data.S_psi.is_certified_nonzero()
    assert data.L_psi.is_certified_nonzero()


def test_cm_char_two_routes_agree_random():
    # route equivalence is asserted inside cm_char_l_invariant when eps is
    # supplied; exercise it across seeds
    for seed in range(3):
        prob = load_fixture(synth.cm_d4_fixture(seed=seed))
        CMData.from_problem(prob)


def test_cm_char_pre_normalized_case():
    # if log u = 0 the formula reduces to -log(tau u)/ord(tau u); feed
    # scalars directly through a fake two-element module
    prob = load_fixture(synth.gross_c2_fixture())
    L = prob.coeff_field
    U = prob.units
    # basis index 0 carries ord 1, index 1 is a unit direction
    u = [L.zero(), L.one()]
    tau_u = [L.one(), L.zero()]
    val = cm_char_l_invariant(prob, u, tau_u=tau_u, slope_bar=L.zero())
    logs = U.logs_in(L)
    expected = -(logs[0] / U.ords_in(L)[0])
    assert val.agrees_with(expected)


# -- CM line formula -----------------------------------------------------------------

def test_cm_line_at_zero_and_infinity():
    prob = load_fixture(synth.cm_d4_fixture())
    data = CMData.from_problem(prob)
    L = prob.coeff_field
    assert cm_line_l_invariant(L.zero(), data).agrees_with(data.L_psi)
    assert cm_line_l_invariant(INFINITY, data).agrees_with(data.L_psibar)


def test_cm_line_singular_at_slope():
    prob = load_fixture(synth.cm_d4_fixture())
    data = CMData.from_problem(prob)
    with pytest.raises(SingularRefinementError):
        cm_line_l_invariant(data.S_psi, data)


def test_cm_line_matches_engine_sweep():
    prob = load_fixture(synth.cm_d4_fixture())
    data = CMData.from_problem(prob)
    pipe = Pipeline(prob)
    L = prob.coeff_field
    for s_int in [0, 1, 2, 3, 7, -1, -4]:
        s = L.from_int(s_int)
        ref = Refinement.line(prob, s)
        closed = cm_line_l_invariant(s, data)
        report = pipe.l_invariant(ref)
        assert report.value.agrees_with(closed, digits=25), s_int
    # infinity too
    ref = Refinement.line(prob, None)
    closed = cm_line_l_invariant(INFINITY, data)
    assert pipe.l_invariant(ref).value.agrees_with(closed, digits=25)


def test_cm_engine_singular_verdict_at_slope():
    prob = load_fixture(synth.cm_d4_fixture())
    data = CMData.from_problem(prob)
    pipe = Pipeline(prob)
    ref = Refinement.line(prob, data.S_psi)
    assert not pipe.is_regular(ref).regular


def test_w_circle_is_slope_line():
    # the annihilator line has basis e1 + S_psi e2
    prob = load_fixture(synth.cm_d4_fixture())
    data = CMData.from_problem(prob)
    pipe = Pipeline(prob)
    wc = pipe.w_circle()
    assert len(wc) == 1
    v = wc[0]
    # proportional to (1, S_psi)
    lhs = v[1] * F_one(prob)
    assert (v[1] / v[0]).agrees_with(data.S_psi)


def F_one(prob):
    return prob.coeff_field.one()


# -- adjoint CM -------------------------------------------------------------------------

def test_adjoint_cm_special_values_and_t_independence():
    prob = load_fixture(synth.adjoint_cm_s3_fixture())
    data = AdjointCMData.from_problem(prob)
    L = prob.coeff_field
    two = L.from_int(2)
    v0 = adjoint_cm_l_invariant(L.zero(), L.zero(), data)
    assert v0.agrees_with(two * data.L_gp * data.L_phi)
    vinf = adjoint_cm_l_invariant(INFINITY, L.zero(), data)
    assert vinf.agrees_with(two * data.L_gp * data.L_phibar)
    s = L.from_int(3)
    vals = [adjoint_cm_l_invariant(s, L.from_int(t), data) for t in range(-3, 4)]
    for v in vals[1:]:
        assert v.agrees_with(vals[0])


def test_adjoint_cm_singular_at_slope():
    prob = load_fixture(synth.adjoint_cm_s3_fixture())
    data = AdjointCMData.from_problem(prob)
    with pytest.raises(SingularRefinementError):
        adjoint_cm_l_invariant(data.S_phi, data.L_gp.field.zero(), data)


def test_adjoint_cm_matches_engine():
    for fixture in (synth.adjoint_cm_fixture(), synth.adjoint_cm_s3_fixture()):
        prob = load_fixture(fixture)
        data = AdjointCMData.from_problem(prob)
        pipe = Pipeline(prob)
        L = prob.coeff_field
        for (s_int, t_int) in [(0, 0), (2, 0), (3, 1), (-2, 2)]:
            s, t = L.from_int(s_int), L.from_int(t_int)
            vec = [t, L.one(), s]
            report = pipe.l_invariant(Refinement([vec], f"s={s_int},t={t_int}"))
            closed = adjoint_cm_l_invariant(s, t, data)
            assert report.value.agrees_with(closed, digits=25), (s_int, t_int)
        # infinity: W+ = <t w1 + w3>
        t = L.from_int(1)
        report = pipe.l_invariant(Refinement([[t, L.zero(), L.one()]], "inf"))
        closed = adjoint_cm_l_invariant(INFINITY, t, data)
        assert report.value.agrees_with(closed, digits=25)


def test_adjoint_cm_dual_route_sign_relation():
    # e = 2: dual determinant equals (+1) times the engine value
    prob = load_fixture(synth.adjoint_cm_s3_fixture())
    data = AdjointCMData.from_problem(prob)
    pipe = Pipeline(prob)
    L = prob.coeff_field
    s, t = L.from_int(2), L.from_int(1)
    Jf, Jc = adjoint_cm_matrices(s, t, data)
    dual = dual_l_invariant(Jf, Jc, e=2)
    report = pipe.l_invariant(Refinement([[t, L.one(), s]], "x"))
    assert dual.agrees_with(report.value, digits=25)


def test_f_family_value_and_xi_route():
    # synthetic scalars chosen so that xi exists in the field
    L = make_field(5, 1, None, 30)
    rng = random.Random(71)
    for _ in range(6):
        L_gp, S_phi, L_phi, L_phibar = (L.random_unit(rng) for _ in range(4))
        S_phibar = S_phi.inverse()
        data = AdjointCMData(L_gp, S_phi, S_phibar, L_phi, L_phibar)
        try:
            data.check_generic()
            xi = family_xi(data)
        except (PrecisionError, LinvError):
            continue
        fam = adjoint_cm_family_value(data)
        xi_inv = xi.inverse()
        s = -(xi_inv * xi_inv)
        for t in (-xi_inv, xi_inv):
            val = adjoint_cm_l_invariant(s, t, data)
            assert val.agrees_with(fam, digits=20)
        # phi <-> phibar symmetry
        swapped = AdjointCMData(L_gp, S_phibar, S_phi, L_phibar, L_phi)
        assert adjoint_cm_family_value(swapped).agrees_with(fam, digits=20)
        return
    pytest.skip("no seed produced a square xi (unlucky draw)")


# -- weight-one formulas -------------------------------------------------------------

def test_weight1_substitutions():
    L = make_field(5, 1, None, 30)
    rng = random.Random(11)
    le_a, le_b, lu_b = (L.random_unit(rng) for _ in range(3))
    # log u_alpha = 0 and ord u_alpha = 1: value log eps_a log u_b / log eps_b
    val = weight1_l_invariant("regular", {
        "log_eps_alpha": le_a, "log_eps_beta": le_b,
        "log_u_alpha": L.zero(), "log_u_beta": lu_b,
        "ord_u_alpha": L.one()})
    assert val.agrees_with(le_a * lu_b / le_b)
    # antisymmetry: eps_a = eps_b, u_a = u_b gives 0
    u = L.random_unit(rng)
    val = weight1_l_invariant("regular", {
        "log_eps_alpha": le_a, "log_eps_beta": le_a,
        "log_u_alpha": u, "log_u_beta": u, "ord_u_alpha": L.one()})
    assert val.is_zero_to_precision() or val.is_exact_zero()


def test_weight1_regular_matches_engine():
    prob = load_fixture(synth.weight1_regular_fixture())
    pipe = Pipeline(prob)
    L = prob.coeff_field
    ref = Refinement.named(prob, "w_beta")
    report = pipe.l_invariant(ref)
    # scalars from the pipeline's own homs evaluated at the eigenbasis
    kappa = pipe.kappas[0]
    kappa_primes, _ = pipe.kappa_prime_basis(ref)
    kp = kappa_primes[0]
    e_alpha = [L.one(), L.zero()]  # Frobenius eigenvalue 1
    e_beta = [L.zero(), L.one()]
    scalars = {
        "log_eps_alpha": pipe.log_hom(kappa, e_alpha),
        "log_eps_beta": pipe.log_hom(kappa, e_beta),
        "log_u_alpha": pipe.log_hom(kp, e_alpha),
        "log_u_beta": pipe.log_hom(kp, e_beta),
        "ord_u_alpha": pipe.ord_hom(kp, e_alpha),
    }
    closed = weight1_l_invariant("regular", scalars)
    assert closed.agrees_with(report.value, digits=25)


def test_weight1_irregular_matches_engine():
    prob = load_fixture(synth.weight1_irregular_fixture())
    pipe = Pipeline(prob)
    L = prob.coeff_field
    ref = Refinement.named(prob, "s=1")
    report = pipe.l_invariant(ref)
    kappa = pipe.kappas[0]
    kappa_primes, _ = pipe.kappa_prime_basis(ref)
    kp = kappa_primes[0]
    w_plus = ref.basis[0]
    # complete with a vector outside W+ (the engine's default is e1)
    w_minus = [L.one(), L.zero()]
    scalars = {
        "log_eps_plus": pipe.log_hom(kappa, w_plus),
        "log_eps_minus": pipe.log_hom(kappa, w_minus),
        "log_u_plus": pipe.log_hom(kp, w_plus),
        "log_u_minus": pipe.log_hom(kp, w_minus),
        "ord_u_minus": pipe.ord_hom(kp, w_minus),
    }
    # ord(u_plus) = 0 by the kernel condition
    assert pipe.ord_hom(kp, w_plus).is_zero_to_precision() \
        or pipe.ord_hom(kp, w_plus).is_exact_zero()
    closed = weight1_l_invariant("irregular", scalars)
    assert closed.agrees_with(report.value, digits=25)


# -- Gross regulator -----------------------------------------------------------------

def test_gross_requires_dplus_zero():
    prob = load_fixture(synth.weight1_regular_fixture())
    with pytest.raises(LinvError):
        gross_regulator(prob)


def test_gross_engine_sign_relation():
    # L(V, D) = (-1)^e R_p on every d+ = 0 fixture
    for data in (synth.gross_c2_fixture(), synth.gross_c4_fixture(),
                 synth.gross_c2_fixture(seed=5), synth.gross_c4_fixture(seed=9)):
        prob = load_fixture(data)
        rp = gross_regulator(prob)
        report = l_invariant(prob, Refinement.named(prob, "default"))
        expected = rp if report.e % 2 == 0 else -rp
        assert report.value.agrees_with(expected, digits=25)


def test_gross_e_zero_is_one():
    prob = load_fixture(synth.gross_c4_fixture(frob_idx=2))
    rp = gross_regulator(prob)
    assert rp.agrees_with(prob.coeff_field.one())


def test_idempotent_recipe_computes_isotypic_components():
    # d+ = e = f = 1 with W+ the beta-eigenline of Frobenius: applying the
    # group-algebra idempotents  sum beta^-i Frob^i  and  sum Frob^i  to the
    # isotypic projection of a Minkowski-style unit (resp. a generic p-unit)
    # produces the Frobenius eigencomponents of the unit-valued (resp.
    # p-unit-valued) equivariant hom evaluated on the eigenbasis.  Each
    # output is proportional to the corresponding hom value; assembling the
    # determinant formula additionally needs the bases made coherent, which
    # is the engine's completion step.
    import synth as _synth
    from linv.galois import apply_idempotent

    prob = load_fixture(_synth.w1_dihedral_fixture())
    L = prob.coeff_field
    U = prob.units
    W = prob.W
    g = prob.group
    pipe = Pipeline(prob)
    ref = Refinement.named(prob, "w_beta")

    rng = random.Random(8)
    r, R = U.rank_units, U.rank_total
    eps0 = [L.from_int(rng.randint(1, 5)) for _ in range(r)] \
        + [L.zero()] * (R - r)
    u0 = [L.zero()] * r + [L.from_int(rng.randint(1, 5)) for _ in range(R - r)]

    beta = L.from_int(-1)  # Frobenius acts on W+ by -1

    def recipe(v):
        iso = apply_idempotent("isotypic", v, U.action, g, rep=W)
        plus = apply_idempotent("w_plus", iso, U.action, g, beta=beta)
        one = apply_idempotent("w_one", iso, U.action, g)
        return plus, one

    eps_plus, eps_minus = recipe(eps0)
    u_plus, u_minus = recipe(u0)

    # genuine Frobenius eigenvectors
    fr = g.frobenius
    for vec, lam in [(eps_plus, beta), (u_plus, beta),
                     (eps_minus, L.one()), (u_minus, L.one())]:
        assert any(x.is_certified_nonzero() for x in vec)
        img = U.act(fr, vec)
        for a, b in zip(img, vec):
            assert a.agrees_with(lam * b, digits=20)

    # each output is proportional to the corresponding hom value on the
    # Frobenius eigenbasis (w+, w-) -- the isotypic components themselves
    kappa = pipe.kappas[0]
    kp = pipe.kappa_prime_basis(ref)[0][0]
    w_plus_vec = ref.basis[0]
    w_minus_vec = [L.one(), L.one()]

    def proportional(u, v):
        ratio = None
        for a, b in zip(u, v):
            if b.is_certified_nonzero():
                ratio = a / b
                break
        assert ratio is not None and ratio.is_certified_nonzero()
        for a, b in zip(u, v):
            diff = a - ratio * b
            assert diff.is_zero_to_precision() or diff.is_exact_zero()
        return ratio

    proportional(eps_plus, kappa.apply(w_plus_vec))
    proportional(eps_minus, kappa.apply(w_minus_vec))
    proportional(u_plus, kp.apply(w_plus_vec))
    proportional(u_minus, kp.apply(w_minus_vec))

    # the unit-side recipe values are global units (valuation-free), the
    # p-unit side supplies the nonzero ord entry of the formula
    assert U.ord_of(eps_plus, L).is_zero_to_precision() \
        or U.ord_of(eps_plus, L).is_exact_zero()
    assert U.ord_of(u_minus, L).is_certified_nonzero()


def test_explicit_kappa_prime_line_construction():
    # the explicit kernel element for the CM line: kappa'_s(e1) =
    # u-circle(psi) minus s times tau(u-circle(psi-bar)), with the u-circles
    # normalized by log = 0 and ord(tau u-circle) = 1; it satisfies the
    # ord-vanishing condition on W+ and reproduces the engine value through
    # a basis override
    import synth as _synth
    from linv.engine import BasesOverride
    from linv.linalg import PMatrix
    from linv.special import _char_unit_and_punit, _conjugate_char, _parse_char

    prob = load_fixture(_synth.cm_d4_fixture())
    L = prob.coeff_field
    U = prob.units
    g = prob.group
    tau = g.conjugation
    pipe = Pipeline(prob)
    data = CMData.from_problem(prob)

    block = prob.special["cm"]
    sub, psi = _parse_char(prob, block, "psi")
    psibar = _conjugate_char(prob, sub, psi)

    def u_circle(vals):
        eps, u = _char_unit_and_punit(prob, sub, vals)
        log_eps = U.log_of(eps, L)
        log_u = U.log_of(u, L)
        uc = [log_eps * a - log_u * b for a, b in zip(u, eps)]
        # normalize ord(tau(uc)) = 1
        scale = U.ord_of(U.act(tau, uc), L).inverse()
        uc = [scale * x for x in uc]
        assert U.log_of(uc, L).is_zero_to_precision()
        assert U.ord_of(U.act(tau, uc), L).agrees_with(L.one())
        return uc

    uc_psi = u_circle(psi)
    uc_psibar = u_circle(psibar)

    s = L.from_int(3)
    val_e1 = [a - s * b for a, b in zip(uc_psi, U.act(tau, uc_psibar))]
    val_e2 = U.act(tau, val_e1)
    kp_mat = PMatrix(L, [[val_e1[i], val_e2[i]] for i in range(U.rank_total)])

    # it lies in the kernel of the ord-restriction map on W+ = <e1 + s e2>
    w_plus = [L.one(), s]
    assert U.ord_of(kp_mat.apply(w_plus), L).is_zero_to_precision()

    # equivariance residual vanishes
    for gg in range(g.order):
        lhs = prob.units.action[gg] * kp_mat
        rhs = kp_mat * prob.W.matrix(gg)
        diff = lhs - rhs
        assert all(x.is_zero_to_precision() or x.is_exact_zero()
                   for row in diff.rows for x in row)

    ref = Refinement([w_plus], "s=3")
    default_value = pipe.l_invariant(ref).value
    override = BasesOverride(kappa_primes=[kp_mat])
    value = pipe.l_invariant(ref, bases=override).value
    assert value.agrees_with(default_value, digits=30)
    assert value.agrees_with(cm_line_l_invariant(s, data), digits=30)
