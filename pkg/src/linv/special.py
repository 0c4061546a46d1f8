"""Closed-form evaluations: the Gross regulator (d+ = 0), the weight-one
formulas, the CM line formula, and the adjoint-CM double-zero formula with
its constructed dual matrices.  These serve both as user-facing fast paths
and as independent cross-checks of the main pipeline.

The projective parameter s uses None for the point at infinity; all
infinity handling clears denominators rather than approximating.
"""
from __future__ import annotations

from fractions import Fraction

from . import engine, linalg
from .errors import (
    AmbiguousRankError,
    LinvError,
    OMinusSingularError,
    PrecisionError,
    SingularRefinementError,
)
from .fixtures import parse_element
from .linalg import PMatrix


INFINITY = None  # projective parameter: s is None at the point at infinity


# -- isotypic machinery --------------------------------------------------------------


def isotypic_space(prob, subgroup, char_vals, in_units=False):
    """Basis of {u : g u = char(g) u for g in subgroup} inside the unit
    module, optionally intersected with the global-units subspace."""
    L = prob.coeff_field
    R = prob.units.rank_total
    rows = []
    for g in subgroup:
        m = prob.units.action[g]
        cv = char_vals[g]
        for i in range(R):
            rows.append([m.rows[i][j] - (cv if i == j else L.zero())
                         for j in range(R)])
    if in_units:
        r = prob.units.rank_units
        for i in range(r, R):
            rows.append([L.one() if j == i else L.zero() for j in range(R)])
    return linalg.kernel_basis(PMatrix(L, rows), assume_zeros=True)


def _conjugate_char(prob, subgroup, char_vals):
    """char-bar(g) = char(tau g tau)."""
    tau = prob.group.conjugation
    out = {}
    for g in subgroup:
        out[g] = char_vals[prob.group.mul(prob.group.mul(tau, g), tau)]
    return out


def _char_unit_and_punit(prob, subgroup, char_vals):
    """(eps, u): eps spans the char-isotypic global units; u is a
    char-isotypic p-unit with ord 0 whose tau-image has nonzero ord."""
    L = prob.coeff_field
    U = prob.units
    tau = prob.group.conjugation
    space = isotypic_space(prob, subgroup, char_vals)
    eps_space = isotypic_space(prob, subgroup, char_vals, in_units=True)
    if len(eps_space) != 1:
        raise LinvError(f"character-isotypic unit space has dimension "
                        f"{len(eps_space)}, expected 1")
    eps = eps_space[0]
    ords = [U.ord_of(b, L) for b in space]
    coeffs = linalg.kernel_basis(PMatrix(L, [ords]), assume_zeros=True)
    for c in coeffs:
        x = [L.zero()] * U.rank_total
        for ck, b in zip(c, space):
            if ck.is_exact_zero():
                continue
            x = [a + ck * bi for a, bi in zip(x, b)]
        if linalg.rank(PMatrix(L, [eps, x]), assume_zeros=True) != 2:
            continue
        tx = U.act(tau, x)
        if U.ord_of(tx, L).is_certified_nonzero():
            return eps, x
    raise LinvError("no suitable isotypic p-unit found (need ord 0 with "
                    "tau-image of nonzero ord)")


def _parse_char(prob, block, key):
    L = prob.coeff_field
    sub = [int(g) for g in block["subgroup_K"]]
    raw = block[key]
    vals = {}
    for g in sub:
        v = raw.get(str(g), raw.get(g))
        if v is None:
            raise LinvError(f"character value missing for subgroup element {g}")
        vals[g] = parse_element(L, v)
    return sub, vals


# -- scalar formulas ------------------------------------------------------------------


def cm_slope(prob, eps_psi, tau_image=None):
    """S = -log(eps)/log(tau eps) for a character-isotypic unit."""
    L = prob.coeff_field
    U = prob.units
    if tau_image is None:
        tau_image = U.act(prob.group.conjugation, eps_psi)
    denom = U.log_of(tau_image, L)
    if not denom.is_certified_nonzero():
        raise PrecisionError("slope denominator log(tau eps) vanishes to precision")
    return -(U.log_of(eps_psi, L) / denom)


def cm_char_l_invariant(prob, u_psi, tau_u=None, slope_bar=None, eps_psi=None):
    """Cyclotomic L-invariant of a character from a p-unit in its isotypic
    component: -(log(tau u) + S-bar log(u)) / ord(tau u).

    When eps_psi is supplied the normalized route through
    u-circle = log(eps) u - log(u) eps is evaluated as well and the two are
    asserted to agree.
    """
    L = prob.coeff_field
    U = prob.units
    tau = prob.group.conjugation
    if tau_u is None:
        tau_u = U.act(tau, u_psi)
    if slope_bar is None:
        raise LinvError("cm_char_l_invariant needs the conjugate slope")
    denom = U.ord_of(tau_u, L)
    if not denom.is_certified_nonzero():
        raise PrecisionError("ord(tau u) vanishes: u is not a p-unit of the "
                             "required shape")
    value = -((U.log_of(tau_u, L) + slope_bar * U.log_of(u_psi, L)) / denom)
    if eps_psi is not None:
        log_eps = U.log_of(eps_psi, L)
        log_u = U.log_of(u_psi, L)
        u_circ = [log_eps * a - log_u * b for a, b in zip(u_psi, eps_psi)]
        tau_uc = U.act(tau, u_circ)
        alt = -(U.log_of(tau_uc, L) / U.ord_of(tau_uc, L))
        if not value.agrees_with(alt):
            raise PrecisionError("normalized-u route disagrees with the "
                                 "two-term formula beyond certified precision")
    return value


class CMData:
    """Slopes and character L-invariants for a CM weight-one problem."""

    def __init__(self, S_psi, S_psibar, L_psi, L_psibar, regular=False):
        self.S_psi = S_psi
        self.S_psibar = S_psibar
        self.L_psi = L_psi
        self.L_psibar = L_psibar
        self.regular = regular

    @staticmethod
    def from_problem(prob):
        block = prob.special.get("cm")
        if block is None:
            raise LinvError("fixture carries no special.cm block")
        if "scalars" in block:
            L = prob.coeff_field
            sc = block["scalars"]
            return CMData(parse_element(L, sc["S_psi"]),
                          parse_element(L, sc["S_psibar"]),
                          parse_element(L, sc["L_psi"]),
                          parse_element(L, sc["L_psibar"]),
                          regular=bool(block.get("regular", False)))
        sub, psi = _parse_char(prob, block, "psi")
        psibar = _conjugate_char(prob, sub, psi)
        eps, u = _char_unit_and_punit(prob, sub, psi)
        epsb, ub = _char_unit_and_punit(prob, sub, psibar)
        S_psi = cm_slope(prob, eps)
        S_psibar = cm_slope(prob, epsb)
        L_psi = cm_char_l_invariant(prob, u, slope_bar=S_psibar, eps_psi=eps)
        L_psibar = cm_char_l_invariant(prob, ub, slope_bar=S_psi, eps_psi=epsb)
        return CMData(S_psi, S_psibar, L_psi, L_psibar,
                      regular=bool(block.get("regular", False)))


def cm_line_l_invariant(s, data):
    """L-invariant along the refinement line e1 + s e2 (s = None at
    infinity): the Moebius expression (s L(psi-bar) - S L(psi))/(s - S) in
    the irregular case; L(psi) at 0 / L(psi-bar) at infinity in the regular
    case."""
    if data.regular:
        if s is INFINITY:
            return data.L_psibar
        if getattr(s, "is_exact_zero", lambda: s == 0)():
            return data.L_psi
        raise SingularRefinementError(
            "regular CM case: only s = 0 and s = infinity are refinements")
    if s is INFINITY:
        return data.L_psibar
    diff = s - data.S_psi
    if not diff.is_certified_nonzero():
        raise SingularRefinementError(
            "s equals the slope S_psi: singular refinement")
    return (s * data.L_psibar - data.S_psi * data.L_psi) / diff


# -- the adjoint CM family ---------------------------------------------------------------


class AdjointCMData:
    """Scalar inputs of the double-trivial-zero adjoint formula."""

    def __init__(self, L_gp, S_phi, S_phibar, L_phi, L_phibar):
        self.L_gp = L_gp
        self.S_phi = S_phi
        self.S_phibar = S_phibar
        self.L_phi = L_phi
        self.L_phibar = L_phibar
        L = L_gp.field
        two = L.from_int(2)
        self.anticyclo_phi = L_phi - two * L_gp
        self.anticyclo_phibar = L_phibar - two * L_gp

    def check_generic(self):
        """The nondegeneracy condition on the anti-cyclotomic invariants."""
        prod = (self.anticyclo_phi * self.anticyclo_phibar
                * (self.anticyclo_phi + self.anticyclo_phibar))
        if not prod.is_certified_nonzero():
            raise PrecisionError(
                "generic-CM condition fails (or vanishes to precision): "
                "L-(phi) L-(phibar) (L-(phi)+L-(phibar)) = 0")
        return True

    @staticmethod
    def from_problem(prob):
        block = prob.special.get("adjoint_cm")
        if block is None:
            raise LinvError("fixture carries no special.adjoint_cm block")
        L = prob.coeff_field
        if "scalars" in block:
            sc = block["scalars"]
            return AdjointCMData(parse_element(L, sc["L_gp"]),
                                 parse_element(L, sc["S_phi"]),
                                 parse_element(L, sc["S_phibar"]),
                                 parse_element(L, sc["L_phi"]),
                                 parse_element(L, sc["L_phibar"]))
        sub, phi = _parse_char(prob, block, "phi")
        phibar = _conjugate_char(prob, sub, phi)
        eps, u = _char_unit_and_punit(prob, sub, phi)
        epsb, ub = _char_unit_and_punit(prob, sub, phibar)
        S_phi = cm_slope(prob, eps)
        S_phibar = cm_slope(prob, epsb)
        L_phi = cm_char_l_invariant(prob, u, slope_bar=S_phibar, eps_psi=eps)
        L_phibar = cm_char_l_invariant(prob, ub, slope_bar=S_phi, eps_psi=epsb)
        L_gp = gothic_p_l_invariant(prob, sub)
        return AdjointCMData(L_gp, S_phi, S_phibar, L_phi, L_phibar)


def gothic_p_l_invariant(prob, subgroup):
    """L_gp = -log(u_gp)/ord(u_gp) for the K-level p-unit: the
    subgroup-invariant direction whose tau-image is a unit."""
    L = prob.coeff_field
    U = prob.units
    tau = prob.group.conjugation
    triv = {g: L.one() for g in subgroup}
    inv = isotypic_space(prob, subgroup, triv)
    ords_tau = [U.ord_of(U.act(tau, b), L) for b in inv]
    coeffs = linalg.kernel_basis(PMatrix(L, [ords_tau]), assume_zeros=True)
    for c in coeffs:
        x = [L.zero()] * U.rank_total
        for ck, b in zip(c, inv):
            if ck.is_exact_zero():
                continue
            x = [a + ck * bi for a, bi in zip(x, b)]
        o = U.ord_of(x, L)
        if o.is_certified_nonzero():
            return -(U.log_of(x, L) / o)
    raise LinvError("no K-level p-unit found (invariants with unit tau-image)")


def _s_homogeneous(L, s):
    """(s_num, s_den) with s = s_num / s_den; infinity is (1, 0)."""
    if s is INFINITY:
        return L.one(), L.zero()
    if isinstance(s, (int, Fraction)):
        s = L.from_fraction(s)
    return s, L.one()


def adjoint_cm_matrices(s, t, data):
    """The 2x2 evaluated cocycle matrices of the dual construction, in the
    homogeneous form that also covers s at infinity."""
    L = data.L_gp.field
    s_num, s_den = _s_homogeneous(L, s)
    if isinstance(t, (int, Fraction)):
        t = L.from_fraction(t)
    two = L.from_int(2)
    Jf = PMatrix(L, [
        [two * data.L_gp, -(t * data.L_phibar) * s_den],
        [L.zero(), data.S_phi * data.L_phi * s_den - s_num * data.L_phibar],
    ])
    Jc = PMatrix(L, [
        [L.one(), -(t) * s_den],
        [L.zero(), data.S_phi * s_den - s_num],
    ])
    return Jf, Jc


def adjoint_cm_l_invariant(s, t, data, cross_check=True):
    """2 L_gp (S_phi L(phi) - s L(phibar)) / (S_phi - s), independent of t.

    Also builds the dual-route matrices and verifies the value through the
    dual determinant (e = 2, so the sign relation has sign +1)."""
    L = data.L_gp.field
    s_num, s_den = _s_homogeneous(L, s)
    denom = data.S_phi * s_den - s_num
    if not denom.is_certified_nonzero():
        raise SingularRefinementError("s equals the slope S_phi: singular refinement")
    two = L.from_int(2)
    value = two * data.L_gp * (data.S_phi * data.L_phi * s_den
                               - s_num * data.L_phibar) / denom
    if cross_check:
        Jf, Jc = adjoint_cm_matrices(s, t, data)
        dual = engine.dual_l_invariant(Jf, Jc, e=2)
        if not value.agrees_with(dual):
            raise PrecisionError("adjoint-CM closed form disagrees with the "
                                 "constructed-matrix dual route")
    return value


def adjoint_cm_family_value(data):
    """The L-invariant in the non-CM family direction:
    2 L_gp (L-(phibar) L(phi) + L-(phi) L(phibar)) / (L-(phibar) + L-(phi))."""
    data.check_generic()
    L = data.L_gp.field
    two = L.from_int(2)
    num = (data.anticyclo_phibar * data.L_phi
           + data.anticyclo_phi * data.L_phibar)
    return two * data.L_gp * num / (data.anticyclo_phibar + data.anticyclo_phi)


def family_xi(data):
    """A square root of L-(phibar) L-(phi)^-1 S_phibar (the family parameter
    is its inverse); raises when no root exists in the field."""
    from .padic import sqrt

    val = data.anticyclo_phibar / data.anticyclo_phi * data.S_phibar
    return sqrt(val)


# -- weight-one closed forms ----------------------------------------------------------


def weight1_l_invariant(kind, scalars):
    """The 2x2-over-1x1 weight-one expressions.

    kind = "regular":   keys log_eps_alpha, log_eps_beta, log_u_alpha,
                        log_u_beta, ord_u_alpha
    kind = "irregular": keys log_eps_plus, log_eps_minus, log_u_plus,
                        log_u_minus, ord_u_minus
    """
    if kind == "regular":
        la, lb = scalars["log_eps_alpha"], scalars["log_eps_beta"]
        ua, ub = scalars["log_u_alpha"], scalars["log_u_beta"]
        oa = scalars["ord_u_alpha"]
        denom = lb * oa
        if not denom.is_certified_nonzero():
            raise PrecisionError("weight-one denominator vanishes to precision")
        return (la * ub - lb * ua) / denom
    if kind == "irregular":
        lp, lm = scalars["log_eps_plus"], scalars["log_eps_minus"]
        up, um = scalars["log_u_plus"], scalars["log_u_minus"]
        om = scalars["ord_u_minus"]
        denom = lp * om
        if not denom.is_certified_nonzero():
            raise PrecisionError("weight-one denominator vanishes to precision")
        return (lm * up - lp * um) / denom
    raise LinvError(f"unknown weight-one kind {kind!r}")


# -- Gross regulator --------------------------------------------------------------------


def gross_regulator(prob, max_attempts=6):
    """R_p = det(B-) det(O-)^-1 with the log entries evaluated through the
    norm-compatible trace route (the local-absolute-value description of
    the regulator map restricted to the distinguished place).

    Requires d+ = 0; the empty refinement is then automatically regular.
    """
    pipe = engine.Pipeline(prob)
    if pipe.d_plus != 0:
        raise LinvError(f"Gross regulator needs d+ = 0 (complex conjugation "
                        f"acting as -1); here d+ = {pipe.d_plus}")
    L = prob.coeff_field
    ref = engine.Refinement([], "gross")
    w1p = pipe.w1_plus_basis(ref)
    e = pipe.f - len(w1p)
    if e == 0:
        return L.one()
    w_minus = pipe._w_minus_default(ref, w1p)
    last = None
    for attempt in range(max_attempts):
        kappa_primes, _ = pipe.kappa_prime_basis(ref, rotation=attempt)
        B = PMatrix(L, [[pipe.trace_log_hom(h, w) for h in kappa_primes]
                        for w in w_minus])
        O = PMatrix(L, [[pipe.ord_hom(h, w) for h in kappa_primes]
                        for w in w_minus])
        try:
            det_O = linalg.determinant(O)
            if not det_O.is_certified_nonzero():
                raise OMinusSingularError("det O^- vanishes to precision")
            return linalg.determinant(B) / det_O
        except (AmbiguousRankError, OMinusSingularError) as exc:
            last = exc
    raise OMinusSingularError(f"O^- singular in every completion tried: {last}")
