"""Input data model and JSON ingestion.

A fixture bundles a finite group, a representation W over a coefficient
field, a unit module with its Galois action and p-adic embeddings, and
named refinement candidates.  Loading is validation: every structural
invariant is checked and failures are itemized.

JSON schema (exact key names):
  p, precision,
  E: {unramified_degree},
  coeff_field: {unramified_degree, eisenstein},
  group: {order, mult, frobenius, conjugation, Gp},
  W: {dim, matrices, motivic},
  units: {rank_units, rank_total, action, ord_p, embeddings | logs},
  refinements: [{name, basis, motivic}],
  special (optional), H_polynomial (optional, informational), name (optional)

Rationals are serialized as [num, den] pairs (bare ints allowed); field
elements as {"coeffs": [[d0, d1, ...] per coordinate], "shift": s,
"prec": a} with little-endian base-p digit lists.
"""
from __future__ import annotations

import json
from fractions import Fraction

from . import galois, linalg, padic
from .errors import FixtureError, LinvError, PrecisionError
from .galois import FiniteGroup, Representation, ValidationReport, validate_group
from .linalg import PMatrix
from .padic import FieldElement, LocalField, embed, frobenius, iwasawa_log


def parse_rational(obj):
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, list) and len(obj) == 2 and all(isinstance(x, int) for x in obj):
        return Fraction(obj[0], obj[1])
    raise FixtureError(f"expected a rational (int or [num, den]), got {obj!r}")


def rational_payload(q):
    q = Fraction(q)
    return [q.numerator, q.denominator] if q.denominator != 1 else int(q)


def parse_element(field, obj):
    """Field element from a digit payload or a rational."""
    if isinstance(obj, dict):
        x = FieldElement.from_payload(field, obj)
        if x.aprec is not padic.INF and x.aprec > field.pi_cap:
            x = FieldElement(field, x.vec, x.shift, field.pi_cap)
        return x
    return field.from_fraction(parse_rational(obj))


def element_payload(x):
    if x.exact is not None:
        if all(c == 0 for c in x.exact[1:]):
            return rational_payload(x.exact[0])
    return x.to_payload()


class UnitModule:
    """The p-unit module of the splitting field: an R-dimensional space
    whose first rank_units basis vectors span the global-units part, with a
    G-action by rational matrices, valuations at the distinguished place,
    and p-adic embeddings (or precomputed logs) of the basis."""

    def __init__(self, rank_units, rank_total, action, ord_p,
                 embeddings=None, logs=None):
        self.rank_units = rank_units
        self.rank_total = rank_total
        self.action = action          # list of PMatrix over L (exact entries)
        self.ord_p = ord_p            # list of Fractions
        self.embeddings = embeddings  # list of FieldElement of E, or None
        self.logs_E = logs            # list of FieldElement of E, or None
        self._logs_L = None
        self._ords_L = None

    def logs_in(self, L):
        """log_p of the basis embeddings, mapped into the coefficient field."""
        if self._logs_L is None:
            src = self.logs_E
            if src is None:
                src = [iwasawa_log(x) for x in self.embeddings]
                self.logs_E = src
            self._logs_L = [embed(x, L) for x in src]
        return self._logs_L

    def ords_in(self, L):
        if self._ords_L is None:
            self._ords_L = [L.from_fraction(q) for q in self.ord_p]
        return self._ords_L

    def log_of(self, vec, L):
        """log_p of a module element given by coordinates over L."""
        logs = self.logs_in(L)
        acc = L.zero()
        for c, lg in zip(vec, logs):
            if c.is_exact_zero() or lg.is_exact_zero():
                continue
            acc = acc + c * lg
        return acc

    def ord_of(self, vec, L):
        ords = self.ords_in(L)
        acc = L.zero()
        for c, o in zip(vec, ords):
            if c.is_exact_zero() or o.is_exact_zero():
                continue
            acc = acc + c * o
        return acc

    def act(self, g, vec):
        return self.action[g].apply(vec)


class GaloisProblem:
    """The full input bundle for one L-invariant computation."""

    def __init__(self, p, precision, field_E, coeff_field, group, W, units,
                 refinements, special=None, name=None, h_polynomial=None):
        self.p = p
        self.precision = precision
        self.field_E = field_E
        self.coeff_field = coeff_field
        self.group = group
        self.W = W
        self.units = units
        self.refinements = refinements  # list of dicts: name, basis, motivic
        self.special = special or {}
        self.name = name
        self.h_polynomial = h_polynomial

    # -- dimension data ---------------------------------------------------------

    def d(self):
        return self.W.dim

    def d_plus(self):
        fixed = galois.fixed_subspace(self.W, [self.group.conjugation])
        return len(fixed)

    def d_minus(self):
        return self.d() - self.d_plus()

    def f_frob_fixed(self):
        return len(galois.fixed_subspace(self.W, [self.group.frobenius]))

    def refinement_named(self, name):
        for ref in self.refinements:
            if ref["name"] == name:
                return ref
        raise FixtureError(f"no refinement named {name!r}; have "
                           f"{[r['name'] for r in self.refinements]}")


def _parse_group(obj):
    try:
        order = int(obj["order"])
        mult = obj["mult"]
        frob = int(obj["frobenius"])
        conj = int(obj["conjugation"])
        gp = obj.get("Gp")
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureError(f"group block malformed: {exc}")
    if len(mult) != order:
        raise FixtureError("group.mult size differs from group.order")
    return FiniteGroup(mult, frob, conj, gp)


def _parse_matrix(field, rows, dim_r, dim_c, what):
    if len(rows) != dim_r or any(len(r) != dim_c for r in rows):
        raise FixtureError(f"{what}: expected {dim_r}x{dim_c} matrix")
    return PMatrix(field, [[parse_element(field, x) for x in row] for row in rows])


def load_fixture(source, precision_override=None):
    """Load and validate a fixture from a JSON string/bytes/dict/path.

    Returns a GaloisProblem; raises FixtureError with itemized details on
    schema or invariant violations.
    """
    if isinstance(source, (bytes, str)) and not str(source).lstrip().startswith("{"):
        with open(source, "rb") as fh:
            data = json.load(fh)
    elif isinstance(source, (bytes, str)):
        data = json.loads(source)
    elif isinstance(source, dict):
        data = source
    else:
        data = json.load(source)

    problems = []

    def need(key, obj=data):
        if key not in obj:
            raise FixtureError(f"missing required key {key!r}")
        return obj[key]

    p = int(need("p"))
    precision = int(need("precision"))
    if precision_override is not None:
        precision = min(precision, int(precision_override))

    e_block = need("E")
    cf_block = need("coeff_field")
    f_e = int(e_block.get("unramified_degree", 1))
    f_l = int(cf_block.get("unramified_degree", 1))
    eis = cf_block.get("eisenstein")
    eis_coeffs = None
    if eis is not None:
        eis_coeffs = [parse_rational(c) for c in eis]
    try:
        field_E = LocalField(p, f_e, None, precision)
        coeff = LocalField(p, f_l, eis_coeffs, precision)
    except LinvError as exc:
        raise FixtureError(f"field construction failed: {exc}")
    if f_l % f_e:
        raise FixtureError("coeff_field unramified degree must be a multiple "
                           "of E's (logs are mapped into the coefficient field)")

    group = _parse_group(need("group"))
    grep = validate_group(group)
    if not grep.ok:
        raise FixtureError("group invariants violated",
                           details=[f"{n}: {d}" for n, d in grep.failures()])
    if len(group.gp) != f_e:
        problems.append(
            f"E.unramified_degree = {f_e} but the decomposition subgroup has "
            f"order {len(group.gp)} (Gal(E/Q_p) must be generated by Frobenius)")

    w_block = need("W")
    dim = int(need("dim", w_block))
    mats = need("matrices", w_block)
    if len(mats) != group.order:
        raise FixtureError("W.matrices must list one matrix per group element")
    W = Representation(
        group, [_parse_matrix(coeff, m, dim, dim, f"W.matrices[{g}]")
                for g, m in enumerate(mats)], name="W")
    wrep = W.validate(check_no_trivial=True)
    if not wrep.ok:
        problems.extend(f"W: {n} {d}" for n, d in wrep.failures())

    u_block = need("units")
    r = int(need("rank_units", u_block))
    R = int(need("rank_total", u_block))
    action_rows = need("action", u_block)
    if len(action_rows) != group.order:
        raise FixtureError("units.action must list one matrix per group element")
    action = [_parse_matrix(coeff, m, R, R, f"units.action[{g}]")
              for g, m in enumerate(action_rows)]
    ords = [parse_rational(x) for x in need("ord_p", u_block)]
    if len(ords) != R:
        raise FixtureError("units.ord_p length differs from rank_total")
    embeddings = logs = None
    if "embeddings" in u_block:
        embeddings = [parse_element(field_E, x) for x in u_block["embeddings"]]
        if len(embeddings) != R:
            raise FixtureError("units.embeddings length differs from rank_total")
    elif "logs" in u_block:
        logs = [parse_element(field_E, x) for x in u_block["logs"]]
        if len(logs) != R:
            raise FixtureError("units.logs length differs from rank_total")
    else:
        raise FixtureError("units needs either embeddings or logs")
    units = UnitModule(r, R, action, ords, embeddings, logs)

    # unit-module consistency: checking generator pairs against every h
    # determines all products by induction on word length
    gens = group.generators() or [0]
    broken = None
    for g in gens:
        for h in range(group.order):
            prod = action[g] * action[h]
            tgt = action[group.mul(g, h)]
            same = all(prod.rows[i][j].agrees_with(tgt.rows[i][j])
                       for i in range(R) for j in range(R))
            if not same:
                broken = (g, h)
                break
        if broken:
            break
    if broken:
        problems.append(f"units.action composition fails at pair {broken}")
    ident = PMatrix.identity(coeff, R)
    if not all(action[0].rows[i][j].agrees_with(ident.rows[i][j])
               for i in range(R) for j in range(R)):
        problems.append("units.action at the identity is not the identity matrix")
    for i in range(r):
        if ords[i] != 0:
            problems.append(f"units.ord_p[{i}] = {ords[i]} but index {i} is a "
                            "global unit (must have valuation 0)")
    n_places = len(group.cosets(group.gp))
    if R - r != n_places:
        problems.append(f"rank accounting: rank_total - rank_units = {R - r} "
                        f"but [G : G_p] = {n_places}")
    if embeddings is not None:
        for i, x in enumerate(embeddings):
            try:
                v = x.valuation()
            except PrecisionError:
                problems.append(f"units.embeddings[{i}] is zero to working precision")
                continue
            if v != ords[i]:
                problems.append(f"units.embeddings[{i}] has valuation {v}, "
                                f"declared ord_p is {ords[i]}")

    refinements = []
    d_plus = len(galois.fixed_subspace(W, [group.conjugation]))
    for ref in data.get("refinements", []):
        name = ref.get("name", f"ref{len(refinements)}")
        basis = [[parse_element(coeff, x) for x in vec] for vec in ref.get("basis", [])]
        for vec in basis:
            if len(vec) != dim:
                raise FixtureError(f"refinement {name!r}: basis vector length != dim W")
        if len(basis) != d_plus:
            problems.append(f"refinement {name!r} has dimension {len(basis)}, "
                            f"but d+ = {d_plus}")
        elif basis and not _gp_stable(coeff, W, group, basis):
            problems.append(f"refinement {name!r} is not G_p-stable")
        refinements.append({"name": name, "basis": basis,
                            "motivic": bool(ref.get("motivic", False))})

    if problems:
        raise FixtureError("fixture invariant violations", details=problems)

    return GaloisProblem(p, precision, field_E, coeff, group, W, units,
                         refinements, data.get("special"), data.get("name"),
                         data.get("H_polynomial"))


def _gp_stable(field, W, group, basis):
    frob_mat = W.matrix(group.frobenius)
    images = [frob_mat.apply(v) for v in basis]
    base_rows = [list(v) for v in basis]
    rk0 = linalg.rank(PMatrix(field, base_rows), assume_zeros=True)
    rk1 = linalg.rank(PMatrix(field, base_rows + [list(v) for v in images]),
                      assume_zeros=True)
    return rk0 == len(basis) and rk1 == rk0


def validate_arithmetic(prob):
    """Arithmetic consistency report: Dirichlet dimension counts for the
    equivariant Hom spaces, rank accounting, embedding consistency, and
    G_p-equivariance of the embedding data."""
    rep = ValidationReport()
    group, W, units, L = prob.group, prob.W, prob.units, prob.coeff_field
    d_plus = prob.d_plus()
    f = prob.f_frob_fixed()

    homs_p = galois.equivariant_homs(W, units.action)
    rep.add("dim Hom_G(W, U^(p)) = d+ + f", len(homs_p) == d_plus + f,
            f"got {len(homs_p)}, expected {d_plus + f}")
    homs_u = unit_valued_homs(prob)
    rep.add("dim Hom_G(W, U) = d+", len(homs_u) == d_plus,
            f"got {len(homs_u)}, expected {d_plus}")

    n_places = len(group.cosets(group.gp))
    rep.add("rank accounting R - r = [G : G_p]",
            units.rank_total - units.rank_units == n_places,
            f"{units.rank_total} - {units.rank_units} vs {n_places}")

    if units.embeddings is not None:
        ok = True
        detail = ""
        for i, x in enumerate(units.embeddings):
            try:
                v = x.valuation()
            except PrecisionError:
                ok, detail = False, f"embedding {i} vanishes to precision"
                break
            if v != units.ord_p[i]:
                ok, detail = False, f"embedding {i}: valuation {v} != ord {units.ord_p[i]}"
                break
        rep.add("embeddings match declared ord_p", ok, detail)
    else:
        rep.warn("fixture carries precomputed logs only: "
                 "embedding consistency unverifiable")

    if len(group.gp) > 1 and units.embeddings is not None:
        logs_E = [iwasawa_log(x) for x in units.embeddings]
        ok = True
        detail = ""
        fr = group.frobenius
        for i in range(units.rank_total):
            lhs_log = L.zero()
            lhs_ord = Fraction(0)
            for j in range(units.rank_total):
                c = units.action[fr].rows[j][i]
                if c.is_exact_zero():
                    continue
                lhs_log = lhs_log + c * embed(logs_E[j], L)
                lhs_ord += c.exact[0] * units.ord_p[j] if c.exact else Fraction(0)
            rhs_log = embed(frobenius(logs_E[i]), L)
            if not lhs_log.agrees_with(rhs_log, digits=prob.precision // 2):
                ok, detail = False, f"log equivariance fails at basis index {i}"
                break
            if lhs_ord != units.ord_p[i]:
                ok, detail = False, f"ord equivariance fails at basis index {i}"
                break
        rep.add("embeddings are Frobenius-equivariant", ok, detail)
    return rep


def unit_valued_homs(prob):
    """Basis of Hom_G(W, U_H): equivariant maps landing in the global-units
    subspace (the span of the first rank_units basis vectors)."""
    group, W, units, L = prob.group, prob.W, prob.units, prob.coeff_field
    r, R, d = units.rank_units, units.rank_total, W.dim
    if r == 0:
        return []
    sub_action = [PMatrix(L, [row[:r] for row in m.rows[:r]]) for m in units.action]
    homs = galois.equivariant_homs(W, sub_action, u_dim=r)
    out = []
    zero = L.zero()
    for x in homs:
        rows = x.rows + [[zero] * d for _ in range(R - r)]
        out.append(PMatrix(L, rows))
    return out


def serialize_problem(prob):
    """Inverse of load_fixture (digit normalization aside)."""
    group = prob.group
    out = {
        "p": prob.p,
        "precision": prob.precision,
        "E": {"unramified_degree": prob.field_E.f0},
        "coeff_field": {"unramified_degree": prob.coeff_field.f0},
        "group": {
            "order": group.order,
            "mult": [list(row) for row in group.mult],
            "frobenius": group.frobenius,
            "conjugation": group.conjugation,
            "Gp": list(group.gp),
        },
        "W": {
            "dim": prob.W.dim,
            "matrices": [[[element_payload(x) for x in row] for row in m.rows]
                         for m in prob.W.matrices],
            "motivic": all(x.exact is not None
                           for m in prob.W.matrices for row in m.rows for x in row),
        },
        "units": {
            "rank_units": prob.units.rank_units,
            "rank_total": prob.units.rank_total,
            "action": [[[element_payload(x) for x in row] for row in m.rows]
                       for m in prob.units.action],
            "ord_p": [rational_payload(q) for q in prob.units.ord_p],
        },
        "refinements": [
            {"name": ref["name"],
             "basis": [[element_payload(x) for x in vec] for vec in ref["basis"]],
             "motivic": ref["motivic"]}
            for ref in prob.refinements
        ],
    }
    if prob.coeff_field.eis_poly_exact is not None:
        out["coeff_field"]["eisenstein"] = [
            rational_payload(c[0]) for c in prob.coeff_field.eis_poly_exact]
    if prob.units.embeddings is not None:
        out["units"]["embeddings"] = [x.to_payload() for x in prob.units.embeddings]
    else:
        out["units"]["logs"] = [x.to_payload() for x in prob.units.logs_E]
    if prob.special:
        out["special"] = prob.special
    if prob.name:
        out["name"] = prob.name
    if prob.h_polynomial is not None:
        out["H_polynomial"] = prob.h_polynomial
    return out
