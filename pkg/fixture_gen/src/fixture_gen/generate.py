"""Recipe-driven fixture generation.

Two field backends are built in, both exact:
  - gaussian: H = Q(i), the split-prime Gross fixture (rank-0 units);
  - cyclotomic n=8: H = Q(zeta_8), the dihedral (order-4) adjoint-CM
    fixture over K = Q(i) with a double trivial zero.

Unit and S-unit generators come from closed forms (fundamental unit
1 + sqrt(2), split-prime generators, a bounded norm-equation search for the
prime above p), not from a general unit-group algorithm.  The recipe's
provenance block records exactly which generators were used.
"""
from __future__ import annotations

import json

from .cyclotomic import GaussianInt, Zeta8, split_prime_gaussian
from .padics import int_valuation, teichmuller_int, zp_payload


class RecipeError(Exception):
    pass


class CASError(Exception):
    """An exact-backend computation failed an internal consistency check."""


def generate(recipe):
    """Produce a fixture dict from a recipe dict."""
    field = recipe.get("field", {})
    ftype = field.get("type")
    p = int(recipe["p"])
    precision = int(recipe.get("precision", 40))
    if ftype == "gaussian":
        return _generate_gaussian(recipe, p, precision)
    if ftype == "cyclotomic":
        if int(field.get("n", 0)) != 8:
            raise RecipeError("only the n = 8 cyclotomic backend is built in")
        return _generate_zeta8(recipe, p, precision)
    raise RecipeError(f"unsupported field type {ftype!r} "
                      "(the field must be Galois with a built-in backend)")


# -- Q(i) -------------------------------------------------------------------------


def _generate_gaussian(recipe, p, precision):
    if p == 2:
        raise RecipeError("p ramified in H")
    if p % 4 != 1:
        raise RecipeError(f"p = {p} is inert in Q(i); the split Gross recipe "
                          "needs p = 1 mod 4")
    a, b = split_prime_gaussian(p)
    u1 = GaussianInt(a, b)
    u2 = u1.conjugate()
    if u1.norm() != p:
        raise CASError("split-prime norm check failed")

    # deterministic embedding: i maps to the Teichmuller lift of the
    # smallest residue r with r^2 = -1 mod p
    r = min(x for x in range(2, p) if (x * x + 1) % p == 0)
    digits = precision + 4
    t = teichmuller_int(r, p, digits)
    v1 = u1.eval_mod(t, p ** digits)
    v2 = u2.eval_mod(t, p ** digits)
    ords = []
    for v in (v1, v2):
        ords.append(int_valuation(v, p) if v % p == 0 else 0)
    if sorted(ords) != [0, 1]:
        raise CASError("expected exactly one place of valuation 1 above p")

    return {
        "name": recipe.get("name", f"qi_p{p}"),
        "p": p,
        "precision": precision,
        "E": {"unramified_degree": 1},
        "coeff_field": {"unramified_degree": 1},
        "group": {
            "order": 2,
            "mult": [[0, 1], [1, 0]],
            "frobenius": 0,
            "conjugation": 1,
            "Gp": [0],
        },
        "W": {"dim": 1, "matrices": [[[1]], [[-1]]], "motivic": True},
        "units": {
            "rank_units": 0,
            "rank_total": 2,
            "action": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]],
            "ord_p": ords,
            "embeddings": [zp_payload(v1, p, precision),
                           zp_payload(v2, p, precision)],
        },
        "refinements": [{"name": "default", "basis": [], "motivic": True}],
        "H_polynomial": [1, 0, 1],
        "provenance": {
            "backend": "exact-gaussian",
            "p_unit_generators": [repr(u1), repr(u2)],
            "embedding": f"i -> teichmuller({r})",
        },
    }


# -- Q(zeta_8) ----------------------------------------------------------------------


def _find_norm_p_element(p, bound=4):
    """Deterministic bounded search for an element of Z[zeta_8] of norm p
    (the generator of one prime above a totally split p)."""
    best = None
    for c0 in range(-bound, bound + 1):
        for c1 in range(-bound, bound + 1):
            for c2 in range(-bound, bound + 1):
                for c3 in range(-bound, bound + 1):
                    x = Zeta8((c0, c1, c2, c3))
                    if x.norm() == p:
                        key = (max(abs(c) for c in x.c), x.c)
                        if best is None or key < best[0]:
                            best = (key, x)
    if best is None:
        raise CASError(f"no norm-{p} element within the search bound")
    return best[1]


def _unit_action_sign(eps, k):
    """sigma_k(eps) = +-(eps^{+-1}) times torsion; return the additive
    action (+1 or -1) and verify the torsion claim exactly."""
    img = eps.apply_automorphism(k)
    torsion = {Zeta8.zeta(j) for j in range(8)} | {-Zeta8.zeta(j) for j in range(8)}
    if img * _inv_unit(eps) in torsion:
        return 1
    if img * eps in torsion:
        return -1
    raise CASError(f"sigma_{k} does not act by +-1 on the unit line")


def _inv_unit(eps):
    """Inverse of 1 + sqrt(2) in Z[zeta_8]: sqrt(2) - 1."""
    inv = Zeta8((-1, 1, 0, -1))  # -1 + z - z^3 = sqrt(2) - 1
    if not (eps * inv == Zeta8.one() or eps * inv == -Zeta8.one()):
        raise CASError("unit inverse check failed")
    return inv


def _generate_zeta8(recipe, p, precision):
    if p == 2:
        raise RecipeError("p ramified in H")
    if p % 8 != 1:
        raise RecipeError(f"p = {p} is not totally split in Q(zeta_8); "
                          "this adjoint-CM recipe needs p = 1 mod 8")
    # Galois group (Z/8)^* = {1, 3, 5, 7} as indices 0..3
    ks = [1, 3, 5, 7]
    idx = {k: i for i, k in enumerate(ks)}
    mult = [[idx[(ka * kb) % 8] for kb in ks] for ka in ks]

    eps = Zeta8((1, 1, 0, -1))  # 1 + zeta - zeta^3 = 1 + sqrt(2)
    unit_signs = [_unit_action_sign(eps, k) for k in ks]

    pi = _find_norm_p_element(p)
    conj_pi = [pi.apply_automorphism(k) for k in ks]

    # embedding zeta -> Teichmuller lift of the smallest residue of order 8
    r = None
    for x in range(2, p):
        if pow(x, 8, p) == 1 and pow(x, 4, p) != 1:
            r = x
            break
    if r is None:
        raise CASError("no residue of multiplicative order 8 (p = 1 mod 8 ?)")
    digits = precision + 4
    mod = p ** digits
    t = teichmuller_int(r, p, digits)

    emb_eps = eps.eval_mod(t, mod)
    emb_pi = [conj.eval_mod(t, mod) for conj in conj_pi]
    ords = []
    for v in emb_pi:
        ords.append(int_valuation(v, p) if v % p == 0 else 0)
    if sum(ords) != 1:
        raise CASError(f"place valuations {ords} do not sum to ord_p(N(pi)) = 1")
    prod = 1
    for v in emb_pi:
        prod = (prod * v) % mod
    if prod % (p ** precision) != p % (p ** precision):
        raise CASError("product of conjugate embeddings is not p "
                       "(norm consistency failure)")
    if emb_eps % p == 0:
        raise CASError("fundamental unit embeds with positive valuation")

    # W = eps_K + Ind(phi) in the dihedral basis w1, w2, w3; K = Q(i) is cut
    # by the subgroup {sigma_1, sigma_5} (k = 1 mod 4)
    def w_matrix(k):
        in_gk = k % 4 == 1
        if in_gk:
            s = 1 if k == 1 else -1
            return [[1, 0, 0], [0, s, 0], [0, 0, s]]
        s = 1 if k == 7 else -1
        return [[-1, 0, 0], [0, 0, s], [0, s, 0]]

    w_mats = [w_matrix(k) for k in ks]

    # unit-module action: 1-dim unit line with the verified signs, then the
    # permutation of the conjugate p-unit generators
    action = []
    for gi, k in enumerate(ks):
        rows = [[0] * 5 for _ in range(5)]
        rows[0][0] = unit_signs[gi]
        for src in range(4):
            dst = mult[gi][src]
            rows[1 + dst][1 + src] = 1
        action.append(rows)

    return {
        "name": recipe.get("name", f"dihedral_cm_p{p}"),
        "p": p,
        "precision": precision,
        "E": {"unramified_degree": 1},
        "coeff_field": {"unramified_degree": 1},
        "group": {
            "order": 4,
            "mult": mult,
            "frobenius": 0,
            "conjugation": idx[7],
            "Gp": [0],
        },
        "W": {"dim": 3, "matrices": w_mats, "motivic": True},
        "units": {
            "rank_units": 1,
            "rank_total": 5,
            "action": action,
            "ord_p": [0] + ords,
            "embeddings": [zp_payload(emb_eps, p, precision)]
            + [zp_payload(v, p, precision) for v in emb_pi],
        },
        "refinements": [
            {"name": "theta", "basis": [[0, 1, 0]], "motivic": True},
            {"name": "theta_bar", "basis": [[0, 0, 1]], "motivic": True},
            {"name": "s2t1", "basis": [[1, 1, 2]], "motivic": True},
        ],
        "special": {"adjoint_cm": {"subgroup_K": [0, 2],
                                   "phi": {"0": 1, "2": -1}}},
        "H_polynomial": [1, 0, 0, 0, 1],
        "provenance": {
            "backend": "exact-cyclotomic-8",
            "unit_generator": f"eps = {eps!r} (1 + sqrt 2)",
            "p_unit_generator": f"pi = {pi!r}",
            "embedding": f"zeta_8 -> teichmuller({r})",
        },
    }


def load_recipe(path):
    with open(path) as fh:
        return json.load(fh)
