"""Finite groups as multiplication tables, matrix representations, fixed
subspaces, equivariant Hom spaces, and group-algebra idempotents acting on
unit modules.

Groups here are tiny (order <= 48), so every structural check is exhaustive.
The identity element always sits at index 0.
"""
from __future__ import annotations

from fractions import Fraction

from . import linalg
from .errors import LinvError
from .linalg import PMatrix


class ValidationReport:
    """Report-style result: a list of (check, ok, detail) items."""

    def __init__(self):
        self.items = []
        self.warnings = []

    def add(self, name, ok, detail=""):
        self.items.append((name, bool(ok), detail))

    def warn(self, message):
        self.warnings.append(message)

    @property
    def ok(self):
        return all(ok for _, ok, _ in self.items)

    def failures(self):
        return [(n, d) for n, ok, d in self.items if not ok]

    def lines(self):
        out = []
        for name, ok, detail in self.items:
            mark = "pass" if ok else "FAIL"
            out.append(f"[{mark}] {name}" + (f": {detail}" if detail else ""))
        for w in self.warnings:
            out.append(f"[warn] {w}")
        return out

    def __repr__(self):
        return "\n".join(self.lines())


class FiniteGroup:
    """Finite group given by an order-n multiplication table
    (mult[i][j] = index of g_i * g_j), with distinguished elements:
    a Frobenius generating the decomposition subgroup and an order <= 2
    conjugation element."""

    def __init__(self, mult, frobenius, conjugation, gp=None):
        self.mult = [list(map(int, row)) for row in mult]
        self.order = len(self.mult)
        self.frobenius = int(frobenius)
        self.conjugation = int(conjugation)
        self.inverse = self._compute_inverses()
        generated = self._cyclic_closure(self.frobenius)
        self.gp = sorted(int(g) for g in gp) if gp is not None else generated
        self._generated_gp = generated

    def _compute_inverses(self):
        inv = [None] * self.order
        for i in range(self.order):
            for j in range(self.order):
                if self.mult[i][j] == 0:
                    inv[i] = j
                    break
        return inv

    def _cyclic_closure(self, g):
        out = [0]
        cur = g
        while cur != 0:
            out.append(cur)
            cur = self.mult[cur][g]
            if len(out) > self.order:
                break
        return sorted(out)

    def mul(self, a, b):
        return self.mult[a][b]

    def inv(self, a):
        return self.inverse[a]

    def element_order(self, a):
        cur, n = a, 1
        while cur != 0:
            cur = self.mult[cur][a]
            n += 1
            if n > self.order + 1:
                return None
        return n

    def generators(self):
        """A small generating set, found greedily (groups here are tiny)."""
        chosen = []
        span = {0}
        for g in range(1, self.order):
            if g in span:
                continue
            chosen.append(g)
            span = self._closure(chosen)
            if len(span) == self.order:
                return chosen
        return chosen

    def _closure(self, gens):
        span = {0}
        frontier = [0]
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = self.mult[x][g]
                    if y not in span:
                        span.add(y)
                        new.append(y)
            frontier = new
        return span

    def subgroup_closure(self, gens):
        return sorted(self._closure(list(gens)))

    def cosets(self, subgroup):
        """Left cosets g*H as sorted tuples, identity coset first."""
        sub = set(subgroup)
        seen = set()
        out = []
        for g in range(self.order):
            if g in seen:
                continue
            coset = tuple(sorted(self.mult[g][h] for h in sub))
            seen.update(coset)
            out.append(coset)
        return out


def validate_group(group):
    """Exhaustive check of the FiniteGroup invariants; report style."""
    rep = ValidationReport()
    n = group.order
    ok_shape = all(len(row) == n for row in group.mult) and all(
        0 <= x < n for row in group.mult for x in row)
    rep.add("table shape and range", ok_shape)
    if not ok_shape:
        return rep
    rep.add("identity at index 0",
            all(group.mult[0][j] == j and group.mult[j][0] == j for j in range(n)))
    bad = None
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if group.mult[group.mult[a][b]][c] != group.mult[a][group.mult[b][c]]:
                    bad = (a, b, c)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("associativity", bad is None,
            "" if bad is None else f"fails at triple {bad}")
    rep.add("inverses exist", all(v is not None for v in group.inverse))
    rep.add("frobenius index in range", 0 <= group.frobenius < n)
    rep.add("conjugation has order <= 2",
            group.mult[group.conjugation][group.conjugation] == 0)
    rep.add("decomposition subgroup generated by frobenius (cyclic)",
            group.gp == group._generated_gp,
            f"given {group.gp}, generated {group._generated_gp}")
    return rep


class Representation:
    """Matrix representation of a FiniteGroup over a LocalField: one
    dim x dim PMatrix per group element."""

    def __init__(self, group, matrices, name="rho"):
        self.group = group
        self.matrices = list(matrices)
        self.name = name
        if len(self.matrices) != group.order:
            raise LinvError("one matrix per group element required")
        self.dim = self.matrices[0].nrows
        self.field = self.matrices[0].field
        for m in self.matrices:
            if m.nrows != self.dim or m.ncols != self.dim:
                raise LinvError("representation matrices must share one size")

    def matrix(self, g):
        return self.matrices[g]

    def validate(self, check_no_trivial=False):
        rep = ValidationReport()
        ident = PMatrix.identity(self.field, self.dim)
        ok = all(self.matrices[0].rows[i][j].agrees_with(ident.rows[i][j])
                 for i in range(self.dim) for j in range(self.dim))
        rep.add("identity maps to identity", ok)
        bad = None
        for g in range(self.group.order):
            for h in range(self.group.order):
                prod = self.matrices[g] * self.matrices[h]
                tgt = self.matrices[self.group.mul(g, h)]
                agree = all(prod.rows[i][j].agrees_with(tgt.rows[i][j])
                            for i in range(self.dim) for j in range(self.dim))
                if not agree:
                    bad = (g, h)
                    break
            if bad:
                break
        rep.add("homomorphism property", bad is None,
                "" if bad is None else f"fails at pair {bad}")
        if check_no_trivial:
            fixed = fixed_subspace(self, list(range(self.group.order)))
            rep.add("no trivial subrepresentation", len(fixed) == 0,
                    f"common fixed space has dimension {len(fixed)}")
        return rep

    def character(self, g):
        m = self.matrices[g]
        acc = self.field.zero()
        for i in range(self.dim):
            acc = acc + m.rows[i][i]
        return acc


def fixed_subspace(rep, elements):
    """Basis of the common fixed space of the listed group elements:
    intersection of ker(matrix(g) - 1)."""
    if not elements:
        raise LinvError("fixed_subspace requires a nonempty element list")
    field = rep.field
    ident = PMatrix.identity(field, rep.dim)
    stacked_rows = []
    for g in elements:
        diff = rep.matrix(g) - ident
        stacked_rows.extend(diff.rows)
    stacked = PMatrix(field, stacked_rows)
    return linalg.kernel_basis(stacked, assume_zeros=True)


def equivariant_homs(w_rep, u_matrices, u_dim=None):
    """Basis of Hom_G(W, U) = {X : U(g) X = X W(g) for all g}, where the
    U-action is given as a list of matrices (one per group element, PMatrix
    or rational rows).  Returns a list of (u_dim x w_dim) PMatrix.

    Computed as the kernel of I - P where P is the averaging projector
    X -> |G|^-1 sum_g U(g) X W(g)^-1 on column-major vectorized maps.
    """
    field = w_rep.field
    group = w_rep.group
    d = w_rep.dim
    mats_u = []
    for m in u_matrices:
        if isinstance(m, PMatrix):
            mats_u.append(m)
        else:
            mats_u.append(PMatrix.from_rational_rows(field, m))
    R = u_dim if u_dim is not None else mats_u[0].nrows
    n = R * d
    acc = [[field.zero()] * n for _ in range(n)]
    for g in range(group.order):
        a = mats_u[g]
        b = w_rep.matrix(group.inv(g))  # W(g)^-1 = W(g^-1)
        # vec is column-major: map X -> A X B has matrix B^T (x) A
        for jb in range(d):
            for ib in range(d):
                bij = b.rows[ib][jb]  # entry B[ib][jb]; transpose handled by index roles
                if bij.is_exact_zero():
                    continue
                for ja in range(R):
                    for ia in range(R):
                        av = a.rows[ia][ja]
                        if av.is_exact_zero():
                            continue
                        # column-major vec: X[i,j] at index j*R + i
                        # (A X B)[ia, jb] += A[ia,ja] X[ja_row...]  -- standard kron
                        acc[jb * R + ia][ib * R + ja] = \
                            acc[jb * R + ia][ib * R + ja] + av * bij
    inv_order = field.from_fraction(Fraction(1, group.order))
    proj = PMatrix(field, [[x * inv_order for x in row] for row in acc])
    ident = PMatrix.identity(field, n)
    kern = linalg.kernel_basis(ident - proj, assume_zeros=True)
    out = []
    for vec in kern:
        rows = [[vec[j * R + i] for j in range(d)] for i in range(R)]
        out.append(PMatrix(field, rows))
    return out


def isotypic_projector_scalars(rep):
    """Character values chi(g^-1) of rep, taken from traces."""
    return [rep.character(rep.group.inv(g)) for g in range(rep.group.order)]


def apply_idempotent(kind, u_vec, action_matrices, group, rep=None, beta=None):
    """Apply a group-algebra element to a unit-module vector.

    kind = "isotypic": e_rho = (dim rho / |G|) * sum_g chi(g^-1) g
           (rep must be irreducible; checked through character norm).
    kind = "w_plus":   sum_{i=1..|Gp|} beta^-i Frob^i   (beta != 0).
    kind = "w_one":    sum_{i=1..|Gp|} Frob^i.
    """
    field = action_matrices[0].field
    n = len(u_vec)

    def act(g, vec):
        return action_matrices[g].apply(vec)

    if kind == "isotypic":
        if rep is None:
            raise LinvError("isotypic idempotent needs the representation")
        chi = isotypic_projector_scalars(rep)
        norm = field.zero()
        for g in range(group.order):
            norm = norm + rep.character(g) * chi[g]
        expected = field.from_int(group.order)
        if not norm.agrees_with(expected):
            raise LinvError("character inconsistent with representation "
                            "(not irreducible: |chi|^2 != |G|)")
        out = [field.zero()] * n
        for g in range(group.order):
            if chi[g].is_exact_zero():
                continue
            gv = act(g, u_vec)
            for i in range(n):
                out[i] = out[i] + chi[g] * gv[i]
        scale = field.from_fraction(Fraction(rep.dim, group.order))
        return [x * scale for x in out]

    if kind == "w_plus":
        if beta is None or beta.is_zero_to_precision():
            raise LinvError("w_plus idempotent requires beta != 0")
        out = [field.zero()] * n
        cur = list(u_vec)
        binv = beta.inverse()
        coef = field.one()
        g = 0
        for _ in range(len(group.gp)):
            g = group.mul(g, group.frobenius)
            cur = act(group.frobenius, cur)
            coef = coef * binv
            for i in range(n):
                out[i] = out[i] + coef * cur[i]
        return out

    if kind == "w_one":
        out = [field.zero()] * n
        cur = list(u_vec)
        for _ in range(len(group.gp)):
            cur = act(group.frobenius, cur)
            for i in range(n):
                out[i] = out[i] + cur[i]
        return out

    raise LinvError(f"unknown idempotent kind {kind!r}")


# -- small group constructors (used by tests and synthetic fixtures) -----------

def cyclic_group_table(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def dihedral_group_table(m):
    """Dihedral group of order 2m: element 2k is rotation^k, 2k+1 is
    rotation^k composed with the reflection.  Identity at index 0."""
    order = 2 * m

    def idx(r, s):
        return 2 * (r % m) + s

    table = [[0] * order for _ in range(order)]
    for i in range(order):
        r1, s1 = i // 2, i % 2
        for j in range(order):
            r2, s2 = j // 2, j % 2
            # rot^r1 ref^s1 * rot^r2 ref^s2, using ref rot ref = rot^-1
            if s1 == 0:
                r, s = r1 + r2, s1 ^ s2
            else:
                r, s = r1 - r2, s1 ^ s2
            table[i][j] = idx(r, s)
    return table


def product_group_table(t1, t2):
    """Direct product; index = i1 * len(t2) + i2."""
    n1, n2 = len(t1), len(t2)
    table = [[0] * (n1 * n2) for _ in range(n1 * n2)]
    for a1 in range(n1):
        for a2 in range(n2):
            for b1 in range(n1):
                for b2 in range(n2):
                    table[a1 * n2 + a2][b1 * n2 + b2] = t1[a1][b1] * n2 + t2[a2][b2]
    return table
