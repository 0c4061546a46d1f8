"""The core pipeline: W-circle, regulators, regularity verdicts, extra-zero
order, the kernel basis of unit-valued directions, the four log/ord matrices,
and the L-invariant evaluated by two independent routes (block determinant
and Schur complement), plus the dual determinant route.

Everything is a pure function of (problem, refinement); independent
refinements may be evaluated concurrently.
"""
from __future__ import annotations

from fractions import Fraction

from . import fixtures, galois, linalg
from .errors import (
    AmbiguousRankError,
    LinvError,
    OMinusSingularError,
    PrecisionError,
    SingularRefinementError,
)
from .linalg import PMatrix
from .padic import embed, frobenius, iwasawa_log, trace_to_base


class Refinement:
    """A candidate G_p-stable subspace W+ of dimension d+."""

    def __init__(self, basis, name="ref", motivic=False):
        self.basis = [list(v) for v in basis]
        self.name = name
        self.motivic = motivic

    @staticmethod
    def named(prob, name):
        ref = prob.refinement_named(name)
        return Refinement(ref["basis"], ref["name"], ref["motivic"])

    @staticmethod
    def line(prob, s, vectors=None, name=None):
        """Refinement spanned by v0 + s*v1 (s = None means infinity: v1).

        vectors defaults to the first two standard basis vectors of W."""
        L = prob.coeff_field
        d = prob.W.dim
        if vectors is None:
            e0 = [L.one() if i == 0 else L.zero() for i in range(d)]
            e1 = [L.one() if i == 1 else L.zero() for i in range(d)]
            vectors = (e0, e1)
        v0, v1 = vectors
        if s is None:
            vec = list(v1)
            label = "s=inf"
        else:
            vec = [a + s * b for a, b in zip(v0, v1)]
            label = "s"
        return Refinement([vec], name or label)


class RegularityVerdict:
    def __init__(self, regular, reg_value, w_circle_dim, split_holds, detail=""):
        self.regular = regular
        self.reg_value = reg_value
        self.w_circle_dim = w_circle_dim
        self.split_holds = split_holds
        self.detail = detail

    def __bool__(self):
        return self.regular

    def __repr__(self):
        return (f"RegularityVerdict({'regular' if self.regular else 'singular'}, "
                f"dim W°={self.w_circle_dim}, split={self.split_holds})")


class BasesOverride:
    """Optional replacement bases for Notation-style assembly (used to test
    basis independence and special completions)."""

    def __init__(self, w_plus=None, w_minus=None, kappas=None, kappa_primes=None):
        self.w_plus = w_plus
        self.w_minus = w_minus
        self.kappas = kappas
        self.kappa_primes = kappa_primes


class LInvariantReport:
    def __init__(self, refinement, e, reg, A_plus, A_minus, B_plus, B_minus,
                 O_minus, value_block, value_schur, certified_digits,
                 basis_audit, dims):
        self.refinement = refinement
        self.e = e
        self.reg = reg
        self.A_plus = A_plus
        self.A_minus = A_minus
        self.B_plus = B_plus
        self.B_minus = B_minus
        self.O_minus = O_minus
        self.value_block = value_block
        self.value_schur = value_schur
        self.certified_digits = certified_digits
        self.basis_audit = basis_audit
        self.dims = dims

    @property
    def value(self):
        return self.value_block

    def to_payload(self):
        def matpay(m):
            return m.to_payload() if m is not None else None

        return {
            "refinement": self.refinement,
            "e": self.e,
            "dims": self.dims,
            "regulator": self.reg.to_payload(),
            "A_plus": matpay(self.A_plus),
            "A_minus": matpay(self.A_minus),
            "B_plus": matpay(self.B_plus),
            "B_minus": matpay(self.B_minus),
            "O_minus": matpay(self.O_minus),
            "value_block": self.value_block.to_payload(),
            "value_schur": self.value_schur.to_payload(),
            "value_repr": repr(self.value_block),
            "certified_digits": self.certified_digits,
            "basis_audit": self.basis_audit,
        }


class Pipeline:
    """Precomputes the equivariant Hom spaces of one problem; individual
    refinements are then evaluated against it."""

    def __init__(self, prob):
        self.prob = prob
        self.L = prob.coeff_field
        self.W = prob.W
        self.group = prob.group
        self.units = prob.units
        self.d = prob.W.dim
        self.d_plus = prob.d_plus()
        self.f = prob.f_frob_fixed()
        self.homs_p = galois.equivariant_homs(self.W, self.units.action)
        if len(self.homs_p) != self.d_plus + self.f:
            raise AmbiguousRankError(
                f"dim Hom_G(W, U^(p)) = {len(self.homs_p)}, expected "
                f"{self.d_plus + self.f} (Dirichlet count)")
        self.kappas = fixtures.unit_valued_homs(prob)
        if len(self.kappas) != self.d_plus:
            raise AmbiguousRankError(
                f"dim Hom_G(W, U_H) = {len(self.kappas)}, expected {self.d_plus}")
        self._w_circle = None

    # -- scalar evaluations -----------------------------------------------------

    def log_hom(self, hom, wvec):
        return self.units.log_of(hom.apply(wvec), self.L)

    def ord_hom(self, hom, wvec):
        return self.units.ord_of(hom.apply(wvec), self.L)

    def trace_log_hom(self, hom, wvec):
        """log through the trace route: (1/f_p) Tr_{E/Qp} applied to the
        E-side logs (coincides with log_hom on Frobenius-invariants)."""
        units, L = self.units, self.L
        E = self.prob.field_E
        vec = hom.apply(wvec)
        logs_E = units.logs_E
        if logs_E is None:
            units.logs_in(L)
            logs_E = units.logs_E
        acc = L.zero()
        for c, lg in zip(vec, logs_E):
            if c.is_exact_zero():
                continue
            acc = acc + c * embed(trace_to_base(lg), L)
        return acc / L.from_int(E.f0)

    # -- W-circle and regularity ---------------------------------------------------

    def w_circle(self):
        """Basis of the subspace of W annihilated by the logs of every
        unit-valued equivariant hom."""
        if self._w_circle is not None:
            return self._w_circle
        L, d = self.L, self.d
        if not self.kappas:
            basis = [[L.one() if i == j else L.zero() for j in range(d)]
                     for i in range(d)]
            self._w_circle = basis
            return basis
        e_vecs = [[L.one() if i == j else L.zero() for i in range(d)]
                  for j in range(d)]
        rows = []
        for kappa in self.kappas:
            rows.append([self.log_hom(kappa, ev) for ev in e_vecs])
        self._w_circle = linalg.kernel_basis(PMatrix(L, rows), assume_zeros=True)
        return self._w_circle

    def regulator(self, ref):
        """det(log kappa_j(w+_i)) in the given bases; 1 when d+ = 0."""
        L = self.L
        if self.d_plus == 0:
            return L.one()
        if len(ref.basis) != self.d_plus:
            raise LinvError(f"refinement has dimension {len(ref.basis)}, "
                            f"but d+ = {self.d_plus}")
        rows = [[self.log_hom(kappa, w) for kappa in self.kappas]
                for w in ref.basis]
        return linalg.determinant(PMatrix(L, rows))

    def is_regular(self, ref):
        """Both regularity criteria, asserted to agree: Reg != 0 and
        W = W+ (+) W-circle."""
        L = self.L
        try:
            reg = self.regulator(ref)
            reg_nonzero = reg.is_certified_nonzero()
            reg_decided = True
        except AmbiguousRankError:
            reg = L.zero()
            reg_nonzero = False
            reg_decided = False
        wc = self.w_circle()
        dim_wc = len(wc)
        stacked = [list(v) for v in wc] + [list(v) for v in ref.basis]
        rk = linalg.rank(PMatrix(L, stacked), assume_zeros=True) if stacked else 0
        split = (dim_wc == self.d - self.d_plus) and rk == self.d
        if reg_decided and reg_nonzero != split:
            raise PrecisionError(
                "regularity criteria disagree (Reg != 0 vs W = W+ (+) W°): "
                "precision shortfall or inconsistent fixture")
        if not reg_decided and split:
            raise PrecisionError(
                "regulator indistinguishable from zero but the direct-sum "
                "criterion holds: precision shortfall")
        detail = ""
        if dim_wc != self.d - self.d_plus:
            detail = (f"dim W° = {dim_wc} != d - d+ = {self.d - self.d_plus}: "
                      "no regular refinement exists (Leopoldt-type failure)")
        return RegularityVerdict(reg_nonzero and split, reg, dim_wc, split, detail)

    # -- Frobenius structure -----------------------------------------------------

    def w1_basis(self):
        """Basis of W_1 = the Frobenius-fixed subspace of W."""
        return galois.fixed_subspace(self.W, [self.group.frobenius])

    def w1_plus_basis(self, ref):
        """Basis of W_1^+ = W^+ intersect W_1, expressed in W coordinates."""
        L = self.L
        if not ref.basis:
            return []
        frob_mat = self.W.matrix(self.group.frobenius)
        cols = []
        for w in ref.basis:
            img = frob_mat.apply(w)
            cols.append([a - b for a, b in zip(img, w)])
        m = PMatrix(L, [[cols[k][i] for k in range(len(cols))]
                        for i in range(self.d)])
        coeffs = linalg.kernel_basis(m, assume_zeros=True)
        out = []
        for c in coeffs:
            vec = [L.zero()] * self.d
            for ck, w in zip(c, ref.basis):
                if ck.is_exact_zero():
                    continue
                vec = [v + ck * wi for v, wi in zip(vec, w)]
            out.append(vec)
        return out

    def extra_zero_order(self, ref):
        """(e, basis of W_1^- lifts, basis of W_{-1}^- lifts): e is the
        dimension of the Frobenius-fixed part of W/W^+; the minus-split is
        the complementary Frobenius eigen-splitting of the quotient."""
        verdict = self.is_regular(ref)
        if not verdict:
            raise SingularRefinementError(
                f"refinement {ref.name!r} is singular; extra-zero order "
                "requires a regular refinement")
        w1p = self.w1_plus_basis(ref)
        e = self.f - len(w1p)
        w_minus = self._w_minus_default(ref, w1p)
        minus_one = self._w_minus_one_part(ref)
        return e, w_minus, minus_one

    def _w_minus_default(self, ref, w1p):
        """Complete W_1^+ to a basis of W_1; the added vectors project onto a
        basis of W_1^-."""
        L = self.L
        w1 = self.w1_basis()
        # work in coordinates of W_1
        w1_mat = PMatrix(L, [[w1[k][i] for k in range(len(w1))]
                             for i in range(self.d)])
        coords = []
        for v in w1p:
            coords.append(_solve_in_span(w1_mat, v))
        full = linalg.complete_basis(L, coords, len(w1), assume_zeros=True)
        added = full[len(coords):]
        out = []
        for c in added:
            vec = [L.zero()] * self.d
            for ck, w in zip(c, w1):
                if ck.is_exact_zero():
                    continue
                vec = [v + ck * wi for v, wi in zip(vec, w)]
            out.append(vec)
        return out

    def _w_minus_one_part(self, ref):
        """Lifts of a basis of W_{-1}^-: the image of (Frob - 1) on W,
        taken modulo W^+."""
        L = self.L
        frob_mat = self.W.matrix(self.group.frobenius)
        cols = []
        for j in range(self.d):
            ej = [L.one() if i == j else L.zero() for i in range(self.d)]
            img = frob_mat.apply(ej)
            cols.append([a - b for a, b in zip(img, ej)])
        rows = [[cols[j][i] for j in range(self.d)] for i in range(self.d)]
        m = PMatrix(L, rows)
        ech, rk, piv = linalg.row_reduce(m.transpose(), assume_zeros=True)
        vecs = [list(ech.rows[i]) for i in range(rk)]
        # reduce modulo W^+: keep those independent from W^+
        base = [list(v) for v in ref.basis]
        out = []
        for v in vecs:
            trial = base + out + [v]
            if linalg.rank(PMatrix(L, trial), assume_zeros=True) == len(trial):
                out.append(v)
        return out

    # -- kappa-prime directions ----------------------------------------------------

    def kernel_ord_on_w1plus(self, ref):
        """Kernel of the map kappa -> (ord kappa(w))_{w in W_1^+ basis} on
        Hom_G(W, U^(p)); contains the unit-valued homs, dimension d+ + e."""
        L = self.L
        w1p = self.w1_plus_basis(ref)
        e = self.f - len(w1p)
        n = len(self.homs_p)
        if not w1p:
            return list(self.homs_p), e
        rows = []
        for w in w1p:
            rows.append([self.ord_hom(hom, w) for hom in self.homs_p])
        coeffs = linalg.kernel_basis(PMatrix(L, rows), assume_zeros=True,
                                     expected_nullity=self.d_plus + e)
        out = []
        for c in coeffs:
            acc = PMatrix.zeros(L, self.units.rank_total, self.d)
            for ck, hom in zip(c, self.homs_p):
                if ck.is_exact_zero():
                    continue
                acc = acc + hom * ck
            out.append(acc)
        return out, e

    def kappa_prime_basis(self, ref, rotation=0):
        """e further directions completing the unit-valued homs inside the
        kernel of the ord-restriction conditions; `rotation` re-orders the
        deterministic greedy candidates (used when det O^- needs a retry)."""
        kern, e = self.kernel_ord_on_w1plus(ref)
        if len(kern) != self.d_plus + e:
            raise AmbiguousRankError(
                f"kernel of the ord-restriction map has dimension {len(kern)}, "
                f"expected d+ + e = {self.d_plus + e}")
        if e == 0:
            return [], e
        L = self.L
        flat_kappas = [_flatten(m) for m in self.kappas]
        candidates = list(range(len(kern)))
        if rotation:
            rot = rotation % len(candidates)
            candidates = candidates[rot:] + candidates[:rot]
        chosen = []
        base = list(flat_kappas)
        for idx in candidates:
            if len(chosen) == e:
                break
            trial = base + [_flatten(kern[idx])]
            if linalg.rank(PMatrix(L, trial), assume_zeros=True) == len(trial):
                base = trial
                chosen.append(kern[idx])
        if len(chosen) != e:
            raise AmbiguousRankError("could not complete kappa' directions")
        return chosen, e

    # -- assembly and the main formula ------------------------------------------------

    def assemble_matrices(self, ref, bases=None, rotation=0):
        """The matrices A+, A-, B+, B-, O- of the main formula in the
        deterministic bases (or the supplied override)."""
        L = self.L
        bases = bases or BasesOverride()
        w1p = self.w1_plus_basis(ref)
        e = self.f - len(w1p)

        if bases.w_plus is not None:
            w_plus = [list(v) for v in bases.w_plus]
        else:
            coords = [[v[i] for i in range(self.d)] for v in w1p]
            # complete W_1^+ inside W^+ greedily over the refinement basis
            w_plus = [list(v) for v in w1p]
            for cand in ref.basis:
                if len(w_plus) == self.d_plus:
                    break
                trial = w_plus + [list(cand)]
                if linalg.rank(PMatrix(L, trial), assume_zeros=True) == len(trial):
                    w_plus.append(list(cand))
            if len(w_plus) != self.d_plus:
                raise AmbiguousRankError("could not complete W_1^+ inside W^+")

        if bases.w_minus is not None:
            w_minus = [list(v) for v in bases.w_minus]
        else:
            w_minus = self._w_minus_default(ref, w1p)
        if len(w_minus) != e:
            raise LinvError(f"w_minus basis must have e = {e} vectors")

        kappas = bases.kappas if bases.kappas is not None else self.kappas
        if bases.kappa_primes is not None:
            kappa_primes = bases.kappa_primes
        else:
            kappa_primes, _ = self.kappa_prime_basis(ref, rotation)

        def logm(ws, homs):
            if not ws or not homs:
                return PMatrix(L, []) if not ws else PMatrix(L, [[] for _ in ws])
            return PMatrix(L, [[self.log_hom(h, w) for h in homs] for w in ws])

        def ordm(ws, homs):
            if not ws or not homs:
                return PMatrix(L, []) if not ws else PMatrix(L, [[] for _ in ws])
            return PMatrix(L, [[self.ord_hom(h, w) for h in homs] for w in ws])

        A_plus = logm(w_plus, kappas)
        A_minus = logm(w_minus, kappas)
        B_plus = logm(w_plus, kappa_primes)
        B_minus = logm(w_minus, kappa_primes)
        O_minus = ordm(w_minus, kappa_primes)
        audit = {
            "e": e,
            "w1_plus_dim": len(w1p),
            "kappa_prime_rotation": rotation,
            "override": {
                "w_plus": bases.w_plus is not None,
                "w_minus": bases.w_minus is not None,
                "kappas": bases.kappas is not None,
                "kappa_primes": bases.kappa_primes is not None,
            },
        }
        return A_plus, A_minus, B_plus, B_minus, O_minus, e, audit

    def l_invariant(self, ref, bases=None, max_attempts=6):
        verdict = self.is_regular(ref)
        if not verdict:
            raise SingularRefinementError(
                f"refinement {ref.name!r} is singular"
                + (f" ({verdict.detail})" if verdict.detail else ""))
        L = self.L
        last_exc = None
        for attempt in range(max_attempts):
            A_plus, A_minus, B_plus, B_minus, O_minus, e, audit = \
                self.assemble_matrices(ref, bases, rotation=attempt)
            if e == 0:
                one = L.one()
                report = LInvariantReport(
                    ref.name, 0, verdict.reg_value, A_plus, A_minus, B_plus,
                    B_minus, O_minus, one, one, L.precision, audit,
                    self._dims())
                return report
            try:
                det_O = linalg.determinant(O_minus)
                if not det_O.is_certified_nonzero():
                    raise OMinusSingularError("det O^- vanishes to precision")
            except (AmbiguousRankError, OMinusSingularError) as exc:
                last_exc = exc
                if bases is not None and bases.kappa_primes is not None:
                    raise OMinusSingularError(str(exc))
                continue
            D = self.d_plus
            block = PMatrix(L, [A_plus.rows[i] + B_plus.rows[i] for i in range(D)]
                            + [A_minus.rows[i] + B_minus.rows[i] for i in range(e)])
            det_block = linalg.determinant(block)
            det_A = linalg.determinant(A_plus) if D else L.one()
            sign = 1 if e % 2 == 0 else -1
            value_block = det_block / (det_A * det_O)
            if sign < 0:
                value_block = -value_block
            # Schur route: (-1)^e det(B- - A- (A+)^-1 B+) / det(O-)
            if D:
                ainv_b = linalg.solve_right(A_plus, B_plus)
                schur_mat = B_minus - A_minus * ainv_b
            else:
                schur_mat = B_minus
            det_schur = linalg.determinant(schur_mat)
            value_schur = det_schur / det_O
            if sign < 0:
                value_schur = -value_schur
            if not value_block.agrees_with(value_schur):
                raise PrecisionError(
                    "block-determinant and Schur-complement routes disagree "
                    "beyond certified precision (internal inconsistency)")
            digits = min(value_block.relative_digits(),
                         value_schur.relative_digits())
            return LInvariantReport(
                ref.name, e, verdict.reg_value, A_plus, A_minus, B_plus,
                B_minus, O_minus, value_block, value_schur, digits, audit,
                self._dims())
        raise OMinusSingularError(
            f"det O^- singular in every basis completion attempted "
            f"({max_attempts} tries): {last_exc}")

    def _dims(self):
        return {"d": self.d, "d_plus": self.d_plus, "d_minus": self.d - self.d_plus,
                "f": self.f}


def _flatten(m):
    out = []
    for row in m.rows:
        out.extend(row)
    return out


def _solve_in_span(span_mat, vec):
    """Coordinates of vec in the column span of span_mat."""
    L = span_mat.field
    b = PMatrix(L, [[x] for x in vec])
    ncols = span_mat.ncols
    aug = PMatrix(L, [span_mat.rows[i] + b.rows[i] for i in range(span_mat.nrows)])
    red, rk, piv = linalg.rref(aug, assume_zeros=True)
    coords = [L.zero()] * ncols
    for r, c in enumerate(piv):
        if c == ncols:
            raise LinvError("vector not in span")
        if c < ncols:
            coords[c] = red.rows[r][ncols]
    return coords


# -- module-level operations matching the published surface ----------------------


def w_circle(prob):
    return Pipeline(prob).w_circle()


def regulator(prob, ref):
    return Pipeline(prob).regulator(ref)


def is_regular(prob, ref):
    return Pipeline(prob).is_regular(ref)


def extra_zero_order(prob, ref):
    pipe = Pipeline(prob)
    e, w_minus, _ = pipe.extra_zero_order(ref)
    return e, w_minus


def kappa_prime_basis(prob, ref):
    homs, _ = Pipeline(prob).kappa_prime_basis(ref)
    return homs


def assemble_matrices(prob, ref, bases=None):
    return Pipeline(prob).assemble_matrices(ref, bases)


def l_invariant(prob, ref, bases=None):
    return Pipeline(prob).l_invariant(ref, bases)


def dual_l_invariant(Jf, Jc, e=None):
    """(-1)^e det(Jf Jc^-1) for evaluated cocycle matrices (dual route)."""
    if Jf.nrows != Jf.ncols or Jc.nrows != Jc.ncols or Jf.nrows != Jc.nrows:
        raise LinvError("dual route needs square matrices of equal size")
    if e is None:
        e = Jf.nrows
    det_c = linalg.determinant(Jc)
    if not det_c.is_certified_nonzero():
        raise PrecisionError("J_c is singular (or vanishes to precision)")
    val = linalg.determinant(Jf) / det_c
    return val if e % 2 == 0 else -val
