"""Precision-aware linear algebra over a LocalField.

Pivots are selected by minimal valuation (maximal unit part) with the
lowest index winning ties, so intermediate matrices are reproducible.  A
rank decision that would rest on an entry which is zero to known precision
but not provably zero aborts with AmbiguousRankError instead of guessing.
"""
from __future__ import annotations

from .errors import AmbiguousRankError, LinvError, PrecisionError


class PMatrix:
    """Rectangular matrix of FieldElements sharing one parent field."""

    __slots__ = ("field", "rows", "nrows", "ncols")

    def __init__(self, field, rows):
        self.field = field
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != self.ncols:
                raise LinvError("ragged matrix")

    @staticmethod
    def identity(field, n):
        one, zero = field.one(), field.zero()
        return PMatrix(field, [[one if i == j else zero for j in range(n)]
                               for i in range(n)])

    @staticmethod
    def zeros(field, nrows, ncols):
        zero = field.zero()
        return PMatrix(field, [[zero] * ncols for _ in range(nrows)])

    @staticmethod
    def from_rational_rows(field, rows):
        return PMatrix(field, [[field.from_fraction(c) for c in r] for r in rows])

    def copy_rows(self):
        return [list(r) for r in self.rows]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i):
        return list(self.rows[i])

    def col(self, j):
        return [r[j] for r in self.rows]

    def transpose(self):
        return PMatrix(self.field, [[self.rows[i][j] for i in range(self.nrows)]
                                    for j in range(self.ncols)])

    def __add__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise LinvError("shape mismatch")
        return PMatrix(self.field, [[a + b for a, b in zip(ra, rb)]
                                    for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise LinvError("shape mismatch")
        return PMatrix(self.field, [[a - b for a, b in zip(ra, rb)]
                                    for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self):
        return PMatrix(self.field, [[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, PMatrix):
            if self.ncols != other.nrows:
                raise LinvError("shape mismatch")
            cols = other.ncols
            out = []
            for i in range(self.nrows):
                ri = self.rows[i]
                row = []
                for j in range(cols):
                    acc = self.field.zero()
                    for k in range(self.ncols):
                        a = ri[k]
                        if a.is_exact_zero():
                            continue
                        b = other.rows[k][j]
                        if b.is_exact_zero():
                            continue
                        acc = acc + a * b
                    row.append(acc)
                out.append(row)
            return PMatrix(self.field, out)
        return PMatrix(self.field, [[a * other for a in r] for r in self.rows])

    def apply(self, vec):
        """Matrix times column vector (list of FieldElements)."""
        if len(vec) != self.ncols:
            raise LinvError("shape mismatch")
        out = []
        for r in self.rows:
            acc = self.field.zero()
            for a, v in zip(r, vec):
                if a.is_exact_zero() or v.is_exact_zero():
                    continue
                acc = acc + a * v
            out.append(acc)
        return out

    def stack_below(self, other):
        if self.ncols != other.ncols:
            raise LinvError("shape mismatch")
        return PMatrix(self.field, self.copy_rows() + other.copy_rows())

    def min_precision(self):
        """Minimum certified absolute precision among entries (pi-digits)."""
        best = None
        for r in self.rows:
            for x in r:
                if x.is_exact_zero():
                    continue
                if best is None or x.aprec < best:
                    best = x.aprec
        return best

    def __repr__(self):
        return f"PMatrix({self.nrows}x{self.ncols} over {self.field!r})"

    def to_payload(self):
        return [[x.to_payload() for x in r] for r in self.rows]


def _classify_pivot(entries):
    """(best_index, ambiguous): smallest certified valuation among entries;
    ambiguous when nothing is certified nonzero but something is not an
    exact zero."""
    best_i, best_v = None, None
    saw_indeterminate = False
    for i, x in enumerate(entries):
        if x.is_exact_zero():
            continue
        v, ok = x._ord_pi()
        if ok:
            if best_v is None or v < best_v:
                best_i, best_v = i, v
        else:
            saw_indeterminate = True
    if best_i is not None:
        return best_i, False
    return None, saw_indeterminate


def row_reduce(m, assume_zeros=False):
    """Row echelon form by Gaussian elimination with valuation pivoting.

    Returns (echelon PMatrix, rank, pivot column indices).  By default a
    pivot decision resting on an entry that is zero to known precision but
    not provably zero raises AmbiguousRankError; with assume_zeros=True such
    entries are treated as zeros (numerical kernel at working precision --
    callers are expected to cross-check dimensions).
    """
    field = m.field
    rows = m.copy_rows()
    nrows, ncols = m.nrows, m.ncols
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        idx, ambiguous = _classify_pivot([rows[i][c] for i in range(r, nrows)])
        if idx is None:
            if ambiguous and not assume_zeros:
                raise AmbiguousRankError(
                    f"column {c}: all candidate pivots are zero to known precision "
                    "but not provably zero", column=c)
            continue
        i = r + idx
        if i != r:
            rows[r], rows[i] = rows[i], rows[r]
        piv = rows[r][c]
        for i2 in range(r + 1, nrows):
            x = rows[i2][c]
            if x.is_exact_zero():
                continue
            factor = x / piv
            rows[i2][c] = field.zero()  # eliminated by construction
            for j in range(c + 1, ncols):
                b = rows[r][j]
                if b.is_exact_zero():
                    continue
                rows[i2][j] = rows[i2][j] - factor * b
        pivots.append(c)
        r += 1
    return PMatrix(field, rows), len(pivots), pivots


def rank(m, assume_zeros=False):
    return row_reduce(m, assume_zeros)[1]


def rref(m, assume_zeros=False):
    """Reduced row echelon form (pivots scaled to 1, cleared above)."""
    field = m.field
    ech, rk, pivots = row_reduce(m, assume_zeros)
    rows = ech.copy_rows()
    for r in range(rk - 1, -1, -1):
        c = pivots[r]
        piv = rows[r][c]
        inv = piv.inverse()
        rows[r] = [x * inv if not x.is_exact_zero() else x for x in rows[r]]
        rows[r][c] = field.one()
        for r2 in range(r):
            x = rows[r2][c]
            if x.is_exact_zero():
                continue
            for j in range(c, m.ncols):
                b = rows[r][j]
                if b.is_exact_zero():
                    continue
                rows[r2][j] = rows[r2][j] - x * b
            rows[r2][c] = field.zero()
    return PMatrix(field, rows), rk, pivots


def kernel_basis(m, assume_zeros=False, expected_nullity=None):
    """Basis of the right kernel as a list of column vectors (lists of
    FieldElements); empty when the matrix is injective.

    With assume_zeros=True, entries that vanish to working precision are
    treated as zeros; when expected_nullity is given the resulting kernel
    dimension must match it (the caller's a-priori dimension count), else
    AmbiguousRankError is raised.
    """
    field = m.field
    red, rk, pivots = rref(m, assume_zeros)
    free = [j for j in range(m.ncols) if j not in pivots]
    if expected_nullity is not None and len(free) != expected_nullity:
        raise AmbiguousRankError(
            f"kernel dimension {len(free)} differs from the expected "
            f"{expected_nullity}; rank decision not certifiable at this precision")
    basis = []
    for j in free:
        vec = [field.zero()] * m.ncols
        vec[j] = field.one()
        for r, c in enumerate(pivots):
            vec[c] = -red.rows[r][j]
        basis.append(vec)
    return basis


def determinant(m):
    """Determinant by fraction-free (Bareiss) elimination with valuation
    pivoting; reported precision accounts for pivot valuations."""
    field = m.field
    if m.nrows != m.ncols:
        raise LinvError("determinant of a non-square matrix")
    n = m.nrows
    if n == 0:
        return field.one()
    a = m.copy_rows()
    sign = 1
    prev = field.one()
    for k in range(n):
        idx, ambiguous = _classify_pivot([a[i][k] for i in range(k, n)])
        if idx is None:
            if ambiguous:
                raise AmbiguousRankError(
                    f"determinant: column {k} is zero to known precision "
                    "but not provably zero", column=k)
            return field.zero()
        i = k + idx
        if i != k:
            a[k], a[i] = a[i], a[k]
            sign = -sign
        piv = a[k][k]
        for i2 in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i2][j] * piv - a[i2][k] * a[k][j]
                a[i2][j] = num / prev
            a[i2][k] = field.zero()
        prev = piv
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


def solve_right(a, b):
    """Solve a X = b for X; a square and invertible.  b is a PMatrix."""
    field = a.field
    if a.nrows != a.ncols:
        raise LinvError("solve_right needs a square matrix")
    n = a.nrows
    aug = PMatrix(field, [a.rows[i] + b.rows[i] for i in range(n)])
    red, rk, pivots = rref(aug)
    if rk < n or pivots[:n] != list(range(n)):
        raise AmbiguousRankError("matrix not certifiably invertible")
    return PMatrix(field, [red.rows[i][n:] for i in range(n)])


def inverse(a):
    return solve_right(a, PMatrix.identity(a.field, a.nrows))


def complete_basis(field, vectors, dim, assume_zeros=False):
    """Deterministic completion of an independent family to a basis of the
    ambient dim-dimensional space: greedily append standard basis vectors in
    index order whenever they raise the rank."""
    vecs = [list(v) for v in vectors]
    for v in vecs:
        if len(v) != dim:
            raise LinvError("vector length differs from dim")
    if vecs:
        _, rk, _ = row_reduce(PMatrix(field, vecs), assume_zeros)
        if rk < len(vecs):
            raise LinvError("complete_basis: given vectors are dependent at known precision")
    current = len(vecs)
    out = list(vecs)
    for j in range(dim):
        if current == dim:
            break
        cand = [field.zero()] * dim
        cand[j] = field.one()
        trial = out + [cand]
        _, rk, _ = row_reduce(PMatrix(field, trial), assume_zeros)
        if rk == len(trial):
            out.append(cand)
            current += 1
    if current != dim:
        raise AmbiguousRankError("complete_basis could not certify a completion")
    return out


def vectors_matrix(field, vectors):
    """PMatrix whose columns are the given vectors."""
    if not vectors:
        return PMatrix(field, [])
    n = len(vectors[0])
    return PMatrix(field, [[vectors[k][i] for k in range(len(vectors))]
                           for i in range(n)])
