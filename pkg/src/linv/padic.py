"""Precision-tracked arithmetic in finite extensions of the p-adic numbers.

A field is a tower  Q_p -- unramified step of degree f0 -- optional totally
ramified (Eisenstein) step of degree e.  Elements are stored as integer
coordinate vectors on the basis a^i * pi^j (a = unramified generator, pi =
Eisenstein root) together with a global power-of-p shift and an absolute
precision measured in pi-adic digits.  Operations propagate precision
pessimistically and never claim digits they cannot certify.

Valuations are normalized so that ord(p) = 1; internally they are integers
in units of 1/e (pi-adic digits).
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction

from .errors import LinvError, PrecisionError

INF = math.inf

# Defining polynomials for unramified steps, frozen so element coordinates
# are portable between runs and machines.  Key (p, f); value (c0..c_{f-1})
# encodes x^f + c_{f-1} x^{f-1} + ... + c0: the irreducible polynomial mod p
# whose coefficient vector is smallest in base-p counting order.
UNRAMIFIED_POLYS = {
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (2, 5): (1, 0, 1, 0, 0),
    (2, 6): (1, 1, 0, 0, 0, 0),
    (3, 2): (1, 0),
    (3, 3): (1, 2, 0),
    (3, 4): (2, 1, 0, 0),
    (3, 5): (1, 2, 0, 0, 0),
    (3, 6): (2, 1, 0, 0, 0, 0),
    (5, 2): (2, 0),
    (5, 3): (1, 1, 0),
    (5, 4): (2, 0, 0, 0),
    (5, 5): (1, 4, 0, 0, 0),
    (5, 6): (2, 1, 0, 0, 0, 0),
    (7, 2): (1, 0),
    (7, 3): (2, 0, 0),
    (7, 4): (1, 1, 0, 0),
    (7, 5): (3, 1, 0, 0, 0),
    (7, 6): (2, 0, 0, 0, 0, 0),
    (11, 2): (1, 0),
    (11, 3): (4, 1, 0),
    (11, 4): (2, 1, 0, 0),
    (13, 2): (2, 0),
    (13, 3): (2, 0, 0),
    (17, 2): (3, 0),
    (17, 3): (3, 1, 0),
    (19, 2): (1, 0),
    (23, 2): (1, 0),
    (29, 2): (2, 0),
    (31, 2): (1, 0),
    (37, 2): (2, 0),
    (41, 2): (3, 0),
    (43, 2): (1, 0),
    (47, 2): (1, 0),
    (53, 2): (2, 0),
    (59, 2): (1, 0),
    (61, 2): (2, 0),
}


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _int_val(c, p):
    if c == 0:
        return INF
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# polynomials over F_p (validation + fallback search for the table)

def _fp_deg(u, p):
    d = len(u) - 1
    while d >= 0 and u[d] % p == 0:
        d -= 1
    return d


def _fp_polmulmod(a, b, h, p):
    f = len(h)
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    for d in range(len(res) - 1, f - 1, -1):
        c = res[d]
        if c:
            res[d] = 0
            for i in range(f):
                res[d - f + i] = (res[d - f + i] - c * h[i]) % p
    res = res[:f]
    return res + [0] * (f - len(res))


def _fp_pow_x(exp, h, p):
    f = len(h)
    result = [1] + [0] * (f - 1)
    base = [0, 1] + [0] * (f - 2) if f > 1 else [(-h[0]) % p]
    while exp:
        if exp & 1:
            result = _fp_polmulmod(result, base, h, p)
        base = _fp_polmulmod(base, base, h, p)
        exp >>= 1
    return result


def _fp_polgcd(a, b, p):
    a = [x % p for x in a]
    b = [x % p for x in b]
    while True:
        db = _fp_deg(b, p)
        if db < 0:
            return a
        da = _fp_deg(a, p)
        if da < db:
            a, b = b, a
            continue
        inv = pow(b[db], -1, p)
        while da >= db:
            c = (a[da] * inv) % p
            if c:
                for i in range(db + 1):
                    a[da - db + i] = (a[da - db + i] - c * b[i]) % p
            da = _fp_deg(a, p)
        a, b = b, a


def _is_irreducible_mod_p(low_coeffs, p):
    f = len(low_coeffs)
    if f == 0:
        return True
    if f == 1:
        return True
    h = list(low_coeffs)
    xpf = _fp_pow_x(p ** f, h, p)
    target = [0, 1] + [0] * (f - 2)
    if [c % p for c in xpf] != target:
        return False
    for q in {d for d in range(2, f + 1) if f % d == 0 and is_prime(d)}:
        xpd = _fp_pow_x(p ** (f // q), h, p)
        diff = list(xpd)
        diff[1] = (diff[1] - 1) % p
        g = _fp_polgcd(h + [1], diff, p)
        if _fp_deg(g, p) > 0:
            return False
    return True


def unramified_poly(p, f):
    """Frozen defining polynomial (low coefficients) for the degree-f
    unramified step over Q_p.  Falls back to the same deterministic search
    that produced the table."""
    if f == 1:
        return ()
    key = (p, f)
    if key in UNRAMIFIED_POLYS:
        return UNRAMIFIED_POLYS[key]
    for code in range(p ** f):
        c = []
        cc = code
        for _ in range(f):
            c.append(cc % p)
            cc //= p
        if _is_irreducible_mod_p(c, p):
            return tuple(c)
    raise LinvError("no irreducible polynomial found (impossible)")


def _residue_poly_inverse(x, hlow, p):
    """Inverse of x in F_p[t]/(h); h monic with low coefficients hlow."""
    f = len(hlow)
    if f == 0:
        return [pow(x[0] % p, -1, p)]
    h = list(hlow) + [1]
    # extended Euclid: maintain s with s*x = b (mod h)
    a, sa = h, [0]
    b, sb = [c % p for c in x] + [0], [1]
    while True:
        db = _fp_deg(b, p)
        if db < 0:
            raise LinvError("residue not invertible")
        if db == 0:
            inv = pow(b[0], -1, p)
            out = [(c * inv) % p for c in sb]
            out = out[:f] + [0] * max(0, f - len(out))
            return out
        da = _fp_deg(a, p)
        if da < db:
            a, b, sa, sb = b, a, sb, sa
            continue
        invlead = pow(b[db], -1, p)
        aa = list(a)
        q = [0] * (da - db + 1)
        for d in range(da, db - 1, -1):
            c = (aa[d] * invlead) % p
            if c:
                q[d - db] = c
                for i in range(db + 1):
                    aa[d - db + i] = (aa[d - db + i] - c * b[i]) % p
        prod = [0] * (len(q) + len(sb) - 1)
        for i, qi in enumerate(q):
            if qi:
                for j, sj in enumerate(sb):
                    prod[i + j] = (prod[i + j] + qi * sj) % p
        news = [((sa[i] if i < len(sa) else 0) - (prod[i] if i < len(prod) else 0)) % p
                for i in range(max(len(sa), len(prod)))]
        a, sa = b, sb
        b, sb = aa, news


# ---------------------------------------------------------------------------


class LocalField:
    """A finite extension of Q_p with `precision` guaranteed p-adic digits.

    Immutable after construction; safe for concurrent reads.
    """

    def __init__(self, p, unramified_degree=1, eisenstein_poly=None, precision=20):
        if not is_prime(p):
            raise LinvError(f"p = {p} is not prime")
        if unramified_degree < 1:
            raise LinvError("unramified degree must be >= 1")
        if precision < 1:
            raise LinvError("precision must be >= 1")
        self.p = p
        self.f0 = unramified_degree
        self.precision = precision
        self.unram_poly = unramified_poly(p, unramified_degree)
        if unramified_degree > 1 and not _is_irreducible_mod_p(list(self.unram_poly), p):
            raise LinvError("unramified defining polynomial is reducible mod p")

        self._work_digits = 2 * precision + 8
        self._ppow = [1, p]
        self._ppow_lock = threading.Lock()

        if eisenstein_poly is None:
            self.e = 1
            self.eis_poly = None
            self.eis_poly_exact = None
        else:
            coeffs = [self._coerce_unram_vector(c) for c in eisenstein_poly]
            if not coeffs:
                raise LinvError("Eisenstein polynomial must have positive degree")
            self.e = len(coeffs)
            self.eis_poly = tuple(coeffs)
            self.eis_poly_exact = tuple(self._exact_unram_vector(c)
                                        for c in eisenstein_poly)

        self.n = self.f0 * self.e
        self.pi_cap = precision * self.e
        self._red_a = self._build_unram_reduction() if self.f0 > 1 else None
        self._red_pi = self._build_eis_reduction() if self.e > 1 else None
        if self.eis_poly is not None:
            self._check_eisenstein()
        self._zero = None
        self._one = None
        self._frob_gen_pows = None
        self._embed_cache = {}

    def ppow(self, k):
        """p^k with a growing cache (append guarded for concurrent use)."""
        pp = self._ppow
        if k < len(pp):
            return pp[k]
        with self._ppow_lock:
            while len(pp) <= k:
                pp.append(pp[-1] * self.p)
        return pp[k]

    # -- construction helpers -------------------------------------------------

    def _coerce_unram_vector(self, c):
        if isinstance(c, (int, Fraction)):
            c = Fraction(c)
            if c.denominator % self.p == 0:
                raise LinvError("Eisenstein coefficients must be integral at p")
            mod = self.ppow(self._work_digits)
            val = (c.numerator * pow(c.denominator, -1, mod)) % mod
            return (val,) + (0,) * (self.f0 - 1)
        vec = tuple(int(x) for x in c)
        if len(vec) != self.f0:
            raise LinvError("Eisenstein coefficient vector has wrong length")
        return vec

    def _exact_unram_vector(self, c):
        if isinstance(c, (int, Fraction)):
            return (Fraction(c),) + (Fraction(0),) * (self.f0 - 1)
        return tuple(Fraction(x) for x in c)

    def _build_unram_reduction(self):
        f0 = self.f0
        mod = self.ppow(self._work_digits)
        base = tuple((-c) % mod for c in self.unram_poly)
        reds = [base]
        for _ in range(f0 - 2):
            prev = reds[-1]
            nxt = [0] * f0
            for i in range(f0 - 1):
                nxt[i + 1] = prev[i]
            carry = prev[f0 - 1]
            if carry:
                for i in range(f0):
                    nxt[i] = (nxt[i] + carry * base[i]) % mod
            reds.append(tuple(nxt))
        return reds

    def _unram_mul(self, x, y, mod):
        """Product of two length-f0 vectors modulo (defining poly, mod)."""
        f0 = self.f0
        if f0 == 1:
            return ((x[0] * y[0]) % mod,)
        conv = [0] * (2 * f0 - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    conv[i + j] += xi * yj
        out = [c % mod for c in conv[:f0]]
        for d in range(f0, 2 * f0 - 1):
            c = conv[d] % mod
            if c:
                red = self._red_a[d - f0]
                for i in range(f0):
                    if red[i]:
                        out[i] = (out[i] + c * red[i]) % mod
        return tuple(out)

    def _build_eis_reduction(self):
        e, f0 = self.e, self.f0
        mod = self.ppow(self._work_digits)
        neg = [tuple((-c) % mod for c in vec) for vec in self.eis_poly]
        reds = [list(neg)]
        zero = (0,) * f0
        for _ in range(e - 2):
            prev = reds[-1]
            nxt = [zero] * e
            for j in range(e - 1):
                nxt[j + 1] = prev[j]
            carry = prev[e - 1]
            if any(carry):
                for j in range(e):
                    prod = self._unram_mul(carry, neg[j], mod)
                    nxt[j] = tuple((a + b) % mod for a, b in zip(nxt[j], prod))
            reds.append(nxt)
        return reds

    def _check_eisenstein(self):
        for j, vec in enumerate(self.eis_poly):
            v = min((_int_val(c, self.p) for c in vec if c), default=INF)
            if v < 1:
                raise LinvError(f"Eisenstein coefficient {j} is a unit: not Eisenstein")
            if j == 0 and v != 1:
                raise LinvError("Eisenstein constant term must have valuation exactly 1")

    # -- element constructors ---------------------------------------------------

    def zero(self):
        if self._zero is None:
            self._zero = FieldElement(self, (0,) * self.n, 0, INF,
                                      exact=(Fraction(0),) * self.n)
        return self._zero

    def one(self):
        if self._one is None:
            self._one = self.from_int(1)
        return self._one

    def from_int(self, m):
        if m == 0:
            return self.zero()
        exact = (Fraction(m),) + (Fraction(0),) * (self.n - 1)
        return FieldElement(self, (m,) + (0,) * (self.n - 1), 0, self.pi_cap, exact)

    def from_fraction(self, q):
        q = Fraction(q)
        if q == 0:
            return self.zero()
        num, den = q.numerator, q.denominator
        t = _int_val(den, self.p)
        if t:
            den //= self.p ** t
        shift = -t
        aprec = self.pi_cap
        k = max(1, self._digits_for(aprec, shift))
        mod = self.ppow(k)
        c = (num * pow(den, -1, mod)) % mod
        exact = (q,) + (Fraction(0),) * (self.n - 1)
        return FieldElement(self, (c,) + (0,) * (self.n - 1), shift, aprec, exact)

    def element(self, coords, shift=0, aprec=None):
        """Element from rational coordinates on the a^i pi^j basis."""
        coords = list(coords) + [0] * (self.n - len(coords))
        if aprec is None:
            aprec = self.pi_cap
        k = max(1, self._digits_for(aprec, shift))
        mod = self.ppow(k)
        vec = []
        exact = []
        pshift = Fraction(self.p) ** shift
        for c in coords:
            c = Fraction(c)
            if c.denominator % self.p == 0:
                raise LinvError("coordinate has p in denominator; use shift")
            vec.append((c.numerator * pow(c.denominator, -1, mod)) % mod)
            exact.append(c * pshift)
        return FieldElement(self, tuple(vec), shift, aprec, tuple(exact))

    def gen(self):
        if self.f0 == 1:
            raise LinvError("base step has no unramified generator")
        coords = [0] * self.n
        coords[1] = 1
        exact = tuple(Fraction(c) for c in coords)
        return FieldElement(self, tuple(coords), 0, self.pi_cap, exact)

    def uniformizer(self):
        if self.e == 1:
            return self.from_int(self.p)
        coords = [0] * self.n
        coords[self.f0] = 1
        exact = tuple(Fraction(c) for c in coords)
        return FieldElement(self, tuple(coords), 0, self.pi_cap, exact)

    def element_from_exact(self, exact, aprec=None):
        """Element with an exact rational mirror; storage derived from it."""
        exact = tuple(Fraction(c) for c in exact)
        if not any(exact):
            return self.zero()
        if aprec is None:
            aprec = self.pi_cap
        shift = min((_frac_val(c, self.p) for c in exact if c))
        shift = min(shift, 0)
        k = max(1, self._digits_for(aprec, shift))
        mod = self.ppow(k)
        pw = Fraction(self.p) ** (-shift)
        vec = []
        for c in exact:
            c2 = c * pw
            vec.append((c2.numerator * pow(c2.denominator, -1, mod)) % mod)
        return FieldElement(self, tuple(vec), shift, aprec, exact)

    def random_unit(self, rng):
        while True:
            coords = [rng.randrange(self.ppow(self.precision)) for _ in range(self.n)]
            if any(coords[i] % self.p for i in range(self.f0)):
                return FieldElement(self, tuple(coords), 0, self.pi_cap)

    def random_principal_unit(self, rng):
        coords = [1 + self.p * rng.randrange(self.ppow(self.precision))]
        coords += [self.p * rng.randrange(self.ppow(self.precision))
                   for _ in range(self.n - 1)]
        return FieldElement(self, tuple(coords), 0, self.pi_cap)

    def random_element(self, rng, min_val=0, max_val=None):
        if max_val is None:
            max_val = min_val
        v = rng.randint(min_val, max_val)
        u = self.random_unit(rng)
        return u * self.uniformizer() ** v if v else u

    # -- misc -------------------------------------------------------------------

    def _digits_for(self, aprec, shift):
        """Stored p-digits per coordinate for given precision and shift."""
        if aprec is INF:
            return 1
        return max(0, -(-int(aprec) // self.e) - shift)

    def degree(self):
        return self.n

    def residue_size(self):
        return self.p ** self.f0

    def __repr__(self):
        tail = f", e={self.e}" if self.e > 1 else ""
        return f"LocalField(p={self.p}, f0={self.f0}{tail}, N={self.precision})"

    def __eq__(self, other):
        return (isinstance(other, LocalField)
                and (self.p, self.f0, self.e, self.precision,
                     self.unram_poly, self.eis_poly)
                == (other.p, other.f0, other.e, other.precision,
                    other.unram_poly, other.eis_poly))

    def __hash__(self):
        return hash((self.p, self.f0, self.e, self.precision))

    def with_precision(self, N):
        eis = None
        if self.eis_poly_exact is not None:
            eis = [tuple(vec) for vec in self.eis_poly_exact]
        return LocalField(self.p, self.f0, eis, N)

    # -- frobenius ---------------------------------------------------------------

    def _frobenius_matrix(self):
        """Coordinates of sigma(a)^i, sigma = Frobenius of the unramified
        step (Hensel lift of the residue map a -> a^p)."""
        if self.e != 1:
            raise LinvError("frobenius implemented for unramified fields only")
        if self._frob_gen_pows is not None:
            return self._frob_gen_pows
        f0 = self.f0
        mod = self.ppow(self.precision + 4)
        low = list(self.unram_poly)
        a = (0, 1) + (0,) * (f0 - 2)
        x = _unram_pow(self, a, self.p, mod)
        for _ in range(self.precision.bit_length() + 3):
            hx = _eval_monic_unram(self, low, x, mod)
            dh = _eval_monic_unram_deriv(self, low, x, mod)
            inv = _unram_unit_inverse(self, dh, mod)
            delta = self._unram_mul(hx, inv, mod)
            x = tuple((xi - di) % mod for xi, di in zip(x, delta))
        pows = [(1,) + (0,) * (f0 - 1)]
        for _ in range(f0 - 1):
            pows.append(self._unram_mul(pows[-1], x, mod))
        self._frob_gen_pows = pows
        return pows


def _unram_pow(field, x, k, mod):
    result = (1,) + (0,) * (field.f0 - 1)
    base = x
    while k:
        if k & 1:
            result = field._unram_mul(result, base, mod)
        base = field._unram_mul(base, base, mod)
        k >>= 1
    return result


def _eval_monic_unram(field, low, x, mod):
    """(x^f + sum low[i] x^i) for vectors over the unramified step."""
    f = len(low)
    acc = [0] * field.f0
    powx = (1,) + (0,) * (field.f0 - 1)
    for c in low:
        if c:
            acc = [(a + c * px) % mod for a, px in zip(acc, powx)]
        powx = field._unram_mul(powx, x, mod)
    return tuple((a + px) % mod for a, px in zip(acc, powx))


def _eval_monic_unram_deriv(field, low, x, mod):
    f = len(low)
    acc = [0] * field.f0
    powx = (1,) + (0,) * (field.f0 - 1)
    for i in range(1, f):
        if low[i]:
            acc = [(a + i * low[i] * px) % mod for a, px in zip(acc, powx)]
        powx = field._unram_mul(powx, x, mod)
    # powx is now x^(f-1)
    return tuple((a + f * px) % mod for a, px in zip(acc, powx))


def _newton_steps(field, mod):
    digits = 1
    while field.ppow(digits) < mod:
        digits *= 2
    return max(3, digits.bit_length() + 1)


def _unram_unit_inverse(field, x, mod):
    p = field.p
    y0 = _residue_poly_inverse([c % p for c in x], list(field.unram_poly), p)
    y = tuple(y0) + (0,) * (field.f0 - len(y0))
    for _ in range(_newton_steps(field, mod)):
        xy = field._unram_mul(x, y, mod)
        two_minus = tuple(((2 if i == 0 else 0) - c) % mod for i, c in enumerate(xy))
        y = field._unram_mul(y, two_minus, mod)
    return y


def _tower_mul(f, x, y, mod):
    f0, e = f.f0, f.e
    if e == 1:
        return f._unram_mul(x, y, mod)
    xs = [x[j * f0:(j + 1) * f0] for j in range(e)]
    ys = [y[j * f0:(j + 1) * f0] for j in range(e)]
    conv = [[0] * f0 for _ in range(2 * e - 1)]
    for i, xi in enumerate(xs):
        if any(xi):
            for j, yj in enumerate(ys):
                if any(yj):
                    prod = f._unram_mul(xi, yj, mod)
                    row = conv[i + j]
                    for t in range(f0):
                        row[t] = (row[t] + prod[t]) % mod
    for d in range(2 * e - 2, e - 1, -1):
        c = tuple(conv[d])
        if any(c):
            red = f._red_pi[d - e]
            for j in range(e):
                if any(red[j]):
                    prod = f._unram_mul(c, red[j], mod)
                    row = conv[j]
                    for t in range(f0):
                        row[t] = (row[t] + prod[t]) % mod
            conv[d] = [0] * f0
    out = []
    for j in range(e):
        out.extend(conv[j])
    return tuple(out)


def _tower_unit_inverse(f, vec, mod):
    p = f.p
    y0 = _residue_poly_inverse([c % p for c in vec[:f.f0]], list(f.unram_poly), p)
    y = tuple(y0) + (0,) * (f.n - len(y0))
    steps = _newton_steps(f, mod) + (2 if f.e > 1 else 0)
    for _ in range(steps):
        xy = _tower_mul(f, vec, y, mod)
        two_minus = tuple(((2 if i == 0 else 0) - c) % mod for i, c in enumerate(xy))
        y = _tower_mul(f, y, two_minus, mod)
    return y


def _frac_val(c, p):
    if c == 0:
        return INF
    return _int_val(c.numerator, p) - _int_val(c.denominator, p)


def _exact_unram_mul(field, x, y):
    """Product of two length-f0 Fraction vectors modulo the defining poly."""
    f0 = field.f0
    if f0 == 1:
        return (x[0] * y[0],)
    conv = [Fraction(0)] * (2 * f0 - 1)
    for i, xi in enumerate(x):
        if xi:
            for j, yj in enumerate(y):
                conv[i + j] += xi * yj
    low = field.unram_poly
    for d in range(2 * f0 - 2, f0 - 1, -1):
        c = conv[d]
        if c:
            conv[d] = Fraction(0)
            for i in range(f0):
                conv[d - f0 + i] -= c * low[i]
    return tuple(conv[:f0])


def _exact_tower_mul(field, x, y):
    """Product of two length-n Fraction vectors in the full tower."""
    f0, e = field.f0, field.e
    if e == 1:
        return _exact_unram_mul(field, x, y)
    xs = [x[j * f0:(j + 1) * f0] for j in range(e)]
    ys = [y[j * f0:(j + 1) * f0] for j in range(e)]
    conv = [[Fraction(0)] * f0 for _ in range(2 * e - 1)]
    for i, xi in enumerate(xs):
        if any(xi):
            for j, yj in enumerate(ys):
                if any(yj):
                    prod = _exact_unram_mul(field, xi, yj)
                    row = conv[i + j]
                    for t in range(f0):
                        row[t] += prod[t]
    for d in range(2 * e - 2, e - 1, -1):
        c = tuple(conv[d])
        if any(c):
            # pi^d = pi^(d-e) * pi^e = -pi^(d-e) * sum eis_j pi^j
            for j in range(e):
                coeff = field.eis_poly_exact[j]
                if any(coeff):
                    prod = _exact_unram_mul(field, c, coeff)
                    row = conv[d - e + j]
                    for t in range(f0):
                        row[t] -= prod[t]
            conv[d] = [Fraction(0)] * f0
    out = []
    for j in range(e):
        out.extend(conv[j])
    return tuple(out)


def _exact_tower_inverse(field, x):
    """Rational inverse via the multiplication matrix (Gaussian over Q)."""
    n = field.n
    cols = []
    for j in range(n):
        basis = [Fraction(0)] * n
        basis[j] = Fraction(1)
        cols.append(_exact_tower_mul(field, x, tuple(basis)))
    # solve M y = e0 where M[i][j] = cols[j][i]
    aug = [[cols[j][i] for j in range(n)] + [Fraction(1 if i == 0 else 0)]
           for i in range(n)]
    for k in range(n):
        piv = None
        for i in range(k, n):
            if aug[i][k] != 0:
                piv = i
                break
        if piv is None:
            raise LinvError("exact inverse of a zero divisor (impossible in a field)")
        aug[k], aug[piv] = aug[piv], aug[k]
        inv = 1 / aug[k][k]
        aug[k] = [c * inv for c in aug[k]]
        for i in range(n):
            if i != k and aug[i][k]:
                factor = aug[i][k]
                aug[i] = [a - factor * b for a, b in zip(aug[i], aug[k])]
    return tuple(aug[i][n] for i in range(n))


class FieldElement:
    """Immutable precision-tracked element of a LocalField.

    value = p^shift * sum_{j<e, i<f0} vec[j*f0+i] a^i pi^j, known modulo
    pi^aprec (aprec = INF only for the exact zero).
    """

    __slots__ = ("field", "vec", "shift", "aprec", "exact")

    def __init__(self, field, vec, shift, aprec, exact=None):
        self.field = field
        if exact is not None and not any(exact):
            vec, shift, aprec = (0,) * field.n, 0, INF
        if aprec is not INF:
            aprec = int(aprec)
            k = field._digits_for(aprec, shift)
            if k <= 0:
                vec = (0,) * field.n
                shift = 0
            else:
                mod = field.ppow(k)
                vec = tuple(c % mod for c in vec)
        self.vec = vec
        self.shift = shift
        self.aprec = aprec
        self.exact = exact

    # -- inspection --------------------------------------------------------------

    def is_exact_zero(self):
        return self.aprec is INF

    def _ord_pi(self):
        """(pi-adic valuation capped at aprec, certified flag)."""
        if self.is_exact_zero():
            return INF, True
        f0, e, p = self.field.f0, self.field.e, self.field.p
        if self.exact is not None:
            best = None
            for idx, c in enumerate(self.exact):
                if c:
                    cand = e * _frac_val(c, p) + idx // f0
                    if best is None or cand < best:
                        best = cand
            return best, True
        best = None
        for idx, c in enumerate(self.vec):
            if c:
                j = idx // f0
                cand = e * (self.shift + _int_val(c, p)) + j
                if best is None or cand < best:
                    best = cand
        if best is None or best >= self.aprec:
            return self.aprec, False
        return best, True

    def valuation(self):
        """Normalized valuation with ord(p) = 1, as a Fraction."""
        if self.is_exact_zero():
            raise PrecisionError("valuation of exact zero")
        v, ok = self._ord_pi()
        if not ok:
            raise PrecisionError(
                f"element indistinguishable from 0 at O(pi^{self.aprec}): precision exhausted")
        return Fraction(v, self.field.e)

    def is_zero_to_precision(self):
        if self.is_exact_zero():
            return True
        return not self._ord_pi()[1]

    def is_certified_nonzero(self):
        if self.is_exact_zero():
            return False
        return self._ord_pi()[1]

    def relative_digits(self):
        """Certified significant p-adic digits (relative precision)."""
        if self.is_exact_zero():
            return INF
        v, ok = self._ord_pi()
        if not ok:
            return 0
        return (self.aprec - v) / self.field.e

    def precision_pdigits(self):
        if self.aprec is INF:
            return INF
        return self.aprec / self.field.e

    def normalized(self):
        """Equivalent element with the common p-power of the coordinate
        vector moved into the shift (keeps stored integers small)."""
        if self.is_exact_zero() or not any(self.vec):
            return self
        p = self.field.p
        w = min(_int_val(c, p) for c in self.vec if c)
        if w == 0:
            return self
        pw = self.field.ppow(w)
        vec = tuple(c // pw for c in self.vec)
        return FieldElement(self.field, vec, self.shift + w, self.aprec, self.exact)

    def approximate(self):
        """Copy without the exact rational mirror (a measured value)."""
        if self.exact is None:
            return self
        if self.is_exact_zero():
            return FieldElement(self.field, (0,) * self.field.n, 0,
                                self.field.pi_cap)
        return FieldElement(self.field, self.vec, self.shift, self.aprec)

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise LinvError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_fraction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_exact_zero():
            return other
        if other.is_exact_zero():
            return self
        f = self.field
        aprec = min(self.aprec, other.aprec)
        shift = min(self.shift, other.shift)
        m1 = f.ppow(self.shift - shift) if self.shift > shift else 1
        m2 = f.ppow(other.shift - shift) if other.shift > shift else 1
        vec = tuple(a * m1 + b * m2 for a, b in zip(self.vec, other.vec))
        exact = None
        if self.exact is not None and other.exact is not None:
            exact = tuple(a + b for a, b in zip(self.exact, other.exact))
        return FieldElement(f, vec, shift, aprec, exact)

    def __neg__(self):
        if self.is_exact_zero():
            return self
        exact = None if self.exact is None else tuple(-c for c in self.exact)
        return FieldElement(self.field, tuple(-c for c in self.vec), self.shift,
                            self.aprec, exact)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __radd__(self, other):
        return self + other

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        f = self.field
        if self.is_exact_zero() or other.is_exact_zero():
            return f.zero()
        v1, _ = self._ord_pi()
        v2, _ = other._ord_pi()
        aprec = min(self.aprec + v2, other.aprec + v1)
        shift = self.shift + other.shift
        exact = None
        if self.exact is not None and other.exact is not None:
            exact = _exact_tower_mul(f, self.exact, other.exact)
        k = f._digits_for(aprec, shift)
        if k <= 0:
            return FieldElement(f, (0,) * f.n, 0, aprec, exact)
        mod = f.ppow(k)
        vec = _tower_mul(f, self.vec, other.vec, mod)
        return FieldElement(f, vec, shift, aprec, exact)

    def __rmul__(self, other):
        return self * other

    def inverse(self):
        f = self.field
        if self.is_exact_zero():
            raise PrecisionError("inverse of exact zero")
        if self.exact is not None:
            inv = _exact_tower_inverse(f, self.exact)
            v, _ = self._ord_pi()
            return f.element_from_exact(inv, max(self.aprec - 2 * v, f.e))
        v, ok = self._ord_pi()
        if not ok:
            raise PrecisionError(
                f"inverse of element indistinguishable from 0 at O(pi^{self.aprec})")
        aprec_res = self.aprec - 2 * v
        e, f0, p = f.e, f.f0, f.p

        if e == 1:
            # x = p^(shift + w) * u with u a unit coordinate vector
            w = v - self.shift  # p-valuation of the raw vector
            vec = self.vec
            if w:
                pw = f.ppow(w)
                vec = tuple(c // pw for c in vec)
            k = max(1, f._digits_for(aprec_res, -v))
            mod = f.ppow(k)
            if f0 == 1:
                inv = (pow(vec[0] % mod, -1, mod),)
            else:
                inv = _unram_unit_inverse(f, vec, mod)
            return FieldElement(f, inv, -v, aprec_res)

        # ramified: clear pi- and p-powers to reach a unit, invert, restore.
        # self = x * p^q * pi^(r-e) with x a unit when r > 0, else x * p^q.
        q, r = divmod(v, e)
        x = self
        if r:
            x = x * _pi_power(f, e - r)  # ord_pi now e*(q+1)
            q += 1
        x = FieldElement(f, x.vec, x.shift - q, x.aprec - e * q)  # unit
        s, vec = x.shift, x.vec
        if s > 0:
            vec = tuple(c * f.ppow(s) for c in vec)
        elif s < 0:
            pw = f.ppow(-s)
            vec = tuple(c // pw for c in vec)  # divisible: x is a unit
        k = max(1, f._digits_for(aprec_res + e, -q) + 2)
        mod = f.ppow(k)
        inv = _tower_unit_inverse(f, vec, mod)
        res = FieldElement(f, inv, -q, aprec_res + e)
        if r:
            res = res * _pi_power(f, e - r)
        return FieldElement(f, res.vec, res.shift, aprec_res)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- comparisons ------------------------------------------------------------

    def agrees_with(self, other, digits=None):
        """True when self and other coincide on all digits both certify
        (optionally requiring >= `digits` p-adic digits of agreement)."""
        other = self._coerce(other)
        diff = self - other
        if diff.is_exact_zero():
            return True
        v, ok = diff._ord_pi()
        if ok:
            return False if digits is None else Fraction(v, self.field.e) >= digits
        if digits is None:
            return True
        return Fraction(diff.aprec, self.field.e) >= digits

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            try:
                return self.agrees_with(other)
            except LinvError:
                return False
        return NotImplemented

    __hash__ = None

    # -- presentation -------------------------------------------------------------

    def digit_lists(self):
        """Little-endian base-p digit list per coordinate (stored digits)."""
        f = self.field
        aprec = self.aprec if self.aprec is not INF else f.pi_cap
        k = max(0, f._digits_for(aprec, self.shift))
        out = []
        for c in self.vec:
            c = c % f.ppow(k) if k > 0 else 0
            digits = []
            for _ in range(k):
                c, d = divmod(c, f.p)
                digits.append(d)
            out.append(digits)
        return out

    def to_payload(self):
        return {
            "coeffs": self.digit_lists(),
            "shift": self.shift,
            "prec": None if self.aprec is INF else self.aprec,
        }

    @staticmethod
    def from_payload(field, obj):
        coeffs = obj["coeffs"]
        shift = int(obj.get("shift", 0))
        prec = obj.get("prec")
        if prec is None and not any(any(ds) for ds in coeffs):
            return field.zero()
        aprec = field.pi_cap if prec is None else int(prec)
        vec = []
        for ds in coeffs:
            c = 0
            for d in reversed(ds):
                c = c * field.p + int(d)
            vec.append(c)
        vec = vec + [0] * (field.n - len(vec))
        return FieldElement(field, tuple(vec), shift, aprec)

    def __repr__(self):
        f = self.field
        if self.is_exact_zero():
            return "0 (exact)"
        if f.n == 1:
            digits = self.digit_lists()[0]
            terms = []
            for i, d in enumerate(digits):
                if d:
                    k = i + self.shift
                    if k == 0:
                        terms.append(f"{d}")
                    elif k == 1:
                        terms.append(f"{d}*{f.p}")
                    else:
                        terms.append(f"{d}*{f.p}^{k}")
            body = " + ".join(terms) if terms else "0"
            return f"{body} + O({f.p}^{self.aprec})"
        return (f"FieldElement(digits={self.digit_lists()}, shift={self.shift}, "
                f"O(pi^{self.aprec}))")


def _pi_power(field, k):
    if not 0 <= k < field.e:
        raise LinvError("pi power out of range")
    if k == 0:
        return field.one()
    coords = [0] * field.n
    coords[k * field.f0] = 1
    return FieldElement(field, tuple(coords), 0, field.pi_cap + k)


# ---------------------------------------------------------------------------
# module-level operations


def make_field(p, f0=1, eis=None, N=20):
    """Construct a LocalField.  `eis`, when given, lists the low coefficients
    (c0, ..., c_{e-1}) of a monic Eisenstein polynomial over the unramified
    step; e.g. x^2 - 3 over Q_3 is eis=(-3, 0)."""
    return LocalField(p, f0, eis, N)


def valuation(x):
    return x.valuation()


def teichmuller(x):
    """The unique (q-1)-th root of unity congruent to x mod the maximal
    ideal, q = residue field size; computed by iterating y -> y^q."""
    f = x.field
    if x.is_exact_zero():
        raise PrecisionError("teichmuller of zero")
    v, ok = x._ord_pi()
    if not ok or v != 0:
        raise PrecisionError("teichmuller requires a certified unit")
    q = f.residue_size()
    vec = x.vec
    if x.shift > 0:
        vec = tuple(c * f.ppow(x.shift) for c in vec)
    elif x.shift < 0:
        pw = f.ppow(-x.shift)
        vec = tuple(c // pw for c in vec)  # valuation 0 ensures divisibility of the unit part
    # limit depends only on x mod pi: keep the residue slice, full precision
    y = FieldElement(f, vec[:f.f0] + (0,) * (f.n - f.f0), 0, f.pi_cap)
    for _ in range(f._digits_for(f.pi_cap, 0) + 3):
        ynew = y ** q
        ynew = FieldElement(f, ynew.vec, ynew.shift, f.pi_cap)
        if (ynew - y).is_zero_to_precision():
            return ynew
        y = ynew
    return y


def _log_principal_series(u1):
    """log series on a principal unit u1 with ord(u1 - 1) > e/(p-1)."""
    f = u1.field
    one = f.one()
    t = u1 - one
    if t.is_zero_to_precision():
        return FieldElement(f, (0,) * f.n, 0, t.aprec if t.aprec is not INF else f.pi_cap)
    target = t.aprec
    vt, _ = t._ord_pi()
    logp = math.log(f.p)
    n_max = int((target + f.e * (math.log(max(target, 2)) / logp + 2)) / vt) + 4
    acc = f.zero()
    tn = one
    for n in range(1, n_max + 1):
        tn = tn * t
        if n > 1 and n * vt - f.e * _int_val(n, f.p) >= target:
            continue
        term = tn / f.from_int(n) if n > 1 else tn
        if n % 2 == 0:
            term = -term
        acc = acc + term
    if acc.is_exact_zero():
        return FieldElement(f, (0,) * f.n, 0, target)
    return FieldElement(f, acc.vec, acc.shift, min(acc.aprec, target))


def iwasawa_log(x):
    """Iwasawa branch of the p-adic logarithm: log(p) = 0, Teichmuller roots
    of unity are killed, and log(xy) = log(x) + log(y)."""
    f = x.field
    if x.is_exact_zero():
        raise PrecisionError("log of zero")
    v, ok = x._ord_pi()
    if not ok:
        raise PrecisionError("log of element indistinguishable from zero")
    if f.e == 1:
        unit = FieldElement(f, x.vec, x.shift - v, x.aprec - v) if v else x
        scale = 1
    else:
        y = x ** f.e
        unit = FieldElement(f, y.vec, y.shift - v, y.aprec - f.e * v)
        scale = f.e
    zeta = teichmuller(unit)
    u1 = unit / zeta
    # power trick: enter the zone of rapid convergence, divide back after
    bound = Fraction(f.e, f.p - 1)
    k = 0
    while True:
        t = u1 - f.one()
        if t.is_zero_to_precision():
            break
        vt, _ = t._ord_pi()
        if Fraction(vt, 1) > bound:
            break
        u1 = u1 ** f.p
        k += 1
        if k > 4 * f.precision + 8:
            raise PrecisionError("log series does not reach requested precision")
    res = _log_principal_series(u1)
    if k:
        if res.is_exact_zero():
            res = FieldElement(f, (0,) * f.n, 0, u1.aprec - k * f.e)
        else:
            res = FieldElement(f, res.vec, res.shift - k, res.aprec - k * f.e)
    if scale != 1:
        res = res / f.from_int(scale)
    return res.normalized()


def frobenius(x, power=1):
    """Field Frobenius of an unramified field; generates all conjugates."""
    f = x.field
    if f.e != 1:
        raise LinvError("frobenius implemented for unramified fields only")
    power %= f.f0
    if power == 0 or x.is_exact_zero():
        return x
    pows = f._frobenius_matrix()
    root_digits = f.precision + 4  # accuracy of the cached sigma(a)^i table
    y = x
    for _ in range(power):
        v = y._ord_pi()[0]
        aprec = y.aprec if y.aprec is not INF else f.pi_cap
        aprec = min(aprec, v + root_digits)
        k = max(1, f._digits_for(aprec, y.shift))
        mod = f.ppow(k)
        vec = [0] * f.n
        for i, c in enumerate(y.vec):
            if c:
                for t in range(f.f0):
                    vec[t] = (vec[t] + c * pows[i][t]) % mod
        y = FieldElement(f, tuple(vec), y.shift, aprec)
    return y


def _mult_matrix_columns(x):
    """Coordinates of x*b_j for each basis vector b_j (shift excluded)."""
    f = x.field
    k = f._digits_for(x.aprec, x.shift) if x.aprec is not INF else f.precision + 2
    mod = f.ppow(max(1, k) + 2)
    cols = []
    for j in range(f.n):
        basis = [0] * f.n
        basis[j] = 1
        cols.append(_tower_mul(f, x.vec, tuple(basis), mod))
    return cols


_BASE_CACHE = {}


def base_field(f):
    if f.f0 == 1 and f.e == 1:
        return f
    key = (f.p, f.precision)
    if key not in _BASE_CACHE:
        _BASE_CACHE[key] = LocalField(f.p, 1, None, f.precision)
    return _BASE_CACHE[key]


def trace_to_base(x):
    """Trace to Q_p (trace of the multiplication-by-x matrix; for unramified
    steps this is the sum of the Frobenius conjugates)."""
    f = x.field
    base = base_field(f)
    if x.is_exact_zero():
        return base.zero()
    if f.n == 1:
        return FieldElement(base, x.vec, x.shift, x.aprec)
    cols = _mult_matrix_columns(x)
    tr = sum(cols[j][j] for j in range(f.n))
    aprec = int(x.aprec // f.e) if x.aprec is not INF else base.pi_cap
    return FieldElement(base, (tr,), x.shift, aprec)


def norm_to_base(x):
    """Norm to Q_p (determinant of the multiplication-by-x matrix)."""
    from . import linalg

    f = x.field
    base = base_field(f)
    if x.is_exact_zero():
        return base.zero()
    if f.n == 1:
        return FieldElement(base, x.vec, x.shift, x.aprec)
    cols = _mult_matrix_columns(x)
    aprec = int(x.aprec // f.e) if x.aprec is not INF else base.pi_cap
    rows = []
    for i in range(f.n):
        rows.append([FieldElement(base, (cols[j][i],), x.shift, aprec)
                     for j in range(f.n)])
    return linalg.determinant(linalg.PMatrix(base, rows))


def sqrt(x):
    """Square root (odd p, even valuation); deterministic sign choice:
    lexicographically smallest digit vector."""
    f = x.field
    if f.p == 2:
        raise LinvError("sqrt not implemented for p = 2")
    if x.is_exact_zero():
        return x
    v, ok = x._ord_pi()
    if not ok:
        raise PrecisionError("sqrt of element indistinguishable from zero")
    if v % 2:
        raise LinvError("odd valuation: no square root in the field")
    if v:
        if v % (2 * f.e):
            raise LinvError("valuation not divisible by 2e: not supported")
        down = FieldElement(f, x.vec, x.shift - v // f.e, x.aprec - v)
        y = sqrt(down)
        return FieldElement(f, y.vec, y.shift + v // (2 * f.e), y.aprec + v // 2)
    vec = x.vec
    if x.shift > 0:
        vec = tuple(c * f.ppow(x.shift) for c in vec)
    elif x.shift < 0:
        vec = tuple(c // f.ppow(-x.shift) for c in vec)
    x0 = FieldElement(f, vec, 0, x.aprec)
    p, f0 = f.p, f.f0
    res = tuple(c % p for c in x0.vec[:f0])
    found = None
    for code in range(p ** f0):
        cand = []
        cc = code
        for _ in range(f0):
            cand.append(cc % p)
            cc //= p
        sq = f._unram_mul(tuple(cand), tuple(cand), p)
        if tuple(c % p for c in sq) == res:
            found = tuple(cand)
            break
    if found is None:
        raise LinvError("element is not a square (non-residue)")
    y = FieldElement(f, found + (0,) * (f.n - f0), 0, x0.aprec)
    half = f.from_fraction(Fraction(1, 2))
    for _ in range(max(4, f._digits_for(x0.aprec, 0).bit_length() + 3)):
        y = (y + x0 / y) * half
    y = FieldElement(f, y.vec, y.shift, x0.aprec)
    cand = min((y, -y), key=lambda z: z.digit_lists())
    return cand


def embed(x, target):
    """Canonical embedding of an unramified field into one whose unramified
    degree it divides.  The root of the source polynomial is chosen
    deterministically (the generator maps to itself when the defining
    polynomials coincide)."""
    src = x.field
    if src.e != 1:
        raise LinvError("embed: source must be unramified")
    if target.p != src.p:
        raise LinvError("embed: different primes")
    if target.f0 % src.f0:
        raise LinvError("embed: source degree does not divide target degree")
    if src == target:
        return x
    if x.is_exact_zero():
        return target.zero()
    if src.f0 == 1:
        # plain coordinate transfer: no root arithmetic, no extra error
        aprec = x.aprec * target.e if x.aprec is not INF else INF
        return FieldElement(target, (x.vec[0],) + (0,) * (target.n - 1),
                            x.shift, aprec, x.exact if target.n == 1 else None)
    key = (src.p, src.f0, src.unram_poly)
    root_pows = target._embed_cache.get(key)
    if root_pows is None:
        root = _find_unram_root(src, target)
        mod = target.ppow(target._digits_for(target.pi_cap, 0) + 4)
        pows = [(1,) + (0,) * (target.n - 1)]
        for _ in range(src.f0 - 1):
            pows.append(_tower_mul(target, pows[-1], root, mod))
        root_pows = pows
        target._embed_cache[key] = root_pows
    # the cached root powers are accurate to root_digits p-digits; the
    # output cannot claim more than val(x) + root_digits
    root_digits = target._digits_for(target.pi_cap, 0) + 2
    v = x._ord_pi()[0]
    aprec_p = min(x.aprec, v + root_digits) if x.aprec is not INF \
        else v + root_digits
    k = max(1, -(-int(aprec_p) // 1) - min(x.shift, 0) + 2)
    mod = target.ppow(k)
    vec = [0] * target.n
    for i, c in enumerate(x.vec):
        if c:
            for t in range(target.n):
                vec[t] = (vec[t] + c * root_pows[i][t]) % mod
    return FieldElement(target, tuple(vec), x.shift, aprec_p * target.e)


def _find_unram_root(src, target):
    """Deterministic root of src's defining polynomial inside target:
    brute-force the residue field (smallest coordinate code), Hensel-lift."""
    p = target.p
    if src.f0 == target.f0 and src.unram_poly == target.unram_poly and target.e == 1:
        vec = [0] * target.n
        vec[1] = 1
        return tuple(vec)
    low = list(src.unram_poly)
    found = None
    for code in range(p ** target.f0):
        cand = [0] * target.n
        cc = code
        for i in range(target.f0):
            cand[i] = cc % p
            cc //= p
        acc = [0] * target.n
        powx = (1,) + (0,) * (target.n - 1)
        for c in low:
            if c:
                acc = [(a + c * px) % p for a, px in zip(acc, powx)]
            powx = _tower_mul(target, powx, tuple(cand), p)
        acc = [(a + px) % p for a, px in zip(acc, powx)]
        if not any(acc):
            found = tuple(cand)
            break
    if found is None:
        raise LinvError("no root in the target residue field")
    mod = target.ppow(target._digits_for(target.pi_cap, 0) + 4)
    x = found
    for _ in range(target.precision.bit_length() + 3):
        hx = _eval_low_poly_tower(low, x, target, mod, monic=True)
        dh = _eval_low_poly_deriv_tower(low, x, target, mod)
        inv = _tower_unit_inverse(target, dh, mod)
        delta = _tower_mul(target, hx, inv, mod)
        x = tuple((xi - di) % mod for xi, di in zip(x, delta))
    return x


def _eval_low_poly_tower(low, x, target, mod, monic):
    acc = [0] * target.n
    powx = (1,) + (0,) * (target.n - 1)
    for c in low:
        if c:
            acc = [(a + c * px) % mod for a, px in zip(acc, powx)]
        powx = _tower_mul(target, powx, x, mod)
    if monic:
        acc = [(a + px) % mod for a, px in zip(acc, powx)]
    return tuple(acc)


def _eval_low_poly_deriv_tower(low, x, target, mod):
    f = len(low)
    acc = [0] * target.n
    powx = (1,) + (0,) * (target.n - 1)
    for i in range(1, f):
        if low[i]:
            acc = [(a + i * low[i] * px) % mod for a, px in zip(acc, powx)]
        powx = _tower_mul(target, powx, x, mod)
    return tuple((a + f * px) % mod for a, px in zip(acc, powx))
