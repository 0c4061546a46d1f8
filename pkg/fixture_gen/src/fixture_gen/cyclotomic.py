"""Exact arithmetic in Z[zeta_8] (enough cyclotomic machinery for the
biquadratic dihedral-CM recipe).

Elements are integer coefficient vectors on 1, z, z^2, z^3 modulo
z^4 = -1.  All automorphisms are explicit: z -> z^k for odd k.
"""
from __future__ import annotations


class Zeta8:
    """Integer combination of powers of an eighth root of unity."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = list(coeffs) + [0] * (4 - len(coeffs))
        self.c = tuple(int(x) for x in c[:4])

    @staticmethod
    def zero():
        return Zeta8((0, 0, 0, 0))

    @staticmethod
    def one():
        return Zeta8((1, 0, 0, 0))

    @staticmethod
    def zeta(power=1):
        power %= 8
        sign = 1
        if power >= 4:
            power -= 4
            sign = -1
        c = [0, 0, 0, 0]
        c[power] = sign
        return Zeta8(c)

    def __add__(self, other):
        return Zeta8(tuple(a + b for a, b in zip(self.c, other.c)))

    def __sub__(self, other):
        return Zeta8(tuple(a - b for a, b in zip(self.c, other.c)))

    def __neg__(self):
        return Zeta8(tuple(-a for a in self.c))

    def __mul__(self, other):
        if isinstance(other, int):
            return Zeta8(tuple(a * other for a in self.c))
        out = [0] * 7
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    if b:
                        out[i + j] += a * b
        # z^4 = -1
        for d in range(6, 3, -1):
            out[d - 4] -= out[d]
            out[d] = 0
        return Zeta8(out[:4])

    def __eq__(self, other):
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def apply_automorphism(self, k):
        """z -> z^k for odd k."""
        if k % 2 == 0:
            raise ValueError("automorphisms need odd exponents")
        acc = Zeta8.zero()
        for i, a in enumerate(self.c):
            if a:
                acc = acc + Zeta8.zeta(i * k) * a
        return acc

    def conjugates(self):
        return [self.apply_automorphism(k) for k in (1, 3, 5, 7)]

    def norm(self):
        """Product of all Galois conjugates (an ordinary integer)."""
        prod = Zeta8.one()
        for conj in self.conjugates():
            prod = prod * conj
        assert prod.c[1] == prod.c[2] == prod.c[3] == 0, "norm not rational"
        return prod.c[0]

    def eval_mod(self, zeta_value, mod):
        """Value under z -> zeta_value in Z/mod."""
        acc = 0
        zpow = 1
        for a in self.c:
            acc = (acc + a * zpow) % mod
            zpow = (zpow * zeta_value) % mod
        return acc

    def __repr__(self):
        names = ["1", "z", "z^2", "z^3"]
        terms = [f"{a}*{n}" for a, n in zip(self.c, names) if a]
        return " + ".join(terms) if terms else "0"


class GaussianInt:
    """Exact arithmetic in Z[i]."""

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = int(a)
        self.b = int(b)

    def conjugate(self):
        return GaussianInt(self.a, -self.b)

    def norm(self):
        return self.a * self.a + self.b * self.b

    def __mul__(self, other):
        return GaussianInt(self.a * other.a - self.b * other.b,
                           self.a * other.b + self.b * other.a)

    def eval_mod(self, i_value, mod):
        return (self.a + self.b * i_value) % mod

    def __repr__(self):
        return f"{self.a}{self.b:+d}*i"


def split_prime_gaussian(p):
    """(a, b) with a^2 + b^2 = p, a > b > 0 (deterministic); p = 1 mod 4."""
    if p % 4 != 1:
        raise ValueError(f"{p} does not split in Q(i)")
    for b in range(1, int(p ** 0.5) + 1):
        rest = p - b * b
        a = int(rest ** 0.5)
        for cand in (a - 1, a, a + 1):
            if cand > 0 and cand * cand == rest:
                hi, lo = max(cand, b), min(cand, b)
                return hi, lo
    raise ValueError(f"no two-square decomposition found for {p}")
