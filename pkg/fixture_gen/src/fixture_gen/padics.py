"""Self-contained p-adic integer helpers for embedding computations.

Kept independent of the engine on purpose: the generator's digits are then
an honest second opinion on the consumer's arithmetic.
"""
from __future__ import annotations


def teichmuller_int(a, p, digits):
    """The (p-1)-th root of unity congruent to a mod p, as an integer mod
    p^digits (fixed point of x -> x^p)."""
    if a % p == 0:
        raise ValueError("teichmuller of a non-unit")
    mod = p ** digits
    x = a % mod
    for _ in range(digits + 2):
        nxt = pow(x, p, mod)
        if nxt == x:
            break
        x = nxt
    return x


def int_valuation(n, p):
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def zp_payload(value, p, digits):
    """Engine wire-format payload of an ordinary p-adic integer known mod
    p^digits: little-endian digit list, shift 0."""
    v = value % p ** digits
    out = []
    for _ in range(digits):
        v, d = divmod(v, p)
        out.append(d)
    return {"coeffs": [out], "shift": 0, "prec": digits}
