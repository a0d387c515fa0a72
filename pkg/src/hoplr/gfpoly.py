"""Polynomial arithmetic over prime fields F_b, with b = 2 fast paths.

A polynomial a_0 + a_1 X + ... + a_d X^d with digits a_i in {0, ..., b-1}
is encoded as the integer a_0 + a_1 b + ... + a_d b^d (evaluation at X = b).
The encoding is canonical: leading zero coefficients do not exist, and the
zero polynomial is the integer 0 with degree -inf.  For b = 2 the encoding
coincides with bit packing, so addition is XOR and multiplication is a
carry-less product.

The module provides irreducibility testing, multiplicative generators of
(F_b[X]/p)^* with exponent/discrete-log tables, and the digit map

    v_n(w/p) = first n base-b digits of the formal Laurent expansion of w/p,

which sends residue classes mod p to rationals v / b^n in [0, 1).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PrimeBase",
    "PolyGF",
    "Modulus",
    "ExpTable",
    "poly_degree",
    "poly_coeffs",
    "poly_from_coeffs",
    "poly_add",
    "poly_neg",
    "poly_mul",
    "poly_divmod",
    "poly_mulmod",
    "poly_powmod",
    "is_irreducible",
    "find_irreducible",
    "find_generator",
    "exp_table",
    "v_n_map",
    "laurent_digits",
]

NEG_INF = float("-inf")


def _is_prime(b: int) -> bool:
    if b < 2:
        return False
    i = 2
    while i * i <= b:
        if b % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class PrimeBase:
    """A prime base b; for b = 2 all arithmetic uses bit operations."""

    b: int

    def __post_init__(self) -> None:
        if not _is_prime(self.b):
            raise ValueError(f"base must be prime, got {self.b}")

    def __int__(self) -> int:
        return self.b

    def __index__(self) -> int:
        return self.b


def _base_int(base: int | PrimeBase) -> int:
    b = int(base)
    if not _is_prime(b):
        raise ValueError(f"base must be prime, got {b}")
    return b


@dataclass(frozen=True)
class PolyGF:
    """A polynomial over F_b held as its canonical integer code."""

    code: int
    base: int = 2

    def __post_init__(self) -> None:
        if self.code < 0:
            raise ValueError("polynomial code must be nonnegative")
        _base_int(self.base)

    @classmethod
    def from_coeffs(cls, coeffs: list[int] | tuple[int, ...], base: int = 2) -> "PolyGF":
        return cls(poly_from_coeffs(coeffs, base), base)

    def coeffs(self) -> list[int]:
        """Digits a_0, ..., a_d; empty for the zero polynomial."""
        return poly_coeffs(self.code, self.base)

    def degree(self) -> int | float:
        return poly_degree(self.code, self.base)

    def __int__(self) -> int:
        return self.code

    def __index__(self) -> int:
        return self.code


def _code(a: int | PolyGF) -> int:
    c = int(a)
    if c < 0:
        raise ValueError("polynomial code must be nonnegative")
    return c


def poly_degree(a: int | PolyGF, base: int | PrimeBase = 2) -> int | float:
    """Degree of the encoded polynomial; -inf for the zero polynomial."""
    a = _code(a)
    if a == 0:
        return NEG_INF
    b = _base_int(base)
    if b == 2:
        return a.bit_length() - 1
    d = -1
    while a:
        a //= b
        d += 1
    return d


def poly_coeffs(a: int | PolyGF, base: int | PrimeBase = 2) -> list[int]:
    """Digits a_0, ..., a_d of the code; empty list for zero."""
    a = _code(a)
    b = _base_int(base)
    out: list[int] = []
    while a:
        a, r = divmod(a, b)
        out.append(r)
    return out

def poly_from_coeffs(coeffs: list[int] | tuple[int, ...], base: int | PrimeBase = 2) -> int:
    b = _base_int(base)
    a = 0
    for c in reversed(coeffs):
        if not 0 <= c < b:
            raise ValueError(f"coefficient {c} out of range for base {b}")
        a = a * b + c
    return a


def poly_add(a: int | PolyGF, c: int | PolyGF, base: int | PrimeBase = 2) -> int:
    """Digitwise sum mod b; XOR when b = 2."""
    a, c = _code(a), _code(c)
    b = _base_int(base)
    if b == 2:
        return a ^ c
    out, shift = 0, 1
    while a or c:
        a, da = divmod(a, b)
        c, dc = divmod(c, b)
        out += ((da + dc) % b) * shift
        shift *= b
    return out


def poly_neg(a: int | PolyGF, base: int | PrimeBase = 2) -> int:
    """Digitwise negation mod b; identity when b = 2."""
    a = _code(a)
    b = _base_int(base)
    if b == 2:
        return a
    out, shift = 0, 1
    while a:
        a, da = divmod(a, b)
        out += (-da % b) * shift
        shift *= b
    return out


def poly_mul(a: int | PolyGF, c: int | PolyGF, base: int | PrimeBase = 2) -> int:
    """Polynomial product; carry-less multiplication when b = 2."""
    a, c = _code(a), _code(c)
    b = _base_int(base)
    if a == 0 or c == 0:
        return 0
    if b == 2:
        out = 0
        shift = 0
        while a:
            if a & 1:
                out ^= c << shift
            a >>= 1
            shift += 1
        return out
    da = poly_coeffs(a, b)
    dc = poly_coeffs(c, b)
    prod = [0] * (len(da) + len(dc) - 1)
    for i, x in enumerate(da):
        if x:
            for j, y in enumerate(dc):
                prod[i + j] = (prod[i + j] + x * y) % b
    return poly_from_coeffs(prod, b)


def poly_divmod(a: int | PolyGF, c: int | PolyGF, base: int | PrimeBase = 2) -> tuple[int, int]:
    """Quotient and remainder of polynomial long division."""
    a, c = _code(a), _code(c)
    b = _base_int(base)
    if c == 0:
        raise ZeroDivisionError("polynomial division by zero")
    if b == 2:
        dc = c.bit_length() - 1
        q = 0
        while a.bit_length() - 1 >= dc and a:
            shift = a.bit_length() - 1 - dc
            q ^= 1 << shift
            a ^= c << shift
        return q, a
    da_list = poly_coeffs(a, b)
    dc_list = poly_coeffs(c, b)
    dc = len(dc_list) - 1
    lead_inv = pow(dc_list[-1], -1, b)
    rem = da_list[:]
    quot = [0] * max(len(rem) - dc, 0)
    for i in range(len(rem) - 1, dc - 1, -1):
        coef = (rem[i] * lead_inv) % b
        if coef:
            quot[i - dc] = coef
            for j, y in enumerate(dc_list):
                rem[i - dc + j] = (rem[i - dc + j] - coef * y) % b
    return poly_from_coeffs(quot, b), poly_from_coeffs(rem, b)


@dataclass(frozen=True)
class Modulus:
    """An irreducible modulus p of degree n over F_b.

    Attributes
    ----------
    p : int
        Canonical integer code of the modulus polynomial.
    n : int
        Degree of p.
    b : int
        The prime base.
    """

    p: int
    n: int
    b: int = 2

    def __post_init__(self) -> None:
        b = _base_int(self.b)
        if poly_degree(self.p, b) != self.n:
            raise ValueError(f"modulus code {self.p} does not have degree {self.n} in base {b}")
        if not is_irreducible(self.p, b):
            raise ValueError(f"modulus code {self.p} is reducible over F_{b}")

    @classmethod
    def create(cls, p: int, base: int | PrimeBase = 2) -> "Modulus":
        b = _base_int(base)
        d = poly_degree(p, b)
        if d == NEG_INF or d < 1:
            raise ValueError("modulus must have degree >= 1")
        return cls(p, int(d), b)

    @property
    def group_order(self) -> int:
        """Order of (F_b[X]/p)^*, i.e. b^n - 1."""
        return self.b**self.n - 1


def poly_mulmod(a: int | PolyGF, c: int | PolyGF, m: Modulus) -> int:
    """Product of a and c reduced mod p."""
    a, c = _code(a), _code(c)
    b = m.b
    if b == 2:
        if a >> m.n:
            _, a = poly_divmod(a, m.p, 2)
        if c >> m.n:
            _, c = poly_divmod(c, m.p, 2)
        # Shift-and-reduce keeps deg(c) < n throughout, so out < 2^n.
        out = 0
        while a:
            if a & 1:
                out ^= c
            a >>= 1
            c <<= 1
            if c >> m.n & 1:
                c ^= m.p
        return out
    _, r = poly_divmod(poly_mul(a, c, b), m.p, b)
    return r


def poly_powmod(a: int | PolyGF, e: int, m: Modulus) -> int:
    """a(X)^e reduced mod p, by square and multiply."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    result = 1
    _, base_val = poly_divmod(_code(a), m.p, m.b)
    while e:
        if e & 1:
            result = poly_mulmod(result, base_val, m)
        base_val = poly_mulmod(base_val, base_val, m)
        e >>= 1
    return result


def _unchecked_modulus(p: int, n: int, b: int) -> Modulus:
    """Modulus container without the irreducibility check (internal use)."""
    m = object.__new__(Modulus)
    object.__setattr__(m, "p", p)
    object.__setattr__(m, "n", n)
    object.__setattr__(m, "b", b)
    return m


@functools.lru_cache(maxsize=None)
def _factorize(N: int) -> tuple[int, ...]:
    """Distinct prime factors of N by trial division, cached."""
    out = []
    d = 2
    while d * d <= N:
        if N % d == 0:
            out.append(d)
            while N % d == 0:
                N //= d
        d += 1
    if N > 1:
        out.append(N)
    return tuple(out)


def is_irreducible(p: int | PolyGF, base: int | PrimeBase = 2) -> bool:
    """Irreducibility of p over F_b via the gcd/power criterion.

    p of degree n is irreducible iff X^(b^n) = X mod p and, for every prime
    r dividing n, gcd(X^(b^(n/r)) - X mod p, p) = 1.
    """
    p = _code(p)
    b = _base_int(base)
    d = poly_degree(p, b)
    if d == NEG_INF or d < 1:
        return False
    n = int(d)
    if n == 1:
        return True
    m = _unchecked_modulus(p, n, b)
    x = b  # the polynomial X; x mod p = x since n >= 2
    if poly_powmod(x, b**n, m) != x:
        return False
    for r in _factorize(n):
        t = poly_powmod(x, b ** (n // r), m)
        g = _poly_gcd(poly_add(t, poly_neg(x, b), b), p, b)
        if poly_degree(g, b) != 0:
            return False
    return True


def _poly_gcd(a: int, c: int, b: int) -> int:
    while c:
        _, r = poly_divmod(a, c, b)
        a, c = c, r
    return a


def find_irreducible(n: int, base: int | PrimeBase = 2) -> Modulus:
    """Irreducible modulus of degree n with the smallest canonical code."""
    b = _base_int(base)
    if n < 1:
        raise ValueError("degree must be >= 1")
    for p in range(b**n, b ** (n + 1)):
        if is_irreducible(p, b):
            return Modulus(p, n, b)
    raise RuntimeError("unreachable: irreducible polynomials exist for every degree")


def find_generator(m: Modulus) -> int:
    """Smallest-code generator of the cyclic group (F_b[X]/p)^*.

    g generates iff g^((b^n - 1)/r) != 1 for every prime r | b^n - 1.
    """
    L = m.group_order
    if L == 1:
        return 1
    for g in range(2, m.b ** m.n):
        if all(poly_powmod(g, L // r, m) != 1 for r in _factorize(L)):
            return g
    raise RuntimeError("unreachable: the multiplicative group is cyclic")


@dataclass(frozen=True)
class ExpTable:
    """Exponent and discrete-log tables for (F_b[X]/p)^* = <g>.

    exp[d] is the code of g^d for 0 <= d < b^n - 1, and log[c] = d is the
    inverse map on nonzero codes (log[0] = -1 as a sentinel).
    """

    modulus: Modulus
    g: int
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.modulus.group_order


def _exp_orbit_base2(m: Modulus, g: int) -> np.ndarray:
    """All powers of g in order, vectorized as parallel lockstep orbits."""
    L = m.group_order
    # Split L = streams * steps; each stream starts at a scalar power of g
    # and all streams advance by one multiplication per step.
    streams = 1
    for c in (4095, 2047, 1023, 511, 255, 127, 63, 31, 15, 7, 5, 3):
        if L % c == 0 and L // c >= c // 8:
            streams = c
            break
    steps = L // streams
    starts = np.array([poly_powmod(g, j * steps, m) for j in range(streams)], dtype=np.uint64)
    out = np.empty((steps, streams), dtype=np.uint64)
    cur = starts.copy()
    p64 = np.uint64(m.p)
    gbits = [i for i in range(g.bit_length()) if g >> i & 1]
    deg_g = g.bit_length() - 1
    n = m.n
    for t in range(steps):
        out[t] = cur
        if t + 1 == steps:
            break
        acc = np.zeros_like(cur)
        for i in gbits:
            acc ^= cur << np.uint64(i)
        # Reduce degrees n + deg_g - 1 down to n.
        for d in range(n + deg_g - 1, n - 1, -1):
            mask = (acc >> np.uint64(d) & np.uint64(1)).astype(bool)
            acc[mask] ^= p64 << np.uint64(d - n)
        cur = acc
    return out.T.reshape(-1)


def exp_table(m: Modulus, g: int | None = None) -> ExpTable:
    """Build exp/log tables for the group generated by g (found if omitted).

    Memory is O(b^n); the budget guard for constructions lives with the
    search drivers, not here.
    """
    if g is None:
        g = find_generator(m)
    L = m.group_order
    if m.b == 2 and m.n >= 10:
        exp = _exp_orbit_base2(m, g)
    else:
        vals = np.empty(L, dtype=np.uint64)
        cur = 1
        for d in range(L):
            vals[d] = cur
            cur = poly_mulmod(cur, g, m)
        if cur != 1:
            raise ValueError(f"code {g} does not generate the full group mod {m.p}")
        exp = vals
    if exp[0] != 1 or (L > 1 and int(exp[1]) != g):
        raise ValueError(f"code {g} does not generate the full group mod {m.p}")
    log = np.full(m.b**m.n, -1, dtype=np.int64)
    log[exp] = np.arange(L, dtype=np.int64)
    if int(log[1]) != 0 or np.any(log[1:] < 0):
        raise ValueError(f"code {g} does not generate the full group mod {m.p}")
    return ExpTable(modulus=m, g=g, exp=exp, log=log)


def laurent_digits(w: int | PolyGF, m: Modulus, count: int) -> np.ndarray:
    """First `count` digits u_1, ..., u_count of the expansion w/p = sum u_i X^-i.

    Requires deg(w) < deg(p).  Digits are base-b and returned as uint8.
    """
    w = _code(w)
    b, n, p = m.b, m.n, m.p
    if poly_degree(w, b) >= n:
        raise ValueError("numerator degree must be below deg(p)")
    out = np.empty(count, dtype=np.uint8)
    if b == 2:
        state = w
        for i in range(count):
            state <<= 1
            u = state >> n & 1
            if u:
                state ^= p
            out[i] = u
        return out
    # r <- r*X; digit = lead coefficient at degree n over lead(p); r -= digit*p.
    lead_inv = pow(poly_coeffs(p, b)[-1], -1, b)
    state = w
    bn = b**n
    for i in range(count):
        state *= b
        u = (state // bn) % b
        u = (u * lead_inv) % b
        if u:
            state = poly_add(state, poly_neg(poly_mul(u, p, b), b), b)
        out[i] = u
    return out


def v_n_map(w: int | PolyGF, m: Modulus, digits: int | None = None) -> int:
    """Numerator v of v_n(w/p) = v / b^digits, truncating the Laurent tail.

    With digits = n (the default) this is the point map sending the residue
    w mod p to the first n expansion digits, read as v = sum u_i b^(n-i).
    """
    nd = m.n if digits is None else digits
    if nd < 0:
        raise ValueError("digit count must be nonnegative")
    u = laurent_digits(w, m, nd)
    v = 0
    for d in u:
        v = v * m.b + int(d)
    return v
