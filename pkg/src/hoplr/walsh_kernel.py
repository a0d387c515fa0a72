"""Walsh-space kernel values omega_alpha and their building blocks.

For smoothness alpha >= 2 the kernel is the absolutely convergent series

    omega_alpha(x) = sum_{k >= 1} r_alpha(k) wal_k(x),

where wal_k is the base-b Walsh function and r_alpha(k) = b^(-(a_1+1) - ...
- (a_v+1)) over the v = min(#digits(k), alpha) most significant nonzero
digit positions a_1 > a_2 > ... of k.  Three closed evaluation routes are
provided and cross-checked against the truncated series:

- omega_digits: O(alpha * n) digit recursion for x = v / b^n, any prime b;
- omega_nonzero_digits: closed forms in the nonzero digit positions of x,
  alpha in {2, 3}, any prime b;
- omega_base2: closed forms for b = 2, alpha in {2, 3}, vectorizable.

Arguments named x are digit rationals v / b^n held exactly as integers;
all routes avoid floating-point logarithms when locating digits.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .gfpoly import ExpTable, Modulus, exp_table, find_generator, v_n_map

__all__ = [
    "DigitRational",
    "Smoothness",
    "TriangularSums",
    "SeriesValue",
    "KernelTable",
    "r_alpha",
    "wal_k",
    "omega_series_oracle",
    "series_tail_bound",
    "triangular_sum",
    "triangular_sum_all",
    "triangular_sums",
    "kernel_constants",
    "omega_at_zero",
    "omega_digits",
    "omega_nonzero_digits",
    "omega_base2",
    "omega_base2_array",
    "build_kernel_table",
]


@dataclass(frozen=True)
class Smoothness:
    """Smoothness parameter alpha >= 2 of the Walsh space."""

    alpha: int

    def __post_init__(self) -> None:
        if int(self.alpha) < 2:
            raise ValueError(f"smoothness must be >= 2, got {self.alpha}")

    def __int__(self) -> int:
        return int(self.alpha)

    def __index__(self) -> int:
        return int(self.alpha)


def _alpha_int(alpha: int | Smoothness, minimum: int = 2) -> int:
    a = int(alpha)
    if a < minimum:
        raise ValueError(f"smoothness must be >= {minimum}, got {a}")
    return a


@dataclass(frozen=True)
class DigitRational:
    """A base-b rational x = v / b^n in [0, 1), held exactly.

    Digit i (1-based) of the expansion x = sum_i xi_i b^-i is
    xi_i = floor(v / b^(n-i)) mod b.
    """

    v: int
    n: int
    b: int = 2

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("digit count must be nonnegative")
        if not 0 <= self.v < self.b**self.n:
            raise ValueError(f"numerator {self.v} out of range for {self.n} base-{self.b} digits")

    @classmethod
    def from_digits(cls, digits: Sequence[int], b: int = 2) -> "DigitRational":
        v = 0
        for d in digits:
            if not 0 <= d < b:
                raise ValueError(f"digit {d} out of range for base {b}")
            v = v * b + d
        return cls(v, len(digits), b)

    def value(self) -> float:
        if self.b == 2:
            return float(np.ldexp(float(self.v), -self.n)) if self.v < 2**53 else self.v / 2.0**self.n
        return self.v / float(self.b) ** self.n

    def digits(self) -> list[int]:
        """xi_1, ..., xi_n, most significant first."""
        out = []
        v = self.v
        for _ in range(self.n):
            v, d = divmod(v, self.b)
            out.append(d)
        return out[::-1]

    def nonzero_digits(self) -> list[tuple[int, int]]:
        """Pairs (position, digit) with position 1-based, increasing."""
        return [(i + 1, d) for i, d in enumerate(self.digits()) if d]

    def first_nonzero(self) -> int:
        """Position of the first nonzero digit; n + 1 when v = 0."""
        for i, d in enumerate(self.digits()):
            if d:
                return i + 1
        return self.n + 1


def r_alpha(k: int, alpha: int | Smoothness, base: int = 2) -> float:
    """Series coefficient r_alpha(k); r_alpha(0) = 1.

    The product runs over the min(#digits(k), alpha) most significant
    nonzero digit positions of k in base b.
    """
    a = _alpha_int(alpha, minimum=1)
    if k < 0:
        raise ValueError("index must be nonnegative")
    b = base
    acc = 0
    taken = 0
    if b == 2:
        while k and taken < a:
            pos = k.bit_length() - 1
            acc += pos + 1
            k ^= 1 << pos
            taken += 1
    else:
        positions: list[int] = []
        pos = 0
        while k:
            k, d = divmod(k, b)
            if d:
                positions.append(pos)
            pos += 1
        for p in positions[::-1][:a]:  # most significant first
            acc += p + 1
    return float(b) ** (-acc)


def wal_k(k: int, x: DigitRational) -> float | complex:
    """Walsh function wal_k(x) for x = v / b^n; real +-1 when b = 2.

    wal_k(x) = exp(2 pi i (xi_1 kappa_0 + ... + xi_a+1 kappa_a) / b) with
    kappa_i the base-b digits of k and xi_i the digits of x.
    """
    b = x.b
    t = 0
    xd = x.digits()
    i = 0
    while k and i < len(xd):
        k, kap = divmod(k, b)
        t += kap * xd[i]
        i += 1
    t %= b
    if b == 2:
        return -1.0 if t else 1.0
    return complex(np.cos(2.0 * np.pi * t / b), np.sin(2.0 * np.pi * t / b))


class SeriesValue(NamedTuple):
    """A truncated series value and a bound on the omitted tail."""

    value: float
    tail: float


@functools.lru_cache(maxsize=None)
def _r_values_base2(K: int, alpha: int) -> np.ndarray:
    """r_alpha(k) for k = 0, ..., 2^K - 1 (entry 0 is set to 0)."""
    ks = np.arange(1 << K, dtype=np.int64)
    k = ks.copy()
    acc = np.zeros(ks.shape[0], dtype=np.int64)
    for _ in range(alpha):
        m, e = np.frexp(k.astype(np.float64))
        pos = e - 1  # floor(log2 k), exact via frexp
        nz = k > 0
        acc[nz] += pos[nz] + 1
        k[nz] ^= np.int64(1) << pos[nz].astype(np.int64)
    r = np.ldexp(1.0, -acc)
    r[0] = 0.0
    return r


@functools.lru_cache(maxsize=None)
def _r_values_generic(K: int, alpha: int, b: int) -> np.ndarray:
    """r_alpha(k) for k = 0, ..., b^K - 1 (entry 0 is set to 0)."""
    powers = np.array([b**i for i in range(K + 1)], dtype=np.int64)
    k = np.arange(b**K, dtype=np.int64)
    acc = np.zeros(k.shape[0], dtype=np.int64)
    for _ in range(alpha):
        nz = k > 0
        if not nz.any():
            break
        pos = np.searchsorted(powers, k[nz], side="right") - 1
        acc[nz] += pos + 1
        k[nz] = k[nz] % powers[pos]
    r = float(b) ** (-acc.astype(np.float64))
    r[0] = 0.0
    return r


@functools.lru_cache(maxsize=None)
def _tail_profile(alpha: int, b: int, top: int) -> tuple[float, ...]:
    """R_j(c) = sum_{k < b^c} r_j(k) for j = alpha - 1, c = 0..top."""
    # R_1(c) = 1 + c(b-1)/b exactly; higher j by the increment recursion
    # R_j(c) = R_j(c-1) + (b-1) b^-c R_{j-1}(c-1).
    R = [1.0 + c * (b - 1) / b for c in range(top + 1)]
    for _ in range(alpha - 2):
        nxt = [1.0]
        for c in range(1, top + 1):
            nxt.append(nxt[-1] + (b - 1) * float(b) ** (-c) * R[c - 1])
        R = nxt
    return tuple(R)


def series_tail_bound(K: int, alpha: int | Smoothness, base: int = 2) -> float:
    """Upper bound for sum_{k >= b^K} r_alpha(k), hence for any omitted tail.

    Summed to floating-point exhaustion; the analytic remainder beyond the
    cutoff is below 1e-100 of the leading term and is ignored.
    """
    a = _alpha_int(alpha)
    b = base
    top = K + 400
    R = _tail_profile(a, b, top)
    total = 0.0
    for c in range(K, top + 1):
        term = (b - 1) * float(b) ** (-(c + 1)) * R[c]
        total += term
        if term == 0.0:
            break
    return total


def omega_series_oracle(x: DigitRational, alpha: int | Smoothness, K: int) -> SeriesValue:
    """Truncated kernel series sum_{k=1}^{b^K - 1} r_alpha(k) wal_k(x).

    Requires K >= x.n so every digit of x meets the summation.  Returns the
    real value and a bound on the omitted tail; the imaginary part of the
    truncated sum vanishes analytically and is checked to be negligible.
    """
    a = _alpha_int(alpha)
    if K < x.n:
        raise ValueError(f"series cutoff K={K} must be >= digit count n={x.n}")
    b = x.b
    if b == 2:
        r = _r_values_base2(K, a)
        # Pair digit xi_i of x with bit i-1 of k: reverse v within n bits.
        w = 0
        for i in range(x.n):
            if x.v >> (x.n - 1 - i) & 1:
                w |= 1 << i
        ks = np.arange(1 << K, dtype=np.int64)
        odd = (np.bitwise_count(ks & np.int64(w)) & 1).astype(bool)
        signs = np.where(odd, -1.0, 1.0)
        value = float(np.sum(r * signs))
        return SeriesValue(value, series_tail_bound(K, a, b))
    r = _r_values_generic(K, a, b)
    ks = np.arange(b**K, dtype=np.int64)
    xd = x.digits()
    t = np.zeros(ks.shape[0], dtype=np.int64)
    for i in range(min(K, x.n)):
        if xd[i]:
            t += ((ks // b**i) % b) * xd[i]
    t %= b
    ang = 2.0 * np.pi * t / b
    value = float(np.sum(r * np.cos(ang)))
    imag = float(np.sum(r * np.sin(ang)))
    if abs(imag) > 1e-9:
        raise ArithmeticError(f"series imaginary part {imag} did not cancel")
    return SeriesValue(value, series_tail_bound(K, a, b))


def _gvals_matrix(gvals: Sequence[Sequence[float]] | np.ndarray, r: int, n: int) -> np.ndarray:
    g = np.asarray(gvals, dtype=np.float64)
    if g.ndim == 1:
        g = np.broadcast_to(g, (max(r, 1), g.shape[0]))
    if g.ndim != 2 or g.shape[0] < r or (n and g.shape[1] < n):
        raise ValueError(f"need {r} factor rows of {n} positions, got shape {g.shape}")
    return g


def triangular_sum(gvals: Sequence[Sequence[float]] | np.ndarray, r: int, n: int) -> float:
    """Nested triangular sum over n > a_1 > a_2 > ... > a_r >= 0.

    gvals[i-1][a] holds the i-th factor g_i(a); a single row is broadcast
    to all factors.  Returns sum prod_i g_i(a_i); 1.0 for r = 0 (the empty
    product) and 0.0 when r > n (no admissible index tuples).
    """
    if r < 0:
        raise ValueError("factor count must be nonnegative")
    if r == 0:
        return 1.0
    if r > n:
        return 0.0
    g = _gvals_matrix(gvals, r, n)
    S = np.zeros(r + 1)
    for a in range(n - r + 1):
        S[r] += g[r - 1, a]
        for t in range(1, r):
            S[r - t] += S[r - t + 1] * g[r - t - 1, a + t]
    return float(S[1])


def triangular_sum_all(gvals: Sequence[Sequence[float]] | np.ndarray, r: int, n: int) -> np.ndarray:
    """All suffix triangular sums in one O(n r) sweep.

    Returns (S_1, ..., S_r) where S_t is the triangular sum of the factor
    suffix g_t, ..., g_r, i.e. S_t = triangular_sum((g_t, ..., g_r), r-t+1, n).
    """
    if r < 1:
        raise ValueError("factor count must be >= 1")
    g = _gvals_matrix(gvals, r, n)
    S = np.zeros(r + 1)
    for a in range(n):
        S[r] += g[r - 1, a]
        for t in range(1, min(r, n - a)):
            S[r - t] += S[r - t + 1] * g[r - t - 1, a + t]
    return S[1:].copy()


@functools.lru_cache(maxsize=None)
def _kernel_constants_exact(b: int, n: int, alpha: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    prod = Fraction(1)
    C = [Fraction(1)]
    for t in range(1, alpha):
        prod *= Fraction(b - 1, b**t - 1)
        C.append(prod / Fraction(b) ** (n * t))
    Cbar = []
    acc = Fraction(0)
    for c in C:
        acc += c
        Cbar.append(acc)
    return tuple(C), tuple(Cbar)


def kernel_constants(b: int, n: int, alpha: int | Smoothness) -> tuple[np.ndarray, np.ndarray]:
    """Constants C_t = b^(-nt) prod_{i<=t} (b-1)/(b^i-1) and prefix sums.

    Computed exactly as rationals, rounded once; C_0 = Cbar_0 = 1.
    Returns (C, Cbar), each of length alpha.
    """
    a = _alpha_int(alpha)
    C, Cbar = _kernel_constants_exact(b, n, a)
    return (
        np.array([float(c) for c in C]),
        np.array([float(c) for c in Cbar]),
    )


@functools.lru_cache(maxsize=None)
def _omega_at_zero_exact(alpha: int, b: int) -> Fraction:
    prod = Fraction(1)
    total = Fraction(0)
    for i in range(1, alpha):
        prod *= Fraction(b - 1, b**i - 1)
        total += prod
    total += Fraction(b - 1, b**alpha - b) * prod
    return total


def omega_at_zero(alpha: int | Smoothness, base: int = 2) -> float:
    """omega_alpha(0) = sum_{k >= 1} r_alpha(k), in closed form."""
    return float(_omega_at_zero_exact(_alpha_int(alpha), base))


@dataclass(frozen=True)
class TriangularSums:
    """Intermediate sums of the digit-recursion kernel route.

    T[i] pairs with Cbar[i] and T_tilde[i] with C[i] elementwise; the
    factor rows are shared except for the last T_tilde factor, which is
    supported on positions below the first nonzero digit of x.
    """

    T: np.ndarray
    T_tilde: np.ndarray
    C: np.ndarray
    C_bar: np.ndarray


def triangular_sums(x: DigitRational, alpha: int | Smoothness) -> TriangularSums:
    """Build the triangular sums and constants used by omega_digits for x != 0."""
    a = _alpha_int(alpha)
    if x.v == 0:
        raise ValueError("digit recursion intermediates are defined for x != 0")
    b, n = x.b, x.n
    xd = x.digits()
    z = np.array([b - 1.0 if xd[pos] == 0 else -1.0 for pos in range(n)])
    scale = float(b) ** (-(np.arange(n) + 1.0))
    g = scale * z
    beta = x.first_nonzero()
    g_last = np.where(np.arange(n) < beta, z / b, 0.0)
    rows = np.vstack([np.broadcast_to(g, (a - 1, n)), g_last[None, :]])
    T = triangular_sum_all(g, a - 1, n)
    T_tilde = triangular_sum_all(rows, a, n)
    C, C_bar = kernel_constants(b, n, a)
    return TriangularSums(T=T, T_tilde=T_tilde, C=C, C_bar=C_bar)


def omega_digits(x: DigitRational, alpha: int | Smoothness) -> float:
    """Kernel value omega_alpha(x) by the O(alpha n) digit recursion."""
    a = _alpha_int(alpha)
    if x.v == 0:
        return omega_at_zero(a, x.b)
    ts = triangular_sums(x, a)
    head = float(np.dot(ts.C_bar[: a - 1], ts.T))
    tail = float(np.dot(ts.C, ts.T_tilde))
    return head + (float(ts.C_bar[a - 1]) - 1.0) + tail


def _positions(x: DigitRational | Sequence[tuple[int, int]] | Sequence[int], base: int) -> tuple[list[int], int]:
    """Nonzero digit positions of x, validated; returns (positions, base)."""
    if isinstance(x, DigitRational):
        return [p for p, _ in x.nonzero_digits()], x.b
    positions = []
    for item in x:
        if isinstance(item, tuple):
            p, d = item
            if not 1 <= d < base:
                raise ValueError(f"digit {d} out of range for base {base}")
        else:
            p = int(item)
        positions.append(int(p))
    if any(p < 1 for p in positions) or any(q <= p for p, q in zip(positions, positions[1:])):
        raise ValueError("positions must be >= 1 and strictly increasing")
    return positions, base


def _s1(A: float, b: int) -> float:
    return 1.0 - b * A


def _s2(A: float, A2: float, b: int) -> float:
    pairs = 0.5 * (A * A - A2)
    return 1.0 / (b + 1) - b * (b - 2) * pairs - b * (b - 1) * (1.0 / (b - 1) - A) * A


def omega_nonzero_digits(
    x: DigitRational | Sequence[tuple[int, int]] | Sequence[int],
    alpha: int | Smoothness,
    base: int = 2,
) -> float:
    """Kernel value via closed forms in the nonzero digit positions of x.

    The kernel depends on x only through the set of nonzero digit
    positions, so x may be given as a DigitRational or as its positions
    (optionally (position, digit) pairs).  Supports alpha in {2, 3}.
    """
    a = _alpha_int(alpha)
    if a not in (2, 3):
        raise ValueError(f"closed nonzero-digit forms exist only for alpha in {{2, 3}}, got {a}")
    pos, b = _positions(x, base)

    def omega(pos: list[int], alpha: int) -> float:
        A = sum(float(b) ** (-p) for p in pos)
        A2 = sum(float(b) ** (-2 * p) for p in pos)
        s1 = _s1(A, b)
        if not pos:
            if alpha == 2:
                return s1 + 1.0 / b
            return s1 + _s2(A, A2, b) + 1.0 / (b * (b + 1) ** 2)
        a1 = pos[0]
        ba1 = float(b) ** (-a1)
        s2t = 1.0 / b - 2.0 * ba1 - ba1 / b - (a1 * b - a1 - b) * A
        if alpha == 2:
            return s1 + s2t
        # Indices k with >= 3 nonzero digits force the digits of x below
        # the least significant of the top three to vanish; summing that
        # position over 0..a_1-1 telescopes against the shifted tail
        # y = b^a_1 x mod 1 and leaves the closed form below.
        shifted = [p - a1 for p in pos[1:]]
        Ay = sum(float(b) ** (-p) for p in shifted)
        A2y = sum(float(b) ** (-2 * p) for p in shifted)
        P = ba1 * _s1(Ay, b)
        Q = ba1 * ba1 * _s2(Ay, A2y, b)
        s3t = (
            (1.0 - (b * ba1) ** 2) / (b + 1.0) ** 2
            + (P - (b + 1.0) * ba1) * (1.0 - b * ba1)
            - Q
            + (a1 - 1.0)
            * (b - 1.0)
            * (b * ba1 * ba1 * (b * b + b + 1.0) / (b + 1.0) - (b + 1.0) * ba1 * P + Q)
        ) / b
        return s1 + _s2(A, A2, b) + s3t

    return omega(pos, a)


def omega_base2_array(xs: np.ndarray, alpha: int | Smoothness) -> np.ndarray:
    """Vectorized base-2 closed forms for alpha in {2, 3}.

    Every float64 in [0, 1) is a dyadic rational, so the forms are exact
    in the input; a_1 = -floor(log2 x) is recovered exactly via frexp.
    """
    a = _alpha_int(alpha)
    x = np.asarray(xs, dtype=np.float64)
    if np.any((x < 0.0) | (x >= 1.0)):
        raise ValueError("kernel arguments must lie in [0, 1)")
    _, e = np.frexp(x)
    a1 = (1 - e).astype(np.float64)
    t1 = np.ldexp(1.0, e - 1)
    zero = x == 0.0
    a1 = np.where(zero, 0.0, a1)
    t1 = np.where(zero, 0.0, t1)
    s1 = 1.0 - 2.0 * x
    if a == 2:
        return s1 + (1.0 - 5.0 * t1) / 2.0 + (2.0 - a1) * x
    if a == 3:
        t2 = t1 * t1
        s2 = 1.0 / 3.0 - 2.0 * (1.0 - x) * x
        s3t = (1.0 - 43.0 * t2) / 18.0 + (5.0 * t1 - 1.0) * x - (2.0 - a1) * x * x
        return s1 + s2 + s3t
    raise ValueError(f"closed base-2 forms exist only for alpha in {{2, 3}}, got {a}")


def omega_base2(x: DigitRational | float, alpha: int | Smoothness) -> float:
    """Kernel value for b = 2, alpha in {2, 3}, from the closed forms."""
    if isinstance(x, DigitRational):
        if x.b != 2:
            raise ValueError("omega_base2 requires base 2")
        xv = x.value()
    else:
        xv = float(x)
    return float(omega_base2_array(np.array([xv]), alpha)[0])


@dataclass(frozen=True)
class KernelTable:
    """omega_alpha over one generator orbit, indexed by the exponent delta.

    values[delta] = omega_alpha(v_n(g^delta / p)); the h = 0 point is not
    part of the orbit and its kernel value omega_alpha(0) is kept separate.
    """

    table: ExpTable
    alpha: int
    values: np.ndarray = field(repr=False)
    numerators: np.ndarray = field(repr=False)
    omega_zero: float

    @property
    def modulus(self) -> Modulus:
        return self.table.modulus


_V_CACHE: dict[tuple[int, int, int], np.ndarray] = {}
_KERNEL_CACHE: dict[tuple[int, int, int, int], KernelTable] = {}
_EXP_CACHE: dict[tuple[int, int, int], ExpTable] = {}


def cached_exp_table(m: Modulus, g: int | None = None) -> ExpTable:
    """exp_table with a process-wide cache keyed by (b, p, g)."""
    if g is None:
        g = find_generator(m)
    key = (m.b, m.p, g)
    if key not in _EXP_CACHE:
        _EXP_CACHE[key] = exp_table(m, g)
    return _EXP_CACHE[key]


def _orbit_numerators(et: ExpTable) -> np.ndarray:
    """v_n numerators of the whole orbit, via linearity of the digit map."""
    m = et.modulus
    key = (m.b, m.p, et.g)
    if key in _V_CACHE:
        return _V_CACHE[key]
    n = m.n
    if m.b == 2:
        basis = np.array([v_n_map(1 << i, m) for i in range(n)], dtype=np.int64)
        codes = et.exp.astype(np.int64)
        v = np.zeros(codes.shape[0], dtype=np.int64)
        for i in range(n):
            v ^= np.where((codes >> np.int64(i)) & np.int64(1) == 1, basis[i], np.int64(0))
    else:
        # Digitwise mod-b sum of basis digit rows, then recombined.
        basis_digits = np.array(
            [DigitRational(v_n_map(m.b**i, m), n, m.b).digits() for i in range(n)],
            dtype=np.int64,
        )
        codes = et.exp.astype(np.int64)
        digit_acc = np.zeros((codes.shape[0], n), dtype=np.int64)
        for i in range(n):
            coef = (codes // m.b**i) % m.b
            digit_acc += coef[:, None] * basis_digits[i][None, :]
        digit_acc %= m.b
        weights = np.array([m.b ** (n - 1 - j) for j in range(n)], dtype=np.int64)
        v = digit_acc @ weights
    _V_CACHE[key] = v
    return v


def build_kernel_table(m: Modulus, g: int | None = None, alpha: int | Smoothness = 2) -> KernelTable:
    """Kernel values over the full candidate orbit of (F_b[X]/p)^*.

    Cached per (b, p, g, alpha); the exponent table and point numerators
    are shared between smoothness values for the same modulus.
    """
    a = _alpha_int(alpha)
    et = cached_exp_table(m, g)
    key = (m.b, m.p, et.g, a)
    if key in _KERNEL_CACHE:
        return _KERNEL_CACHE[key]
    v = _orbit_numerators(et)
    n = m.n
    if m.b == 2 and a in (2, 3):
        xs = np.ldexp(v.astype(np.float64), -n)
        values = omega_base2_array(xs, a)
    else:
        values = np.array([omega_digits(DigitRational(int(w), n, m.b), a) for w in v])
    kt = KernelTable(
        table=et,
        alpha=a,
        values=values,
        numerators=v,
        omega_zero=omega_at_zero(a, m.b),
    )
    _KERNEL_CACHE[key] = kt
    return kt
