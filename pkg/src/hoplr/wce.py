"""Worst-case integration errors in the weighted Walsh space W_(alpha, s, gamma).

For a digital net {x_h} with N points the squared-free worst-case error is

    e = -1 + (1/N) sum_h prod_j (1 + gamma_j omega_alpha(x_(h,j))),

equivalently the dual-space sum e = sum_(0 != k in D) r_alpha(gamma, k)
over the dual net D.  Both routes are implemented; the dual route is an
independent brute-force oracle for small rules.  A general upper bound
b^(-min(tau m, n)) prod_j (1 + 3 gamma_j^(1/tau) C_(b,alpha,tau))^tau is
provided for 1 <= tau < alpha.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .gfpoly import Modulus, poly_mulmod
from .pointgen import PointSet
from .walsh_kernel import (
    DigitRational,
    Smoothness,
    _alpha_int,
    _r_values_base2,
    _r_values_generic,
    omega_at_zero,
    omega_base2_array,
    omega_digits,
    series_tail_bound,
)

__all__ = [
    "WeightSequence",
    "wce_product",
    "prefix_wce_products",
    "wce_dual_bruteforce",
    "wce_bound",
    "c_walsh",
]

# Vectorized dual-net enumeration above this many index tuples is refused.
_DUAL_ENUM_LIMIT = 1 << 27


@dataclass(frozen=True)
class WeightSequence:
    """Positive coordinate weights gamma_1, ..., gamma_s, materialized.

    kind is one of "geometric" (gamma_j = param^j), "polydecay"
    (gamma_j = j^-2) or "explicit" (user-supplied list).
    """

    kind: str
    param: float | None
    gammas: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(g <= 0 for g in self.gammas):
            raise ValueError("weights must be positive")

    @classmethod
    def geometric(cls, c: float, s: int) -> "WeightSequence":
        if c <= 0:
            raise ValueError("geometric ratio must be positive")
        return cls("geometric", float(c), tuple(float(c) ** j for j in range(1, s + 1)))

    @classmethod
    def polydecay(cls, s: int) -> "WeightSequence":
        return cls("polydecay", None, tuple(1.0 / j**2 for j in range(1, s + 1)))

    @classmethod
    def explicit(cls, gammas: Sequence[float]) -> "WeightSequence":
        return cls("explicit", None, tuple(float(g) for g in gammas))

    @classmethod
    def parse(cls, text: str, s: int) -> "WeightSequence":
        """Parse "geom:C", "polydecay" or "list:FILE" into s weights."""
        if text.startswith("geom:"):
            return cls.geometric(float(text[5:]), s)
        if text == "polydecay":
            return cls.polydecay(s)
        if text.startswith("list:"):
            values = [float(t) for t in Path(text[5:]).read_text().split()]
            if len(values) < s:
                raise ValueError(f"weight file has {len(values)} entries, need {s}")
            return cls.explicit(values[:s])
        raise ValueError(f"unrecognized weight spec {text!r}")

    def gamma(self, j: int) -> float:
        """1-based weight gamma_j."""
        return self.gammas[j - 1]

    @property
    def s(self) -> int:
        return len(self.gammas)

    def to_json(self) -> dict | list:
        if self.kind == "explicit":
            return list(self.gammas)
        return {"kind": self.kind, "param": self.param, "s": self.s}

    @classmethod
    def from_json(cls, obj: dict | list) -> "WeightSequence":
        if isinstance(obj, list):
            return cls.explicit(obj)
        if obj["kind"] == "geometric":
            return cls.geometric(obj["param"], obj["s"])
        if obj["kind"] == "polydecay":
            return cls.polydecay(obj["s"])
        raise ValueError(f"unrecognized weight kind {obj!r}")


def _omega_column(points: PointSet, j: int, alpha: int) -> np.ndarray:
    v = points.numerators[:, j]
    if points.b == 2 and alpha in (2, 3):
        return omega_base2_array(np.ldexp(v.astype(np.float64), -points.n), alpha)
    return np.array([omega_digits(DigitRational(int(w), points.n, points.b), alpha) for w in v])


def prefix_wce_products(
    points: PointSet, alpha: int | Smoothness, weights: WeightSequence
) -> np.ndarray:
    """Worst-case errors (e_1, ..., e_s) of all coordinate prefixes."""
    a = _alpha_int(alpha)
    if weights.s < points.dim:
        raise ValueError(f"need {points.dim} weights, got {weights.s}")
    P = np.ones(points.count)
    out = np.empty(points.dim)
    for j in range(points.dim):
        P = P * (1.0 + weights.gamma(j + 1) * _omega_column(points, j, a))
        out[j] = np.sum(P) / points.count - 1.0
    return out


def wce_product(points: PointSet, alpha: int | Smoothness, weights: WeightSequence) -> float:
    """Worst-case error of the point set by the product formula."""
    return float(prefix_wce_products(points, alpha, weights)[-1])


def wce_dual_bruteforce(
    q: Sequence[int],
    m: Modulus,
    m_digits: int,
    alpha: int | Smoothness,
    weights: WeightSequence,
    K: int | None = None,
) -> tuple[float, float]:
    """Dual-net error sum, enumerated over 0 <= k_j < b^K, for s <= 2.

    k_j enters the dual test through its first n digits (k_j mod b^n); the
    full index enters r_alpha.  Returns (value, tail) where tail bounds the
    mass of dual indices outside the enumeration box.
    """
    a = _alpha_int(alpha)
    s = len(q)
    if s < 1 or s > 2:
        raise ValueError("dual brute force supports s in {1, 2}")
    b, n = m.b, m.n
    if not 0 <= m_digits <= n:
        raise ValueError(f"point digits m={m_digits} must satisfy 0 <= m <= n={n}")
    if K is None:
        K = n + 8
    if K < n:
        raise ValueError(f"enumeration cutoff K={K} must be >= n={n}")
    total = b ** (K * s)
    if total > _DUAL_ENUM_LIMIT:
        raise ValueError(
            f"dual enumeration of b^(K s) = {total} index tuples exceeds the "
            f"limit {_DUAL_ENUM_LIMIT}; reduce K or s"
        )
    if weights.s < s:
        raise ValueError(f"need {s} weights, got {weights.s}")

    bn = b**n
    thresh = b ** (n - m_digits)
    if b == 2:
        r = _r_values_base2(K, a)
    else:
        r = _r_values_generic(K, a, b)
    rho = [None] * s
    res = []
    for j in range(s):
        rows = np.array([poly_mulmod(t, int(q[j]), m) for t in range(bn)], dtype=np.int64)
        res.append(rows)
        rj = weights.gamma(j + 1) * r
        rj[0] = 1.0
        rho[j] = rj
    ks = np.arange(b**K, dtype=np.int64)
    if s == 1:
        dual = res[0][ks % bn] < thresh
        value = float(np.sum(rho[0][dual])) - 1.0
    else:
        value = 0.0
        r1 = res[0][ks % bn]
        r2 = res[1][ks % bn]
        for k1 in range(b**K):
            if b == 2:
                rem = np.bitwise_xor(np.int64(r1[k1]), r2)
            else:
                # Digitwise mod-b sum of the two residue codes.
                rem = _digit_add_vec(int(r1[k1]), r2, b, n)
            mask = rem < thresh
            value += rho[0][k1] * float(np.sum(rho[1][mask]))
        value -= 1.0  # remove the k = 0 tuple
    w0 = omega_at_zero(a, b)
    tail_1d = series_tail_bound(K, a, b)
    full = math.prod(1.0 + weights.gamma(j + 1) * w0 for j in range(s))
    boxed = math.prod(1.0 + weights.gamma(j + 1) * (w0 - tail_1d) for j in range(s))
    return value, full - boxed


def _digit_add_vec(c: int, codes: np.ndarray, b: int, n: int) -> np.ndarray:
    out = np.zeros_like(codes)
    shift = 1
    for _ in range(n):
        da = (c // shift) % b
        dc = (codes // shift) % b
        out += ((da + dc) % b) * shift
        shift *= b
    return out


def c_walsh(b: int, alpha: int | Smoothness, tau: float) -> float:
    """Walsh space constant C_(b, alpha, tau) for 1 <= tau < alpha."""
    a = _alpha_int(alpha)
    if not 1 <= tau < a:
        raise ValueError(f"tau must satisfy 1 <= tau < alpha = {a}, got {tau}")
    lead = (b - 1.0) ** a / (b ** (a / tau) - b)
    for i in range(1, a):
        lead /= b ** (i / tau) - 1.0
    if tau == 1:
        extra = a - 1.0
    else:
        broot = b ** (1.0 / tau)
        extra = (
            (b - 1.0)
            * ((b - 1.0) ** (a - 1) - (broot - 1.0) ** (a - 1))
            / ((b - broot) * (broot - 1.0) ** (a - 1))
        )
    return lead + extra


def wce_bound(
    b: int,
    alpha: int | Smoothness,
    tau: float,
    m: int,
    n: int,
    weights: WeightSequence,
    d: int,
) -> float:
    """Upper bound b^(-min(tau m, n)) prod_(j<=d) (1 + 3 gamma_j^(1/tau) C)^tau."""
    a = _alpha_int(alpha)
    C = c_walsh(b, a, tau)
    if weights.s < d:
        raise ValueError(f"need {d} weights, got {weights.s}")
    prod = 1.0
    for j in range(1, d + 1):
        prod *= (1.0 + 3.0 * weights.gamma(j) ** (1.0 / tau) * C) ** tau
    return float(b) ** (-min(tau * m, float(n))) * prod
