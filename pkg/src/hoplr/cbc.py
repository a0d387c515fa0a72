"""Component-by-component search for higher order polynomial lattice rules.

Both drivers minimize, coordinate by coordinate, the worst-case error

    e_d(q) = -1 + (1/b^m) sum_h P_(d-1)(h) (1 + gamma_d omega_alpha(v_n(h q / p)))

over the b^n - 1 nonzero candidates q, keeping the running products
P_d(h) = prod_(j<=d) (1 + gamma_j omega_alpha(x_(h,j))).  The naive driver
evaluates every candidate directly and is the semantic authority; the fast
driver maps candidates onto a generator orbit, where the per-dimension
profile becomes one circular cross-correlation of length b^n - 1 against
the kernel table, computed via FFT.

Selection is two-stage in both drivers: candidates within a narrow band of
the scanned minimum are re-evaluated with an exact ordered dot product, and
exact ties are broken toward the smallest candidate code.  The modulus
degree must satisfy n = alpha m so the rule realizes the full higher order
convergence of the smoothness class.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .convolve import ConvPlan, circ_convolve, make_plan
from .gfpoly import ExpTable, Modulus, find_generator, is_irreducible, poly_mulmod
from .walsh_kernel import (
    DigitRational,
    KernelTable,
    Smoothness,
    _alpha_int,
    build_kernel_table,
    omega_base2_array,
    omega_digits,
)
from .wce import WeightSequence

__all__ = [
    "BudgetExceeded",
    "CbcState",
    "LatticeRule",
    "NAIVE_WORK_LIMIT",
    "FAST_WORK_LIMIT",
    "cbc_naive",
    "cbc_fast",
    "embed_Q",
    "update_P",
    "save_rule",
    "load_rule",
]

SCHEMA_VERSION = 1
TIE_BREAK = "min-q-code"

# Default work ceilings; override with the HOPLR_BUDGET environment variable.
NAIVE_WORK_LIMIT = 1 << 30  # candidate x point pairs per dimension, b^(n+m)
FAST_WORK_LIMIT = 1 << 26  # orbit length driving FFT size and tables, b^n

# Scan values within this relative band of the minimum are re-evaluated
# exactly before the code tie-break (absorbs FFT round-off).
_SCAN_BAND_RTOL = 1e-9
# Exactly re-evaluated values within this relative band count as tied.
_TIE_RTOL = 1e-13


class BudgetExceeded(ValueError):
    """A construction would exceed the configured work budget."""


def _budget_limit(default: int) -> int:
    env = os.environ.get("HOPLR_BUDGET")
    if env is None:
        return default
    try:
        return int(env)
    except ValueError as exc:
        raise ValueError(f"HOPLR_BUDGET must be an integer, got {env!r}") from exc


@dataclass
class CbcState:
    """Mutable search state shared by both drivers.

    P holds the running products over the b^m points (index h); the fast
    driver additionally tracks the orbit embedding and chosen exponents.
    Exactly b^m - 1 orbit slots are eligible for embedding: the nonzero
    polynomials of degree < m (h = 0 lies outside the orbit).

    selected[d-1] is the exact candidate-profile minimum found by the scan
    in dimension d (the greedy target); the chosen component attains it
    unless that component was forced through fixed_prefix.
    """

    modulus: Modulus
    m: int
    alpha: int
    weights: WeightSequence
    P: np.ndarray = field(repr=False)
    Q: np.ndarray | None = field(repr=False, default=None)
    q: list[int] = field(default_factory=list)
    deltas: list[int] | None = None
    errors: list[float] = field(default_factory=list)
    selected: list[float] = field(default_factory=list)
    P_zero: list[float] = field(default_factory=list)

    def validate(self) -> None:
        N = self.modulus.b**self.m
        if self.P.shape != (N,):
            raise AssertionError(f"P must have one entry per point, shape {self.P.shape} != ({N},)")
        if len(self.q) != len(self.errors):
            raise AssertionError("one error per chosen component")
        if self.Q is not None:
            L = self.modulus.group_order
            if self.Q.shape != (L,):
                raise AssertionError(f"orbit embedding must have length {L}")


@dataclass(frozen=True)
class LatticeRule:
    """A constructed rule: modulus p of degree n = alpha m, components q.

    errors[d-1] is the worst-case error of the d-dimensional prefix rule.
    """

    b: int
    m: int
    n: int
    alpha: int
    p: int
    q: tuple[int, ...]
    weights: WeightSequence
    errors: tuple[float, ...]
    generator_g: int | None = None
    tie_break: str = TIE_BREAK
    schema_version: int = SCHEMA_VERSION

    def modulus(self) -> Modulus:
        return Modulus.create(self.p, self.b)

    @property
    def s(self) -> int:
        return len(self.q)

    def to_json(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "b": self.b,
            "m": self.m,
            "n": self.n,
            "alpha": self.alpha,
            "p": self.p,
            "q": list(self.q),
            "weights": self.weights.to_json(),
            "errors": list(self.errors),
            "generator_g": self.generator_g,
            "tie_break": self.tie_break,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LatticeRule":
        if obj.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported rule schema {obj.get('schema_version')!r}")
        return cls(
            b=int(obj["b"]),
            m=int(obj["m"]),
            n=int(obj["n"]),
            alpha=int(obj["alpha"]),
            p=int(obj["p"]),
            q=tuple(int(t) for t in obj["q"]),
            weights=WeightSequence.from_json(obj["weights"]),
            errors=tuple(float(t) for t in obj["errors"]),
            generator_g=obj.get("generator_g"),
            tie_break=obj.get("tie_break", TIE_BREAK),
        )


def save_rule(rule: LatticeRule, path: str | Path) -> None:
    """Write the rule as canonical JSON (stable key order, trailing newline)."""
    Path(path).write_text(json.dumps(rule.to_json(), indent=2, sort_keys=True) + "\n")


def load_rule(path: str | Path) -> LatticeRule:
    return LatticeRule.from_json(json.loads(Path(path).read_text()))


def _validate_inputs(s: int, m_digits: int, alpha: int, modulus: Modulus, weights: WeightSequence) -> None:
    if s < 1:
        raise ValueError("s must be >= 1")
    if m_digits < 1:
        raise ValueError("m must be >= 1")
    if modulus.n != alpha * m_digits:
        raise ValueError(
            f"modulus degree n={modulus.n} must equal alpha*m={alpha * m_digits} "
            f"for an order-{alpha} construction"
        )
    if not is_irreducible(modulus.p, modulus.b):
        raise ValueError(f"modulus code {modulus.p} is reducible over F_{modulus.b}")
    if weights.s < s:
        raise ValueError(f"need {s} weights, got {weights.s}")


def _select_candidate(scan: np.ndarray, qcodes: np.ndarray, exact_value) -> tuple[int, float]:
    """Two-stage minimizer selection shared by both drivers.

    Stage one collects every candidate whose scanned profile value lies
    within a small relative band of the scanned minimum; the band absorbs
    FFT round-off, so the collected set is a superset of the true minimizers.
    Stage two re-evaluates the collected candidates with ``exact_value``
    (an ordered dot product against the running products, identical in both
    drivers); exact ties are broken toward the smallest candidate code.

    Returns ``(index, value)`` where ``value`` is the exact profile minimum.
    """
    smin = float(np.min(scan))
    band = _SCAN_BAND_RTOL * max(1.0, float(np.max(np.abs(scan))))
    cand = np.flatnonzero(scan <= smin + band)
    vals = np.fromiter(
        (exact_value(int(i)) for i in cand), dtype=np.float64, count=cand.size
    )
    vmin = float(np.min(vals))
    tol = _TIE_RTOL * max(1.0, float(np.max(np.abs(vals))))
    keep = vals <= vmin + tol
    tied = cand[keep]
    k = int(np.argmin(qcodes[tied]))
    return int(tied[k]), float(vals[keep][k])


def _omega_by_code(m: Modulus, alpha: int) -> np.ndarray:
    """omega_alpha(v_n(w / p)) for every residue code w = 0..b^n-1."""
    from .pointgen import _v_all

    codes = np.arange(m.b**m.n, dtype=np.int64)
    v = _v_all(m, codes)
    if m.b == 2 and alpha in (2, 3):
        return omega_base2_array(np.ldexp(v.astype(np.float64), -m.n), alpha)
    return np.array([omega_digits(DigitRational(int(w), m.n, m.b), alpha) for w in v])


def _mulmod_fixed_h_all_q(m: Modulus, h: int) -> np.ndarray:
    """Codes of h q mod p for all q = 0..b^n-1, via linearity in q (b = 2)."""
    n = m.n
    qs = np.arange(2**n, dtype=np.int64)
    out = np.zeros(2**n, dtype=np.int64)
    for i in range(n):
        basis = poly_mulmod(h, 1 << i, m)
        out ^= np.where((qs >> np.int64(i)) & 1 == 1, np.int64(basis), np.int64(0))
    return out


def update_P(
    P: np.ndarray,
    q_d: int,
    gamma_d: float,
    modulus: Modulus,
    kernel: KernelTable | np.ndarray,
) -> np.ndarray:
    """One product update: P'(h) = P(h) (1 + gamma_d omega_alpha(v_n(h q_d / p))).

    kernel is either the orbit kernel table (fast driver) or the plain
    omega-by-residue-code array (naive driver).
    """
    N = P.shape[0]
    if isinstance(kernel, KernelTable):
        if kernel.modulus != modulus:
            raise ValueError("kernel table was built for a different modulus")
        et = kernel.table
        L = modulus.group_order
        loghs = et.log[1:N]
        if np.any(loghs < 0):
            raise ValueError("exponent table does not cover all point indices")
        shift = int(et.log[q_d])
        if shift < 0:
            raise ValueError(f"candidate {q_d} is not in the generator orbit")
        omega_h = kernel.values[(loghs + shift) % L]
        omega_zero = kernel.omega_zero
    else:
        from .pointgen import _mulmod_all_h

        codes = _mulmod_all_h(modulus, q_d, _digits_of(N, modulus.b))
        omega_h = kernel[codes[1:]]
        omega_zero = float(kernel[0])
    out = P.copy()
    out[0] *= 1.0 + gamma_d * omega_zero
    out[1:] *= 1.0 + gamma_d * omega_h
    return out


def _digits_of(N: int, b: int) -> int:
    m = 0
    while b**m < N:
        m += 1
    if b**m != N:
        raise ValueError(f"point count {N} is not a power of b={b}")
    return m


def cbc_naive(
    s: int,
    m_digits: int,
    alpha: int | Smoothness,
    modulus: Modulus,
    weights: WeightSequence,
    collect_state: bool = False,
) -> LatticeRule | tuple[LatticeRule, CbcState]:
    """Exhaustive component-by-component minimization (semantic reference).

    Work scales as b^(n+m) per dimension and is refused beyond the budget
    (HOPLR_BUDGET overrides the default limit).
    """
    a = _alpha_int(alpha)
    _validate_inputs(s, m_digits, a, modulus, weights)
    b, n = modulus.b, modulus.n
    work = b ** (n + m_digits)
    limit = _budget_limit(NAIVE_WORK_LIMIT)
    if work > limit:
        raise BudgetExceeded(
            f"naive search needs b^(n+m) = {work} candidate-point pairs per "
            f"dimension, above the limit {limit}; use cbc_fast or raise HOPLR_BUDGET"
        )
    N = b**m_digits
    omega_all = _omega_by_code(modulus, a)
    qcodes = np.arange(1, b**n, dtype=np.int64)
    state = CbcState(modulus=modulus, m=m_digits, alpha=a, weights=weights, P=np.ones(N))

    from .pointgen import _mulmod_all_h

    def exact_at(i: int) -> float:
        codes = _mulmod_all_h(modulus, int(qcodes[i]), m_digits)
        return float(np.dot(state.P[1:], omega_all[codes[1:]]))

    for d in range(1, s + 1):
        gamma_d = weights.gamma(d)
        # Error profile over all candidates: values[q-1] ~ sum_h P(h) omega(h q).
        values = np.zeros(b**n - 1)
        if b == 2:
            for h in range(1, N):
                hq = _mulmod_fixed_h_all_q(modulus, h)
                values += state.P[h] * omega_all[hq[1:]]
        else:
            for qi, qcode in enumerate(qcodes):
                codes = _mulmod_all_h(modulus, int(qcode), m_digits)
                values[qi] = float(np.dot(state.P[1:], omega_all[codes[1:]]))
        idx, vmin = _select_candidate(values, qcodes, exact_at)
        q_d = int(qcodes[idx])
        state.P_zero.append(float(state.P[0]))
        state.P = update_P(state.P, q_d, gamma_d, modulus, omega_all)
        state.q.append(q_d)
        state.selected.append(vmin)
        state.errors.append(float(np.sum(state.P) / N - 1.0))
    state.validate()
    rule = LatticeRule(
        b=b,
        m=m_digits,
        n=n,
        alpha=a,
        p=modulus.p,
        q=tuple(state.q),
        weights=weights,
        errors=tuple(state.errors),
        # The canonical orbit generator is a property of the modulus, so rule
        # files are byte-identical regardless of which driver produced them.
        generator_g=find_generator(modulus),
    )
    return (rule, state) if collect_state else rule


def embed_Q(P: np.ndarray, table: ExpTable, m_digits: int) -> np.ndarray:
    """Scatter the point products onto the generator orbit.

    Q[log h] = P(h) for the b^m - 1 nonzero polynomials h of degree < m;
    all other orbit slots are zero.
    """
    m = table.modulus
    N = m.b**m_digits
    if P.shape != (N,):
        raise ValueError(f"P must have shape ({N},), got {P.shape}")
    L = m.group_order
    idx = table.log[1:N]
    if np.any(idx < 0):
        raise ValueError("exponent table does not cover all point indices")
    Q = np.zeros(L)
    Q[idx] = P[1:]
    return Q


def cbc_fast(
    s: int,
    m_digits: int,
    alpha: int | Smoothness,
    modulus: Modulus,
    weights: WeightSequence,
    g: int | None = None,
    strategy: str = "auto",
    workers: int = 1,
    fixed_prefix: Sequence[int] | None = None,
    collect_state: bool = False,
) -> LatticeRule | tuple[LatticeRule, CbcState]:
    """FFT-accelerated component-by-component search.

    Per dimension the candidate profile is the circular cross-correlation
    S(delta) = sum_beta omega[(beta - delta) mod L] Q(beta) over the orbit
    of length L = b^n - 1; the candidate at shift delta is q = g^(-delta).

    fixed_prefix forces the first len(fixed_prefix) components to the given
    candidate codes while the scan still records the exact constrained
    minimum per dimension in state.selected, so an externally supplied rule
    can be audited step by step against the greedy target.
    """
    a = _alpha_int(alpha)
    _validate_inputs(s, m_digits, a, modulus, weights)
    b, n = modulus.b, modulus.n
    L = modulus.group_order
    limit = _budget_limit(FAST_WORK_LIMIT)
    if b**n > limit:
        raise BudgetExceeded(
            f"fast search needs orbit tables of length b^n = {b**n}, above the "
            f"limit {limit}; raise HOPLR_BUDGET if intended"
        )
    if fixed_prefix is not None:
        if len(fixed_prefix) > s:
            raise ValueError(f"fixed_prefix has {len(fixed_prefix)} codes but s={s}")
        for code in fixed_prefix:
            if not 1 <= int(code) < b**n:
                raise ValueError(f"fixed_prefix code {code} outside 1..b^n-1")
    kernel = build_kernel_table(modulus, g, a)
    et = kernel.table
    N = b**m_digits
    # Candidate code at shift delta is g^(L - delta) = g^(-delta).
    qcodes = np.empty(L, dtype=np.int64)
    qcodes[0] = et.exp[0]
    qcodes[1:] = et.exp[:0:-1]
    plan = make_plan(kernel.values, strategy=strategy, workers=workers)
    state = CbcState(
        modulus=modulus, m=m_digits, alpha=a, weights=weights, P=np.ones(N), deltas=[]
    )
    loghs = et.log[1:N]

    def exact_at(idx: int) -> float:
        shift = (L - idx) % L
        return float(np.dot(state.P[1:], kernel.values[(loghs + shift) % L]))

    for d in range(1, s + 1):
        gamma_d = weights.gamma(d)
        state.Q = embed_Q(state.P, et, m_digits)
        S = circ_convolve(kernel.values, state.Q, plan)
        idx, vmin = _select_candidate(S, qcodes, exact_at)
        if fixed_prefix is not None and d <= len(fixed_prefix):
            q_d = int(fixed_prefix[d - 1])
            idx = int((L - et.log[q_d]) % L)
        else:
            q_d = int(qcodes[idx])
        state.P_zero.append(float(state.P[0]))
        state.P = update_P(state.P, q_d, gamma_d, modulus, kernel)
        state.q.append(q_d)
        state.deltas.append(idx)
        state.selected.append(vmin)
        state.errors.append(float(np.sum(state.P) / N - 1.0))
    state.validate()
    rule = LatticeRule(
        b=b,
        m=m_digits,
        n=n,
        alpha=a,
        p=modulus.p,
        q=tuple(state.q),
        weights=weights,
        errors=tuple(state.errors),
        generator_g=et.g,
    )
    return (rule, state) if collect_state else rule
