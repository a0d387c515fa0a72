"""Point sets and generating matrices of polynomial lattice rules.

The rule with modulus p (deg p = n) and generating vector (q_1, ..., q_s)
has N = b^m points x_h = (v_n(h q_1 / p), ..., v_n(h q_s / p)) for the
polynomials h of degree < m.  Equivalently it is the digital net whose
j-th n x m generating matrix holds the Laurent expansion digits u_i of
q_j / p as C[k-1][l] = u_(k+l).

Point sets carry exact integer numerators v with x = v / b^n; conversion
to floating point happens only at output boundaries (CSV, evaluation).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, TYPE_CHECKING, Sequence

import numpy as np

from .gfpoly import Modulus, laurent_digits, poly_mulmod, v_n_map

if TYPE_CHECKING:  # pragma: no cover
    from .cbc import LatticeRule

__all__ = [
    "PointSet",
    "GenMatrix",
    "lattice_point_numerators",
    "lattice_points",
    "rule_points",
    "lattice_matrices",
    "digitalnet_points",
    "interlace",
    "write_matrix_file",
    "read_matrix_file",
    "points_to_csv",
    "write_points_bin",
    "read_points_bin",
]


@dataclass(frozen=True)
class PointSet:
    """N x s point set with exact numerators; x[h, j] = numerators[h, j] / b^n."""

    numerators: np.ndarray = field(repr=False)
    n: int
    b: int = 2

    def __post_init__(self) -> None:
        if self.numerators.ndim != 2:
            raise ValueError("numerators must be a 2-d array")

    @property
    def count(self) -> int:
        return self.numerators.shape[0]

    @property
    def dim(self) -> int:
        return self.numerators.shape[1]

    def as_float(self) -> np.ndarray:
        if self.b == 2:
            return np.ldexp(self.numerators.astype(np.float64), -self.n)
        return self.numerators.astype(np.float64) / float(self.b) ** self.n


@dataclass(frozen=True)
class GenMatrix:
    """A digital-net generating matrix over F_b, rows x cols = n x m."""

    rows: np.ndarray = field(repr=False)
    b: int = 2

    def __post_init__(self) -> None:
        if self.rows.ndim != 2:
            raise ValueError("matrix must be 2-d")
        if np.any(self.rows < 0) or np.any(self.rows >= self.b):
            raise ValueError(f"matrix entries must be base-{self.b} digits")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def m(self) -> int:
        return self.rows.shape[1]


def _mulmod_all_h(m: Modulus, q: int, m_digits: int) -> np.ndarray:
    """Codes of h(X) q(X) mod p for all b^m polynomials h, vectorized over h."""
    b, n = m.b, m.n
    N = b**m_digits
    hs = np.arange(N, dtype=np.int64)
    if b == 2:
        # mulmod is F_2-linear in h: XOR residues of X^i q for set bits of h.
        out = np.zeros(N, dtype=np.int64)
        for i in range(m_digits):
            basis = poly_mulmod(1 << i, q, m)
            out ^= np.where((hs >> np.int64(i)) & 1 == 1, np.int64(basis), np.int64(0))
        return out
    digits = np.zeros((N, n), dtype=np.int64)
    for i in range(m_digits):
        basis = poly_mulmod(b**i, q, m)
        bd = np.array([(basis // b**t) % b for t in range(n)], dtype=np.int64)
        coef = (hs // b**i) % b
        digits += coef[:, None] * bd[None, :]
    digits %= b
    weights = np.array([b**t for t in range(n)], dtype=np.int64)
    return digits @ weights


def _v_all(m: Modulus, codes: np.ndarray) -> np.ndarray:
    """v_n numerators for an array of residue codes, via linearity."""
    b, n = m.b, m.n
    if b == 2:
        basis = np.array([v_n_map(1 << i, m) for i in range(n)], dtype=np.int64)
        v = np.zeros(codes.shape[0], dtype=np.int64)
        for i in range(n):
            v ^= np.where((codes >> np.int64(i)) & 1 == 1, basis[i], np.int64(0))
        return v
    from .walsh_kernel import DigitRational

    basis_digits = np.array(
        [DigitRational(v_n_map(b**i, m), n, b).digits() for i in range(n)],
        dtype=np.int64,
    )
    acc = np.zeros((codes.shape[0], n), dtype=np.int64)
    for i in range(n):
        coef = (codes // b**i) % b
        acc += coef[:, None] * basis_digits[i][None, :]
    acc %= b
    weights = np.array([b ** (n - 1 - j) for j in range(n)], dtype=np.int64)
    return acc @ weights


def lattice_point_numerators(m: Modulus, q: Sequence[int], m_digits: int) -> np.ndarray:
    """Numerator matrix (b^m x s) of the rule's points."""
    if m_digits < 0 or m_digits > m.n:
        raise ValueError(f"point digits m={m_digits} must satisfy 0 <= m <= n={m.n}")
    cols = []
    for qj in q:
        codes = _mulmod_all_h(m, int(qj), m_digits)
        cols.append(_v_all(m, codes))
    return np.stack(cols, axis=1)


def lattice_points(m: Modulus, q: Sequence[int], m_digits: int) -> PointSet:
    """The b^m points of the rule with modulus m and generating vector q."""
    return PointSet(lattice_point_numerators(m, q, m_digits), n=m.n, b=m.b)


def rule_points(rule: "LatticeRule") -> PointSet:
    """Point set of a constructed rule."""
    return lattice_points(rule.modulus(), rule.q, rule.m)


def lattice_matrices(m: Modulus, q: Sequence[int], m_digits: int) -> list[GenMatrix]:
    """Generating matrices C_j with C_j[k-1][l] = u_(k+l), u from q_j / p."""
    if m_digits < 1:
        raise ValueError("matrix column count must be >= 1")
    out = []
    for qj in q:
        u = laurent_digits(int(qj), m, m.n + m_digits - 1).astype(np.int64)
        rows = np.empty((m.n, m_digits), dtype=np.int64)
        for k in range(m.n):
            rows[k] = u[k : k + m_digits]
        out.append(GenMatrix(rows=rows, b=m.b))
    return out


def digitalnet_points(matrices: Sequence[GenMatrix]) -> PointSet:
    """Digital net from generating matrices: y = C h over F_b, x = sum y_k b^-k.

    h runs over 0..b^m-1 with least significant digit first; all matrices
    must share shape and base.
    """
    if not matrices:
        raise ValueError("need at least one generating matrix")
    b = matrices[0].b
    n, mm = matrices[0].n, matrices[0].m
    if any(c.b != b or c.n != n or c.m != mm for c in matrices):
        raise ValueError("generating matrices must share base and shape")
    N = b**mm
    hs = np.arange(N, dtype=np.int64)
    H = np.stack([(hs // b**i) % b for i in range(mm)], axis=0)  # (m, N)
    weights = np.array([b ** (n - 1 - k) for k in range(n)], dtype=np.int64)
    cols = []
    for c in matrices:
        Y = (c.rows @ H) % b  # (n, N)
        cols.append(weights @ Y)
    return PointSet(np.stack(cols, axis=1), n=n, b=b)


def interlace(matrices: Sequence[GenMatrix], d: int) -> list[GenMatrix]:
    """Digit interlacing of consecutive blocks of d square m x m matrices.

    Block j yields a dm x m matrix whose row (k-1) d + i is row k of the
    i-th matrix in the block (1-based), raising the net's digit precision
    to dm.  The matrix count must be divisible by d.
    """
    if d < 1:
        raise ValueError("interlacing factor must be >= 1")
    if len(matrices) % d != 0:
        raise ValueError(f"matrix count {len(matrices)} is not divisible by d={d}")
    b = matrices[0].b
    mm = matrices[0].m
    if any(c.b != b or c.rows.shape != (mm, mm) for c in matrices):
        raise ValueError("interlacing requires square matrices of equal shape and base")
    out = []
    for j in range(len(matrices) // d):
        block = matrices[j * d : (j + 1) * d]
        rows = np.empty((d * mm, mm), dtype=np.int64)
        for k in range(mm):
            for i in range(d):
                rows[k * d + i] = block[i].rows[k]
        out.append(GenMatrix(rows=rows, b=b))
    return out


def write_matrix_file(path: str | Path, matrices: Sequence[GenMatrix]) -> None:
    """Text format: header "b n m count", then row-major digits per matrix."""
    if not matrices:
        raise ValueError("need at least one generating matrix")
    b, n, mm = matrices[0].b, matrices[0].n, matrices[0].m
    if any(c.b != b or c.n != n or c.m != mm for c in matrices):
        raise ValueError("matrices in one file must share base and shape")
    lines = [f"{b} {n} {mm} {len(matrices)}"]
    for c in matrices:
        for row in c.rows:
            lines.append(" ".join(str(int(d)) for d in row))
        lines.append("")
    Path(path).write_text("\n".join(lines))


def read_matrix_file(path: str | Path) -> list[GenMatrix]:
    tokens = Path(path).read_text().split()
    if len(tokens) < 4:
        raise ValueError("matrix file too short")
    b, n, mm, count = (int(t) for t in tokens[:4])
    body = tokens[4:]
    if len(body) != n * mm * count:
        raise ValueError(f"expected {n * mm * count} digits, found {len(body)}")
    digits = np.array([int(t) for t in body], dtype=np.int64).reshape(count, n, mm)
    return [GenMatrix(rows=digits[i], b=b) for i in range(count)]


def points_to_csv(points: PointSet, out: IO[str]) -> None:
    """One header line of column names, then one float row per point."""
    out.write(",".join(f"x{j + 1}" for j in range(points.dim)) + "\n")
    xs = points.as_float()
    for row in xs:
        out.write(",".join(repr(float(t)) for t in row) + "\n")


def _points_m_digits(points: PointSet) -> int:
    m = 0
    while points.b**m < points.count:
        m += 1
    if points.b**m != points.count:
        raise ValueError(f"point count {points.count} is not a power of b={points.b}")
    return m


def write_points_bin(points: PointSet, out: IO[bytes]) -> None:
    """Little-endian uint64 header (b, m, n, s), then numerators row-major."""
    m = _points_m_digits(points)
    out.write(struct.pack("<4Q", points.b, m, points.n, points.dim))
    out.write(points.numerators.astype("<u8").tobytes(order="C"))


def read_points_bin(inp: IO[bytes]) -> PointSet:
    b, m, n, s = struct.unpack("<4Q", inp.read(32))
    data = np.frombuffer(inp.read(), dtype="<u8").astype(np.int64)
    if data.shape[0] != b**m * s:
        raise ValueError(f"expected {b**m * s} numerators, found {data.shape[0]}")
    return PointSet(data.reshape(b**m, s), n=int(n), b=int(b))
