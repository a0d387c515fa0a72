"""Field arithmetic against digit-list oracles and counting identities."""

import numpy as np
import pytest

import oracles
from hoplr.gfpoly import (
    ExpTable,
    Modulus,
    PolyGF,
    PrimeBase,
    exp_table,
    find_generator,
    find_irreducible,
    is_irreducible,
    laurent_digits,
    poly_add,
    poly_degree,
    poly_divmod,
    poly_mul,
    poly_mulmod,
    poly_powmod,
    v_n_map,
)


@pytest.mark.parametrize("b", [2, 3, 5])
def test_mul_divmod_match_digit_oracle(b):
    rng = np.random.default_rng(7)
    hi = b**7
    for _ in range(300):
        x = int(rng.integers(0, hi))
        y = int(rng.integers(1, hi))
        assert poly_mul(x, y, b) == oracles.poly_mul_slow(x, y, b)
        q, r = poly_divmod(x, y, b)
        qs, rs = oracles.poly_divmod_slow(x, y, b)
        assert (q, r) == (qs, rs)
        assert poly_add(oracles.poly_mul_slow(q, y, b), r, b) == x
        assert oracles.poly_degree_slow(r, b) < oracles.poly_degree_slow(y, b)


@pytest.mark.parametrize("b", [2, 3])
def test_mulmod_matches_oracle(b):
    rng = np.random.default_rng(11)
    p = find_irreducible(5, b)
    for _ in range(200):
        x = int(rng.integers(0, b**7))
        y = int(rng.integers(0, b**7))
        assert poly_mulmod(x, y, p) == oracles.poly_mulmod_slow(x, y, p.p, b)


def test_degree_and_codes():
    assert poly_degree(0, 2) == float("-inf")
    assert poly_degree(1, 2) == 0
    assert poly_degree(19, 2) == 4
    assert PolyGF.from_coeffs([1, 1, 0, 0, 1], 2).code == 19
    assert PolyGF(19, 2).coeffs() == [1, 1, 0, 0, 1]


def test_prime_base_rejects_composites():
    with pytest.raises(ValueError):
        PrimeBase(4)
    with pytest.raises(ValueError):
        PrimeBase(1)
    assert int(PrimeBase(2)) == 2


@pytest.mark.parametrize("b,max_degree", [(2, 8), (3, 4)])
def test_irreducibility_matches_trial_division(b, max_degree):
    for code in range(b, b ** (max_degree + 1)):
        assert is_irreducible(code, b) == oracles.trial_division_irreducible(code, b), code


def test_irreducible_counts():
    # (1/n) sum_{d|n} mu(d) b^(n/d) monic irreducibles of degree n.
    monic_deg8_b2 = sum(1 for c in range(1 << 8, 1 << 9) if is_irreducible(c, 2))
    assert monic_deg8_b2 == 30
    monic_deg3_b3 = sum(1 for c in range(27, 54) if is_irreducible(c, 3))
    assert monic_deg3_b3 == 8
    # unit multiples keep irreducibility: all degree-3 codes over F_3.
    all_deg3_b3 = sum(1 for c in range(27, 81) if is_irreducible(c, 3))
    assert all_deg3_b3 == 16


def test_find_irreducible_returns_smallest_code():
    for b, n in [(2, 1), (2, 4), (2, 6), (3, 2), (3, 3)]:
        mod = find_irreducible(n, b)
        assert mod.n == n and mod.b == b
        assert is_irreducible(mod.p, b)
        for code in range(b**n, mod.p):
            assert not is_irreducible(code, b)


def test_modulus_create_validates():
    with pytest.raises(ValueError):
        Modulus.create(0, 2)
    with pytest.raises(ValueError):
        Modulus.create(1, 2)
    mod = Modulus.create(19, 2)
    assert (mod.p, mod.n, mod.b, mod.group_order) == (19, 4, 2, 15)


@pytest.mark.parametrize("b,n", [(2, 4), (2, 6), (3, 2), (3, 3)])
def test_generator_is_smallest_and_has_full_order(b, n):
    mod = find_irreducible(n, b)
    g = find_generator(mod)
    L = mod.group_order

    def order(a):
        acc, k = a, 1
        while acc != 1:
            acc = poly_mulmod(acc, a, mod)
            k += 1
        return k

    assert order(g) == L
    for smaller in range(1, g):
        assert order(smaller) < L


@pytest.mark.parametrize("b,n", [(2, 4), (2, 6), (2, 10), (3, 3)])
def test_exp_table_full_chain(b, n):
    mod = find_irreducible(n, b)
    table = exp_table(mod, find_generator(mod))
    L = mod.group_order
    assert table.exp.shape == (L,) and int(table.exp[0]) == 1
    prev = 1
    for i in range(1, L):
        prev = poly_mulmod(prev, table.g, mod)
        assert int(table.exp[i]) == prev
    assert poly_mulmod(prev, table.g, mod) == 1  # order exactly L
    codes = np.arange(1, b**n)
    assert np.array_equal(np.sort(np.asarray(table.exp, dtype=np.int64)), codes)
    assert np.array_equal(table.exp[table.log[codes]], codes)
    assert table.log[0] < 0 or table.log.shape[0] == b**n  # zero never mapped


def test_exp_table_rejects_non_generator():
    mod = find_irreducible(4, 2)  # L = 15; element of order 5 or 3 exists
    g = find_generator(mod)
    g2 = poly_mulmod(g, poly_mulmod(g, g, mod), mod)  # g^3 has order 5
    with pytest.raises(ValueError):
        exp_table(mod, g2)


@pytest.mark.parametrize("b", [2, 3])
def test_laurent_digits_match_long_division(b):
    rng = np.random.default_rng(23)
    for n in (3, 5):
        mod = find_irreducible(n, b)
        for _ in range(50):
            w = int(rng.integers(0, b**n))
            for count in (n, n + 3):
                got = laurent_digits(w, mod, count)
                want = oracles.laurent_digits_slow(w, mod.p, b, count)
                assert list(got) == want, (w, mod.p, count)


@pytest.mark.parametrize("b", [2, 3])
def test_v_n_map_matches_oracle(b):
    rng = np.random.default_rng(29)
    mod = find_irreducible(6 if b == 2 else 4, b)
    n = mod.n
    assert v_n_map(0, mod) == 0
    for _ in range(100):
        w = int(rng.integers(0, b**n))
        assert v_n_map(w, mod) == oracles.v_n_slow(w, mod.p, b, n)


def test_v_n_map_is_linear_and_injective():
    mod = find_irreducible(6, 2)
    vals = [v_n_map(w, mod) for w in range(2**6)]
    assert len(set(vals)) == 2**6  # injective on residues
    for x in range(2**6):
        for y in (1, 5, 17):
            assert vals[x ^ y] == vals[x] ^ vals[y]


@pytest.mark.parametrize("b", [2, 3])
def test_powmod_fermat_and_small_exponents(b):
    mod = find_irreducible(4, b)
    rng = np.random.default_rng(31)
    for _ in range(30):
        a = int(rng.integers(1, b**4))
        acc = 1
        for e in range(6):
            assert poly_powmod(a, e, mod) == acc
            acc = poly_mulmod(acc, a, mod)
        assert poly_powmod(a, b**mod.n, mod) == poly_divmod(a, mod.p, b)[1]
