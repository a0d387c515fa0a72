"""Externally tabulated reference rules: integrity and one fast recomputation."""

import math

import pytest
from hoplr.gfpoly import is_irreducible, poly_degree
from hoplr.reference import (
    REFERENCE_RULES,
    evaluate_errors,
    matches_three_digits,
    three_digit_tolerance,
)


def test_table_integrity():
    assert set(REFERENCE_RULES) == {"2a", "2b", "3a", "3b"}
    for key, ref in REFERENCE_RULES.items():
        assert ref.key == key
        assert ref.b == 2
        assert ref.s == 10
        assert len(ref.errors_3sig) == 10
        assert ref.n == ref.alpha * ref.m
        assert poly_degree(ref.p, ref.b) == ref.n
        assert is_irreducible(ref.p, ref.b)
        assert all(1 <= qj < 2**ref.n for qj in ref.q)
        assert ref.weight_sequence().gammas[0] == pytest.approx(0.9)
        # tabulated prefix errors increase with dimension
        assert all(a < b for a, b in zip(ref.errors_3sig, ref.errors_3sig[1:]))


@pytest.mark.parametrize(
    "tabulated,tol",
    [(2.14e-6, 1e-8), (4.08e-1, 1e-3), (1.30e-2, 1e-4), (2.48, 1e-2)],
)
def test_three_digit_tolerance(tabulated, tol):
    assert three_digit_tolerance(tabulated) == pytest.approx(tol, rel=1e-12)


def test_matches_three_digits_boundaries():
    assert matches_three_digits(2.14e-6, 2.14e-6)
    assert matches_three_digits(2.1499e-6, 2.14e-6)  # truncation overshoot
    assert not matches_three_digits(2.16e-6, 2.14e-6)
    with pytest.raises(ValueError):
        three_digit_tolerance(0.0)


def test_smallest_reference_rule_reproduces_tabulated_errors():
    ref = REFERENCE_RULES["2a"]
    computed = evaluate_errors(ref)
    for d in range(ref.s):
        assert matches_three_digits(computed[d], ref.errors_3sig[d]), d
        # and the recomputed value indeed truncates to the printed digits
        exp = math.floor(math.log10(ref.errors_3sig[d]))
        scale = 10.0 ** (exp - 2)
        assert math.floor(computed[d] / scale) * scale == pytest.approx(
            ref.errors_3sig[d], rel=1e-9
        )
