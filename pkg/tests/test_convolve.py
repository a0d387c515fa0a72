"""Circular cross-correlation: FFT route against the defining sum."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hoplr.convolve import circ_convolve, fft_arbitrary_length, make_plan


def brute_correlate(kernel, Q):
    L = len(kernel)
    return np.array(
        [sum(kernel[(beta - delta) % L] * Q[beta] for beta in range(L)) for delta in range(L)]
    )


@pytest.mark.parametrize("L", [1, 2, 3, 7, 15, 63, 255])
@pytest.mark.parametrize("strategy", ["direct", "fft"])
def test_matches_defining_sum(L, strategy):
    rng = np.random.default_rng(L)
    kernel = rng.standard_normal(L)
    Q = rng.standard_normal(L)
    plan = make_plan(kernel, strategy=strategy)
    got = circ_convolve(None, Q, plan)
    want = brute_correlate(kernel, Q)
    assert_allclose(got, want, rtol=0, atol=1e-10 * max(1.0, np.abs(want).max()))


@pytest.mark.parametrize("L", [511, 513, 1023])
def test_fft_matches_direct(L):
    rng = np.random.default_rng(L)
    kernel = rng.standard_normal(L)
    Q = rng.standard_normal(L)
    fast = circ_convolve(None, Q, make_plan(kernel, strategy="fft"))
    slow = circ_convolve(None, Q, make_plan(kernel, strategy="direct"))
    assert_allclose(fast, slow, rtol=0, atol=1e-9 * max(1.0, np.abs(slow).max()))


def test_auto_strategy_thresholds():
    assert make_plan(np.ones(511), strategy="auto").strategy == "direct"
    assert make_plan(np.ones(512), strategy="auto").strategy == "fft"


def test_plan_reuse_and_shape_checks():
    rng = np.random.default_rng(0)
    kernel = rng.standard_normal(31)
    plan = make_plan(kernel, strategy="fft")
    Q1, Q2 = rng.standard_normal(31), rng.standard_normal(31)
    assert_allclose(circ_convolve(None, Q1, plan), brute_correlate(kernel, Q1), atol=1e-10)
    assert_allclose(circ_convolve(None, Q2, plan), brute_correlate(kernel, Q2), atol=1e-10)
    with pytest.raises(ValueError):
        circ_convolve(None, rng.standard_normal(30), plan)
    with pytest.raises(ValueError):
        circ_convolve(None, None, None)
    with pytest.raises(ValueError):
        make_plan(np.ones(4), strategy="bogus")
    with pytest.raises(ValueError):
        make_plan(np.ones((2, 2)))


def test_fft_arbitrary_length_round_trip():
    rng = np.random.default_rng(3)
    for L in (5, 12, 63, 100):
        x = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        back = fft_arbitrary_length(fft_arbitrary_length(x), inverse=True)
        assert_allclose(back, x, rtol=0, atol=1e-12)
    # DFT of a delta is flat
    d = np.zeros(9)
    d[0] = 1.0
    assert_allclose(fft_arbitrary_length(d), np.ones(9, dtype=complex), atol=1e-14)
    with pytest.raises(ValueError):
        fft_arbitrary_length(np.ones((2, 3)))
