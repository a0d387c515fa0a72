"""Circular cross-correlation for the FFT-accelerated component search.

The search needs, for every shift delta,

    out[delta] = sum_beta omega[(beta - delta) mod L] Q[beta],

a circular cross-correlation of length L = b^n - 1 (never a power of two).
The FFT route computes irfft(conj(rfft(omega)) * rfft(Q)); the direct
route evaluates the defining sum and serves as the in-repo oracle.  FFTs
are delegated to scipy.fft, whose mixed-radix/Bluestein backend handles
arbitrary lengths in O(L log L) without power-of-two padding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft

__all__ = ["ConvPlan", "make_plan", "circ_convolve", "fft_arbitrary_length"]

# Below this length the O(L^2) direct route beats FFT setup cost.
_DIRECT_CUTOFF = 512
# Direct route materializes an L x L circulant only below this length.
_DIRECT_MATMUL_LIMIT = 4096


@dataclass(frozen=True)
class ConvPlan:
    """A reusable plan binding one kernel to a strategy.

    For the FFT strategy the conjugated kernel transform is cached, so
    repeated correlations against the same kernel cost two transforms.
    """

    L: int
    strategy: str
    kernel: np.ndarray = field(repr=False)
    kernel_hat: np.ndarray | None = field(repr=False, default=None)
    workers: int = 1


def make_plan(kernel: np.ndarray, strategy: str = "auto", workers: int = 1) -> ConvPlan:
    """Plan correlations against a fixed real kernel.

    strategy "auto" picks "direct" below length 512 and "fft" otherwise.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 1 or kernel.shape[0] < 1:
        raise ValueError("kernel must be a nonempty 1-d array")
    L = kernel.shape[0]
    if strategy == "auto":
        strategy = "direct" if L < _DIRECT_CUTOFF else "fft"
    if strategy == "direct":
        return ConvPlan(L=L, strategy="direct", kernel=kernel, workers=workers)
    if strategy == "fft":
        khat = np.conj(scipy.fft.rfft(kernel, workers=workers))
        return ConvPlan(L=L, strategy="fft", kernel=kernel, kernel_hat=khat, workers=workers)
    raise ValueError(f"unrecognized strategy {strategy!r}")


def _direct_correlate(kernel: np.ndarray, Q: np.ndarray) -> np.ndarray:
    L = kernel.shape[0]
    ext = np.concatenate([kernel, kernel])
    if L <= _DIRECT_MATMUL_LIMIT:
        windows = np.lib.stride_tricks.sliding_window_view(ext, L)
        rows = windows[L - np.arange(L)]  # rows[delta][beta] = kernel[(beta-delta) % L]
        return rows @ Q
    out = np.empty(L)
    for delta in range(L):
        out[delta] = np.dot(ext[L - delta : 2 * L - delta], Q)
    return out


def circ_convolve(omega: np.ndarray, Q: np.ndarray, plan: ConvPlan | None = None) -> np.ndarray:
    """out[delta] = sum_beta omega[(beta - delta) mod L] Q[beta].

    Passing a plan made from the same kernel reuses its cached transform;
    omega may then be None.
    """
    if plan is None:
        if omega is None:
            raise ValueError("need a kernel or a plan")
        plan = make_plan(np.asarray(omega, dtype=np.float64))
    Q = np.asarray(Q, dtype=np.float64)
    if Q.shape != (plan.L,):
        raise ValueError(f"Q must have shape ({plan.L},), got {Q.shape}")
    if plan.strategy == "direct":
        return _direct_correlate(plan.kernel, Q)
    qhat = scipy.fft.rfft(Q, workers=plan.workers)
    return scipy.fft.irfft(plan.kernel_hat * qhat, n=plan.L, workers=plan.workers)


def fft_arbitrary_length(x: np.ndarray, inverse: bool = False, workers: int = 1) -> np.ndarray:
    """Complex DFT of arbitrary (not necessarily power-of-two) length."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("input must be 1-d")
    if inverse:
        return scipy.fft.ifft(x, workers=workers)
    return scipy.fft.fft(x, workers=workers)
