"""Dirichlet, Hilbert and analytic kernels on the circle.

With ``e_j(x) = exp(2 pi i j x)``::

    D_N  = sum_{|j| <= N} e_j
    H_N  = sum_{j=1}^{N} (e_j - e_{-j})
    A_N+ = (D_N + H_N) / 2 = 1/2 + sum_{j=1}^{N} e_j      (A_N- mirrored)

Convolution with a kernel multiplies Fourier coefficients by the kernel's
coefficients, so each kernel acts on a :class:`TrigPoly1` as a truncation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bohrfact import _backend
from bohrfact.errors import NonConvergent
from bohrfact.trigpoly import TrigPoly1, next_pow2, sample

DIRICHLET = "dirichlet"
HILBERT = "hilbert"
ANALYTIC = "analytic"
HALF_PLUS_ANALYTIC = "half_plus_analytic"

_CODES = {DIRICHLET: 0, HILBERT: 1, ANALYTIC: 2, HALF_PLUS_ANALYTIC: 3}


@dataclass(frozen=True)
class Kernel:
    """One of ``D_N``, ``H_N``, ``A_N^sign`` or ``1/2 + A_N^sign``."""

    name: str
    N: int
    sign: int = 1

    def __post_init__(self):
        if self.name not in _CODES:
            raise ValueError(f"unknown kernel {self.name!r}")
        if self.N < 0:
            raise ValueError("N must be >= 0")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def dirichlet(cls, N: int) -> Kernel:
        return cls(DIRICHLET, N)

    @classmethod
    def hilbert(cls, N: int) -> Kernel:
        return cls(HILBERT, N)

    @classmethod
    def analytic_plus(cls, N: int) -> Kernel:
        return cls(ANALYTIC, N, 1)

    @classmethod
    def analytic_minus(cls, N: int) -> Kernel:
        return cls(ANALYTIC, N, -1)

    @classmethod
    def half_plus_analytic(cls, sign: int, N: int) -> Kernel:
        return cls(HALF_PLUS_ANALYTIC, N, sign)

    def multiplier(self, j: int) -> float:
        """Fourier coefficient of the kernel at frequency ``j``."""
        N, s = self.N, self.sign
        if self.name == DIRICHLET:
            return 1.0 if abs(j) <= N else 0.0
        if self.name == HILBERT:
            if 1 <= j <= N:
                return 1.0
            return -1.0 if -N <= j <= -1 else 0.0
        if j == 0:
            return 0.5 if self.name == ANALYTIC else 1.0
        return 1.0 if 1 <= s * j <= N else 0.0

    def as_poly(self) -> TrigPoly1:
        return TrigPoly1({j: self.multiplier(j) for j in range(-self.N, self.N + 1)})

    def modulus(self, x) -> np.ndarray:
        """``|K(x)|`` from the closed sine-ratio forms (``A_N+`` and ``A_N-`` share it)."""
        return _backend.kernel_modulus(_CODES[self.name], self.N, x)


def convolve(kernel: Kernel, t: TrigPoly1) -> TrigPoly1:
    return TrigPoly1({j: c * kernel.multiplier(j) for j, c in t.terms.items()})


def exp_series(f: TrigPoly1, bandwidth: int | None = None) -> tuple[TrigPoly1, float]:
    """Coefficients of ``exp(f)`` in the window ``|j| <= bandwidth`` and the relative
    l1 mass outside it.

    Computed as the exponential of grid samples followed by an FFT; the grid
    has at least 8x the window so aliasing stays below the reported tail.
    The default window is 4 n(f).
    """
    bw = 4 * max(f.n, 1) if bandwidth is None else bandwidth
    M = next_pow2(8 * (bw + f.n + 1))
    vals = np.exp(sample(f, M).values)
    coeffs = np.fft.fft(vals) / M
    idx = np.arange(-bw, bw + 1)
    kept = coeffs[idx % M]
    total = np.abs(coeffs).sum()
    tail = max(0.0, float((total - np.abs(kept).sum()) / total))
    return TrigPoly1.from_dense(kept, start=-bw), tail


def kernel_l1_norm(kernel: Kernel, tol: float = 1e-6) -> float:
    """``||K||_1`` by adaptive Gauss-Kronrod quadrature to absolute accuracy ``tol``.

    The integration interval is split at the zeros of the sine ratios so every
    panel sees a smooth integrand.
    """
    try:
        value, err = _backend.kernel_abs_integral(_CODES[kernel.name], kernel.N, tol)
    except RuntimeError as exc:
        raise NonConvergent(str(exc)) from exc
    if err > tol:
        raise NonConvergent(f"quadrature error estimate {err:.3e} > {tol:.3e}")
    return float(value)


def kernel_l1_bound(kernel: Kernel) -> float:
    """Upper bound on ``||K||_1`` of logarithmic order in ``N`` (requires ``N >= 1``
    for the Hilbert and analytic kernels)."""
    N = kernel.N
    if kernel.name == DIRICHLET:
        return 1 + math.log(2 * N + 1)
    if N < 1:
        raise ValueError("bound needs N >= 1")
    if kernel.name == HILBERT:
        return 1 + 2 * math.log(N)
    if kernel.name == ANALYTIC:
        return 1.5 + math.log(N)
    return 1 + math.log(N + 1)


def analytic_decay_bound(F_sup: float, sigma: float, N: int) -> float:
    """Bound on ``||f - D_N * f||_inf`` when ``f = F(e_1)`` with ``F`` holomorphic
    on the annulus ``exp(-sigma) <= |z| <= exp(sigma)`` and ``|F| <= F_sup`` there."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if F_sup < 0:
        raise ValueError("F_sup must be nonnegative")
    return 2.0 * F_sup / sigma * math.exp(-N * sigma)


def annulus_sup(F, sigma: float, M: int = 4096) -> float:
    """``max |F|`` over the annulus, sampled on both boundary circles."""
    x = np.arange(M) / M
    w = np.exp(2j * np.pi * x)
    return float(max(np.abs(F(math.exp(sigma) * w)).max(), np.abs(F(math.exp(-sigma) * w)).max()))
