"""Winding number, continuous logarithm and the projection factorization.

For a zero-free ``f`` on the circle with winding number zero, ``L f`` is the
continuous branch of ``log f`` that starts at the principal value at
``x = 0``. The one-sided factors are

    Psi+ f = exp(A+ L f),   Psi- f = exp(A- L f),

where ``A+`` keeps the positive frequencies and half of the mean (``A-``
mirrored), so ``Psi+ f * Psi- f = f``. Everything here is computed on
uniform grids with FFTs.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from bohrfact.errors import NonConvergent, NonzeroWinding, TailMassExceeded, ZeroOnCircle
from bohrfact.trigpoly import TrigPoly1, next_pow2, sample, sup_norm

MAX_GRID = 1 << 22
MAX_LOG_GRID = 1 << 20
STEP_LIMIT = math.pi / 2
LOG_TAIL_TOL = 1e-14


@dataclass(frozen=True)
class WindingResult:
    index: int
    max_step_arg: float
    samples_used: int
    min_modulus: float


@dataclass(frozen=True)
class LogSamples:
    """Samples ``values[m] = (L f)(m / M)`` and ``base = log f(0)``."""

    values: np.ndarray
    base: complex
    M: int


@dataclass(frozen=True)
class SpectralFactors:
    plus: TrigPoly1
    minus: TrigPoly1
    residual: float
    tail_mass: float
    grid_M: int


def _certified_samples(t: TrigPoly1, M: int, max_M: int):
    """Double ``M`` until ``min |t|`` is certified positive and every grid step
    turns the argument by less than pi/2."""
    if t.is_zero():
        raise ZeroOnCircle("zero polynomial")
    grad = t.gradient_bound()
    while True:
        vals = sample(t, M).values
        mod = np.abs(vals)
        lower = mod.min() - grad / (2 * M)
        if lower > 0:
            steps = np.angle(np.roll(vals, -1) / vals)
            worst = float(np.abs(steps).max())
            if worst < STEP_LIMIT:
                return vals, steps, worst, float(mod.min())
        if M >= max_M:
            if lower <= 0:
                raise ZeroOnCircle(
                    f"min |t| enclosure reaches 0 (grid min {mod.min():.3e}, slack {grad / (2 * M):.3e})"
                )
            raise NonConvergent(f"argument steps still >= pi/2 at grid size {M}")
        M *= 2


def winding_number(t: TrigPoly1, max_M: int = MAX_GRID) -> WindingResult:
    """Index of the closed curve ``t(T)`` around 0."""
    M = next_pow2(8 * (t.n + 1))
    vals, steps, worst, mn = _certified_samples(t, M, max_M)
    total = steps.sum() / (2 * math.pi)
    return WindingResult(int(round(total)), worst, len(vals), mn)


def continuous_log(t: TrigPoly1, M: int | None = None) -> LogSamples:
    w = winding_number(t)
    if w.index != 0:
        raise NonzeroWinding(w.index)
    M = max(next_pow2(M or 0), w.samples_used)
    vals, steps, _, _ = _certified_samples(t, M, max(M, MAX_GRID))
    return _log_from_samples(vals, steps)


def _log_from_samples(vals, steps) -> LogSamples:
    base = cmath.log(complex(vals[0]))
    arg = base.imag + np.concatenate([[0.0], np.cumsum(steps[:-1])])
    values = np.log(np.abs(vals)) + 1j * arg
    return LogSamples(values, base, len(vals))


def _one_sided(lhat: np.ndarray, sign: int) -> np.ndarray:
    M = len(lhat)
    a = np.zeros_like(lhat)
    a[0] = 0.5 * lhat[0]
    if sign > 0:
        a[1 : M // 2] = lhat[1 : M // 2]
    else:
        a[M // 2 + 1 :] = lhat[M // 2 + 1 :]
    return a


def _coeffs_to_poly(coeffs: np.ndarray, lo: int, hi: int):
    """Frequencies ``lo..hi`` from an FFT coefficient array and the relative l1 mass outside."""
    M = len(coeffs)
    idx = np.arange(lo, hi + 1)
    kept = coeffs[np.mod(idx, M)]
    total = np.abs(coeffs).sum()
    tail = (total - np.abs(kept).sum()) / total if total > 0 else 0.0
    return TrigPoly1.from_dense(kept, start=lo), max(0.0, float(tail))


def psi_fft(
    t: TrigPoly1,
    grid_M: int | None = None,
    out_bandwidth: int | None = None,
    tail_tol: float = 1e-8,
) -> SpectralFactors:
    """``(Psi+ t, Psi- t)`` via FFTs of the continuous logarithm.

    Without ``grid_M`` the grid is doubled until the logarithm's Fourier
    coefficients have negligible mass in the top half of the band, or that
    mass stops shrinking (rounding floor). For
    polynomial input the factors have degrees ``n_plus`` and ``n_minus``;
    ``out_bandwidth`` overrides both truncation degrees.
    """
    w = winding_number(t)
    if w.index != 0:
        raise NonzeroWinding(w.index)
    if grid_M is not None:
        if grid_M <= 4 * t.n:
            raise ValueError("grid_M must exceed 4 n(t)")
        M = grid_M
    else:
        M = max(next_pow2(8 * (t.n + 1)), w.samples_used)
    prev_upper = None
    while True:
        vals, steps, _, _ = _certified_samples(t, M, max(M, MAX_GRID))
        M = len(vals)
        logs = _log_from_samples(vals, steps)
        lhat = np.fft.fft(logs.values) / M
        mag = np.abs(lhat)
        freqs = np.abs(np.fft.fftfreq(M, 1.0 / M))
        upper = mag[freqs >= M // 4].sum() / max(mag.sum(), 1e-300)
        # stop when the top band is negligible or has hit the rounding floor
        stalled = prev_upper is not None and upper > 0.25 * prev_upper
        if grid_M is not None or upper < LOG_TAIL_TOL or stalled or M >= MAX_LOG_GRID:
            break
        prev_upper = upper
        M *= 2

    hi_plus = t.n_plus if out_bandwidth is None else out_bandwidth
    hi_minus = t.n_minus if out_bandwidth is None else out_bandwidth
    plus_vals = np.exp(np.fft.ifft(_one_sided(lhat, 1)) * M)
    minus_vals = np.exp(np.fft.ifft(_one_sided(lhat, -1)) * M)
    plus, tail_p = _coeffs_to_poly(np.fft.fft(plus_vals) / M, 0, max(0, hi_plus))
    minus, tail_m = _coeffs_to_poly(np.fft.fft(minus_vals) / M, -max(0, hi_minus), 0)
    tail = max(tail_p, tail_m)
    if tail > tail_tol:
        raise TailMassExceeded(tail, tail_tol)
    residual = relative_residual(plus, minus, t)
    return SpectralFactors(plus, minus, residual, tail, M)


def relative_residual(plus: TrigPoly1, minus: TrigPoly1, t: TrigPoly1) -> float:
    """``||plus * minus - t||_inf / ||t||_inf`` on an oversampled grid."""
    diff = plus * minus - t
    return sup_norm(diff).value / sup_norm(t).value


def imag_log_sup(t: TrigPoly1, M: int | None = None) -> float:
    """``max |Im L t|`` on the grid."""
    return float(np.abs(continuous_log(t, M).values.imag).max())
