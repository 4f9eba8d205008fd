"""Approximate spectral factorization of strictly positive 2D trigonometric polynomials.

For ``t > 0`` on the torus, each slice ``h_x(y) = t(x, y)`` is a positive 1D
polynomial in ``y`` and factors exactly; ``S+(t)(x, y) = (Psi+ h_x)(y)`` is
real analytic in ``x`` and a polynomial of degree ``n2(t)`` in ``y``.
Truncating its Fourier series in ``x`` at ``|j| <= N`` gives ``S_N+(t)``,
which converges to ``S+(t)`` exponentially fast.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from bohrfact.analytic import psi_fft
from bohrfact.errors import MinNotPositive, PreconditionError
from bohrfact.roots1d import GUARD_BAND, spectral_factor_exact
from bohrfact.trigpoly import (
    NormEstimate,
    TrigPoly1,
    TrigPoly2,
    certified_min_real,
    next_pow2,
    sample,
    sq_modulus,
    sup_norm,
)

ZETA_SAFETY = 2.0


class SliceError(PreconditionError):
    def __init__(self, index: int, x: float, cause: Exception):
        self.index = index
        self.x = x
        self.cause = cause
        super().__init__(f"slice {index} (x = {x:.6g}): {cause}")


@dataclass(frozen=True)
class SliceFactorization:
    """Per-slice factors on the grid ``x_m = m / M``.

    ``plus[m, k]`` is the coefficient of ``e_k(y)`` in ``Psi+ h_{x_m}`` for
    ``k = 0..n2``; the minus factors are the conjugate mirror images.
    """

    M: int
    n2: int
    plus: np.ndarray
    max_residual: float
    max_adjacent_jump: float

    def minus_coeffs(self) -> np.ndarray:
        return np.conj(self.plus)


@dataclass(frozen=True)
class Bound2D:
    rho: float
    sigma1: float
    tau: float
    zeta_est: float
    n1: int
    n2: int
    min_t: float

    def sbound1(self, N: int) -> float:
        """``2 zeta n2^(pi/2) / sigma1 * exp(-N sigma1)``."""
        if self.n1 == 0:
            return 0.0
        return 2 * self.zeta_est * _n2pow(self.n2) / self.sigma1 * math.exp(-N * self.sigma1)


def _n2pow(n2: int) -> float:
    return max(n2, 1) ** (math.pi / 2)


def gamma_slice(t: TrigPoly2, z: complex) -> TrigPoly1:
    """``Gamma_z t``: substitute ``e_j(x) -> z^j``, leaving a polynomial in ``y``."""
    if z == 0:
        raise ValueError("z must be nonzero")
    out = {}
    for (j, k), c in t.terms.items():
        out[k] = out.get(k, 0) + c * z**j
    return TrigPoly1(out)


def default_grid(t: TrigPoly2, N: int = 0) -> int:
    """Slice grid size: a power of two >= 8 (n1 + 1) and >= 4 (N + 1)."""
    return next_pow2(max(8 * (t.n1 + 1), 4 * (N + 1)))


def certify_positive(t: TrigPoly2, oversample: float = 4) -> NormEstimate:
    mr = certified_min_real(t, oversample)
    if mr.lower <= 0:
        raise MinNotPositive(f"min t enclosure [{mr.lower:.3e}, {mr.value:.3e}] is not > 0")
    return mr


def _slice_coeffs(t: TrigPoly2, M: int) -> np.ndarray:
    """``h[m, k + n2]`` = coefficient of ``e_k(y)`` in ``h_{x_m}``, from one FFT per ``k``."""
    n2 = t.n2
    buf = np.zeros((M, 2 * n2 + 1), dtype=np.complex128)
    for (j, k), c in t.terms.items():
        buf[j % M, k + n2] += c
    return np.fft.ifft(buf, axis=0) * M


def s_factor(
    t: TrigPoly2,
    M: int | None = None,
    method: str = "roots",
    guard_band: float = GUARD_BAND,
    workers: int | None = None,
) -> SliceFactorization:
    """Factor every slice ``h_{x_m}`` and normalize each ``Psi+`` to a positive
    real constant coefficient so the slices fit together continuously in ``x``."""
    certify_positive(t)
    M = M or default_grid(t)
    if M <= 2 * t.n1:
        raise ValueError("M must exceed 2 n1(t)")
    n2 = t.n2
    h = _slice_coeffs(t, M)

    def one(m):
        # slices of a real positive t are Hermitian in y
        row = 0.5 * (h[m] + np.conj(h[m][::-1]))
        hx = TrigPoly1.from_dense(row, start=-n2)
        try:
            if method == "roots":
                res = spectral_factor_exact(hx, guard_band=guard_band, certify=False)
            else:
                res = psi_fft(hx)
        except PreconditionError as exc:
            raise SliceError(m, m / M, exc) from exc
        coeffs = res.plus.dense(0, n2)
        c0 = coeffs[0]
        coeffs = coeffs * (abs(c0) / c0)
        return coeffs, res.residual

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, range(M)))
    else:
        results = [one(m) for m in range(M)]
    plus = np.array([r[0] for r in results])
    resid = max(r[1] for r in results)
    jump = float(np.abs(np.diff(np.vstack([plus, plus[:1]]), axis=0)).max()) if M > 1 else 0.0
    return SliceFactorization(M, n2, plus, resid, jump)


def s_truncate(sf: SliceFactorization, N: int, sign: int = 1) -> TrigPoly2:
    """``S_N^sign``: keep x-frequencies ``|j| <= N`` of the slice factors."""
    if N >= sf.M / 2:
        raise ValueError("N must be < M/2")
    coeffs = np.fft.fft(sf.plus, axis=0) / sf.M
    terms = {}
    for j in range(-N, N + 1):
        row = coeffs[j % sf.M]
        for k in range(sf.n2 + 1):
            terms[(j, k)] = row[k]
    plus = TrigPoly2(terms)
    return plus if sign > 0 else plus.conj()


def error_2d(t: TrigPoly2, s_n: TrigPoly2, oversample: float = 4, grid: int | None = None) -> NormEstimate:
    """``sup |t - S_N conj(S_N)|`` on a square grid, with enclosure.

    A square grid is used so that unimodular changes of variables permute the
    grid points and leave the measured value unchanged.
    """
    diff = t - sq_modulus(s_n)
    if grid is None:
        bw = max(diff.n1, diff.n2, 1)
        grid = min(1 << 11, next_pow2(int(oversample * (2 * bw + 1))))
    return grid_sup(diff, grid)


def grid_sup(f: TrigPoly2, M: int) -> NormEstimate:
    if f.is_zero():
        return NormEstimate(0.0, 0.0, 0.0, (M, M))
    vals = sample(f, M, M).values
    mod = np.abs(vals)
    idx = np.unravel_index(np.argmax(mod), mod.shape)
    gj, gk = f._axis_gradient_bounds()
    v = float(mod[idx])
    return NormEstimate(v, v, v + (gj + gk) / (2 * M), (M, M), (idx[0] / M, idx[1] / M))


def bound_2d(t: TrigPoly2, sf: SliceFactorization | None = None) -> Bound2D:
    """``rho``, ``sigma1 = rho / n1``, ``tau`` and the estimate of ``zeta``.

    ``zeta_est`` is ``ZETA_SAFETY`` times the largest ``||Psi+ h_x||_inf / n2^(pi/2)``
    over the slice grid.
    """
    mt = certify_positive(t).lower
    rho = min(1.0, mt / (2 * math.e * t.l1_coeff()))
    sigma1 = rho / t.n1 if t.n1 else math.inf
    sup = sup_norm(t).upper
    tau = max(math.log(sup + mt / 2), math.pi / 2 + abs(math.log(mt / 2)))
    sf = sf or s_factor(t)
    M_y = next_pow2(8 * (sf.n2 + 1))
    buf = np.zeros((sf.M, M_y), dtype=np.complex128)
    buf[:, : sf.n2 + 1] = sf.plus
    slice_sup = np.abs(np.fft.ifft(buf, axis=1) * M_y).max()
    zeta = ZETA_SAFETY * float(slice_sup) / _n2pow(t.n2)
    return Bound2D(rho, sigma1, tau, zeta, t.n1, t.n2, mt)


def n_epsilon(t: TrigPoly2, eps: float, b: Bound2D | None = None) -> int:
    """``N_eps = (n1 / rho) * (log(2 zeta n2^(pi/2) / sigma1) - log eps)``, rounded up,
    with the measured ``zeta_est`` in place of ``zeta``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    b = b or bound_2d(t)
    if b.n1 == 0:
        return 0
    val = b.n1 / b.rho * (math.log(2 * b.zeta_est * _n2pow(b.n2) / b.sigma1) - math.log(eps))
    return max(0, math.ceil(val))


def n_epsilon_real(t: TrigPoly2, eps: float, b: Bound2D | None = None) -> float:
    """Unrounded :func:`n_epsilon`."""
    b = b or bound_2d(t)
    if b.n1 == 0:
        return 0.0
    return b.n1 / b.rho * (math.log(2 * b.zeta_est * _n2pow(b.n2) / b.sigma1) - math.log(eps))


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    error: float
    error_upper: float
    bound: float


def convergence_table(
    t: TrigPoly2, Ns, M: int | None = None, method: str = "roots", oversample: float = 4
) -> tuple[list[ConvergenceRow], Bound2D]:
    Ns = list(Ns)
    M = M or default_grid(t, max(Ns))
    sf = s_factor(t, M, method=method)
    b = bound_2d(t, sf)
    rows = []
    for N in Ns:
        est = error_2d(t, s_truncate(sf, N), oversample)
        rows.append(ConvergenceRow(N, est.value, est.upper, b.sbound1(N)))
    return rows, b
