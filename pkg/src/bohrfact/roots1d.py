"""Exact spectral factorization of 1D trigonometric polynomials by root splitting.

A zero-free ``t`` with winding number zero, ``n_minus`` factors in ``e_{-1}``
and ``n_plus`` in ``e_1`` splits as::

    t = exp(gamma) * prod(1 - lam_j e_{-1}) * prod(1 - mu_j e_1),  |lam_j|, |mu_j| < 1

with ``lam_j`` the roots of ``P(z) = z^{n_minus} t(z)`` inside the unit disk
and ``mu_j`` the reciprocals of the roots outside. ``exp(gamma)`` is split
evenly between the two one-sided factors.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from bohrfact.analytic import continuous_log, relative_residual, winding_number
from bohrfact.errors import NonzeroWinding, NotPositiveReal, PreconditionError, RootNearCircle
from bohrfact.kernels import Kernel, convolve
from bohrfact.trigpoly import GridSamples1, TrigPoly1, certified_min_real, interpolate, sample, sup_norm

GUARD_BAND = 1e-8
MAX_DEGREE = 400


@dataclass(frozen=True)
class Factorization1D:
    gamma: complex
    lambdas: tuple
    mus: tuple
    n_minus: int
    n_plus: int
    backward_error: float = 0.0

    def __post_init__(self):
        for r in self.lambdas + self.mus:
            if not 0 < abs(r) < 1:
                raise ValueError(f"factor parameter {r} not in the punctured unit disk")

    def psi_plus(self) -> TrigPoly1:
        return _expand(cmath.exp(self.gamma / 2), self.mus, 1)

    def psi_minus(self) -> TrigPoly1:
        return _expand(cmath.exp(self.gamma / 2), self.lambdas, -1)

    def reconstruct(self) -> TrigPoly1:
        return _expand(cmath.exp(self.gamma), self.lambdas, -1) * _expand(1.0, self.mus, 1)


@dataclass(frozen=True)
class ExactFactors:
    factorization: Factorization1D
    plus: TrigPoly1
    minus: TrigPoly1
    residual: float


def _expand(scale: complex, params, sign: int) -> TrigPoly1:
    """``scale * prod(1 - r e_sign)`` as a coefficient table."""
    coeffs = np.array([1.0 + 0j])
    for r in params:
        coeffs = np.convolve(coeffs, np.array([1.0, -r]))
    coeffs = scale * coeffs
    if sign > 0:
        return TrigPoly1.from_dense(coeffs, 0)
    return TrigPoly1.from_dense(coeffs[::-1], -(len(coeffs) - 1))


def laurent_to_poly(t: TrigPoly1):
    """Ascending coefficients of ``P(z) = sum_j t_j z^(n_minus + j)`` and the shift ``n_minus``.

    ``P(e_1) = e_{n_minus} t`` and ``P(0) != 0``.
    """
    if t.is_zero():
        raise ValueError("zero polynomial")
    lo = min(t.terms)
    return t.dense(lo, max(t.terms)), -lo


def _polish(desc: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """One Newton step per root, kept only where it reduces |P|."""
    deriv = np.polyder(desc)
    p = np.polyval(desc, roots)
    dp = np.polyval(deriv, roots)
    ok = dp != 0
    cand = roots.copy()
    cand[ok] = roots[ok] - p[ok] / dp[ok]
    better = np.abs(np.polyval(desc, cand)) < np.abs(p)
    return np.where(better, cand, roots)


def _backward_error(desc: np.ndarray, roots: np.ndarray) -> float:
    if roots.size == 0:
        return 0.0
    absdesc = np.abs(desc)
    num = np.abs(np.polyval(desc, roots))
    den = np.polyval(absdesc, np.abs(roots))
    return float((num / den).max())


def find_roots(asc: np.ndarray) -> np.ndarray:
    """Roots of the polynomial with ascending coefficients ``asc``.

    Companion-matrix eigenvalues (``numpy.roots``) followed by one Newton step.
    Roots of modulus > 1 are computed from the reversed polynomial, which keeps
    the relative accuracy of large roots.
    """
    if len(asc) - 1 > MAX_DEGREE:
        raise ValueError(f"degree {len(asc) - 1} exceeds the supported cap {MAX_DEGREE}")
    desc = asc[::-1]
    if len(asc) < 2:
        return np.zeros(0, dtype=np.complex128)
    roots = np.roots(desc).astype(np.complex128)
    roots = _polish(desc, roots)
    # reciprocal polynomial for the outside roots
    inside = np.abs(roots) <= 1
    if (~inside).any():
        rev = np.roots(asc).astype(np.complex128)
        rev = _polish(asc, rev)
        rev = rev[np.abs(rev) < 1]
        if rev.size == (~inside).sum():
            outside = 1.0 / rev
            roots = np.concatenate([roots[inside], outside])
    return roots


def spectral_factor_exact(
    t: TrigPoly1, guard_band: float = GUARD_BAND, certify: bool = True
) -> ExactFactors:
    """Root-splitting factorization ``t = Psi+ t * Psi- t``.

    With ``certify`` the zero-free and winding-zero preconditions are first
    checked on a certified grid; without it, a root inside the guard band or
    a wrong inside-root count is still detected from the roots themselves.
    """
    if certify:
        w = winding_number(t)
        if w.index != 0:
            raise NonzeroWinding(w.index)
    asc, n_minus = laurent_to_poly(t)
    n_plus = len(asc) - 1 - n_minus
    roots = find_roots(asc)
    mod = np.abs(roots)
    near = np.abs(mod - 1) <= guard_band
    if near.any():
        raise RootNearCircle(roots[near][0], guard_band)
    inside = roots[mod < 1]
    outside = roots[mod > 1]
    if len(inside) != n_minus:
        raise NonzeroWinding(len(inside) - n_minus)
    lambdas = tuple(complex(r) for r in sorted(inside, key=lambda z: (abs(z), cmath.phase(z))))
    mus = tuple(complex(1 / r) for r in sorted(outside, key=lambda z: (abs(z), cmath.phase(z))))
    t0 = sum(t.terms.values())
    gamma = cmath.log(t0)
    gamma -= sum(cmath.log(1 - r) for r in lambdas)
    gamma -= sum(cmath.log(1 - r) for r in mus)
    fact = Factorization1D(
        gamma, lambdas, mus, n_minus, n_plus, _backward_error(asc[::-1], roots)
    )
    plus, minus = fact.psi_plus(), fact.psi_minus()
    return ExactFactors(fact, plus, minus, relative_residual(plus, minus, t))


# bound parameters -------------------------------------------------------------
@dataclass(frozen=True)
class BoundParams:
    rho: float
    sigma: float
    tau: float
    min_re: float


def bound_params(t: TrigPoly1, oversample: float = 8) -> BoundParams:
    """``rho = min(1, min Re t / (2 e ||t^||_1))``, ``sigma = rho / n(t)`` and
    ``tau = max(log(||t||_inf + m/2), pi/2 + |log(m/2)|)`` with ``m = min Re t``.

    ``min Re t`` is the lower end of its grid enclosure, so ``rho`` is
    conservative.
    """
    mr = certified_min_real(t, oversample)
    m = mr.lower
    if m <= 0:
        raise NotPositiveReal(f"min Re t enclosure reaches {m:.3e}")
    rho = min(1.0, m / (2 * math.e * t.l1_coeff()))
    sigma = rho / t.n if t.n else math.inf
    sup = sup_norm(t, oversample).upper
    tau = max(math.log(sup + m / 2), math.pi / 2 + abs(math.log(m / 2)))
    return BoundParams(rho, sigma, tau, m)


def _log_poly(t: TrigPoly1, M: int) -> TrigPoly1:
    logs = continuous_log(t, M)
    return interpolate(GridSamples1(logs.values, logs.M))


def truncated_log_max(t: TrigPoly1, N: int, sign: int = 1, M: int | None = None) -> float:
    """``max Re (A_N^sign * L t)``, i.e. half the max of ``D_N*log|t| + sign*iH_N*Im Lt``."""
    M = M or max(1024, 16 * (N + t.n + 1))
    L = _log_poly(t, M)
    proj = convolve(Kernel.analytic_plus(N) if sign > 0 else Kernel.analytic_minus(N), L)
    return float(sample(proj, max(1024, 8 * (N + 1))).values.real.max())


def cor2_bound(t: TrigPoly1, N: int, sign: int = 1) -> float:
    """Bound on ``||Psi^sign t||_inf``:
    ``(1 + log(n_sign + 1)) * exp(max Re(A_N^sign * L t))`` for ``N >= n_sign(t)``."""
    n_side = t.n_plus if sign > 0 else t.n_minus
    if N < n_side:
        raise ValueError("N must be >= n_plus (resp. n_minus)")
    return (1 + math.log(n_side + 1)) * math.exp(truncated_log_max(t, N, sign))


def xi_measured(t: TrigPoly1, N: int) -> float:
    """``max (D_N*log|t| + iH_N*Im Lt) / 2`` on a grid."""
    return truncated_log_max(t, N, 1)


def thm2_xi(t: TrigPoly1, N: int) -> float:
    """Upper bound chain for :func:`xi_measured` when ``Re t > 0``::

        n tau exp(-N rho / n) / rho + q log N + (log ||t||_inf + q) / 2

    with ``q = max |Im log t| < pi/2``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    bp = bound_params(t)
    n = max(t.n, 1)
    vals = sample(t, max(1024, 16 * (t.n + 1))).values
    q = float(np.abs(np.angle(vals)).max())
    sup = sup_norm(t).upper
    return n * bp.tau * math.exp(-N * bp.rho / n) / bp.rho + q * math.log(N) + (math.log(sup) + q) / 2


# worst-case family ----------------------------------------------------------
@dataclass(frozen=True)
class TnFamily:
    n: int
    t: TrigPoly1
    kappa: float
    inside_roots: tuple
    outside_roots: tuple


def tn_family(n: int) -> TnFamily:
    """``t_n = e_{-n} P_n(e_1)`` with ``P_n(z) = (z - 1/n)^(2n) - 1`` (``n`` odd >= 3).

    Returns the closed-form inside roots ``1/n - exp(i pi k/n)``, the outside
    roots ``1/n + exp(i pi k/n)`` (``|k| <= (n-1)/2``) and
    ``kappa = sqrt(1 + 1/n) * prod_{j=1}^{(n-1)/2} |exp(i pi j/n) + 1/n|``.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError("n must be odd and >= 3")
    desc = np.poly1d([1.0, -1.0 / n]) ** (2 * n) - np.poly1d([1.0])
    asc = desc.coeffs[::-1].astype(np.complex128)
    t = TrigPoly1.from_dense(asc, start=-n)
    ell = (n - 1) // 2
    ks = np.arange(-ell, ell + 1)
    inside = tuple(complex(-np.exp(1j * np.pi * k / n) + 1.0 / n) for k in ks)
    outside = tuple(complex(np.exp(1j * np.pi * k / n) + 1.0 / n) for k in ks)
    kappa = math.sqrt(1 + 1 / n) * math.prod(
        abs(np.exp(1j * np.pi * j / n) + 1.0 / n) for j in range(1, ell + 1)
    )
    return TnFamily(n, t, kappa, inside, outside)
