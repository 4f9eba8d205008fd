"""Approximating positive polynomials on strips by squares ``|p|^2``.

Given ``t > 0`` with frequencies in ``F2(alpha, beta) - F2(alpha, beta)``,
the pipeline finds ``p`` with ``freq(p)`` inside ``F2(alpha, beta)`` and
``|p|^2`` close to ``t``:

1. for ``alpha = -c/d`` pick ``g`` in SL(2, Z) with second row ``(c, d)``, so
   ``g`` maps the strip onto the horizontal strip ``|k| < beta |d|``;
2. factor ``g t`` slice by slice in ``y`` and truncate in ``x`` at ``|j| <= N``;
3. shift the factor down by ``k2`` in ``y`` so it sits inside the horizontal
   strip and pull it back with ``g^-1``.

``g`` is induced by an automorphism of the torus, so sup norms are the same
on either side. Irrational slopes are handled through their continued
fraction convergents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from bohrfact.errors import DepthExhausted, FreqViolation, NotNonnegative, PreconditionError
from bohrfact.lattice import (
    Slope,
    Strip,
    UnimodularMatrix,
    _exact,
    cf_convergents,
    f1_contains,
    f2_contains,
    lemfin_max_j,
    lift,
    mat_apply_poly,
    rational_reduce,
    restrict,
    theta,
    transpose_poly,
)
from bohrfact.specfact2d import certify_positive, default_grid, error_2d, s_factor, s_truncate
from bohrfact.trigpoly import TrigPoly1, TrigPoly2, certified_min_real, next_pow2, sq_modulus, sup_norm

DEFAULT_N_SCHEDULE = (0, 1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128)


@dataclass(frozen=True)
class CertificateEntry:
    j: int
    k: int
    distance: float
    margin: float


@dataclass(frozen=True)
class ApproxResult:
    """A strip-supported ``p`` with ``|p|^2`` close to ``t``.

    ``measured_error`` is ``max |t - |p|^2|`` on a square grid and ``error_g``
    the same quantity on the reduced side; the two agree because ``g``
    permutes the grid points.
    """

    p: TrigPoly2
    N: int
    measured_error: float
    degree_j: int
    degree_k: int
    certificate: tuple
    strip: Strip
    g: UnimodularMatrix
    k2: int
    error_g: float
    grid: int
    transposed: bool = False

    def __post_init__(self):
        for e in self.certificate:
            if not e.margin > 0:
                raise FreqViolation(f"certificate entry {(e.j, e.k)} has margin {e.margin}")
        for v in self.p.terms:
            if not f2_contains(self.strip, v):
                raise FreqViolation(f"frequency {v} escapes the strip", [v])

    def to_json_obj(self) -> dict:
        return {
            "strip": self.strip.to_json_obj(),
            "g": self.g.rows(),
            "transposed": self.transposed,
            "k2": self.k2,
            "N": self.N,
            "measured_error": self.measured_error,
            "error_g": self.error_g,
            "grid": self.grid,
            "degree_j": self.degree_j,
            "degree_k": self.degree_k,
            "certificate": [
                {"j": e.j, "k": e.k, "distance": e.distance, "margin": e.margin} for e in self.certificate
            ],
        }


def certify(strip: Strip, p: TrigPoly2) -> tuple:
    """Exact margins ``beta - |k - j alpha|`` for every frequency of ``p``.

    Doubles are expanded to their exact binary value, so a positive margin
    is a proof of membership for the stored ``alpha``.
    """
    a = _exact(strip.alpha.value)
    beta = _exact(strip.beta)
    out = []
    for j, k in sorted(p.terms):
        dist = abs(k - j * a)
        margin = beta - dist
        if margin <= 0:
            raise FreqViolation(f"frequency {(j, k)} is outside the strip", [(j, k)])
        out.append(CertificateEntry(j, k, float(dist), float(margin)))
    return tuple(out)


def build_test_t(qs, floor: float, strip: Strip | None = None) -> TrigPoly2:
    """``floor + sum |q_i|^2``; each ``q_i`` is checked against ``strip`` when given."""
    if not floor > 0:
        raise ValueError("floor must be positive")
    t = TrigPoly2.constant(floor)
    for q in qs:
        if strip is not None:
            certify(strip, q)
        t = t + sq_modulus(q)
    return t


def _y_max_for_strip(beta: float, d: int) -> int:
    """Largest integer ``K`` with ``K < beta |d|``."""
    bound = _exact(beta) * abs(d)
    K = math.ceil(bound) - 1
    return max(K, -1)


class RationalPipeline:
    """The reduction for ``alpha = -c/d``, factored once and truncated at any ``N``.

    Parameters
    ----------
    t : TrigPoly2
        Strictly positive, frequencies in ``F2 - F2`` of the strip.
    c, d : int
        Coprime, ``alpha = -c/d``. ``|c| > |d|`` is handled by transposing.
    beta : float
        Strip half-width.
    N_max : int
        Largest truncation that will be requested; fixes the slice grid.
    """

    def __init__(self, t: TrigPoly2, c: int, d: int, beta: float, N_max: int = 64,
                 method: str = "roots", M: int | None = None, oversample: float = 4):
        if d == 0 or math.gcd(c, d) != 1:
            raise ValueError("(c, d) must be coprime with d != 0")
        if d < 0:
            c, d = -c, -d
        self.strip = Strip(Slope.from_cd(c, d), beta)
        self.transposed = abs(c) > abs(d)
        t_work, c_w, d_w, beta_w = t, c, d, beta
        if self.transposed:
            # slope 1/alpha = -d/c with width beta/|alpha|
            t_work = transpose_poly(t)
            c_w, d_w = (d, c) if c > 0 else (-d, -c)
            beta_w = float(_exact(beta) * abs(d) / abs(c))
        self.t = t
        self.g = rational_reduce(c_w, d_w)
        self.g_inv = self.g.inverse()
        self.gt = mat_apply_poly(self.g, t_work)
        self.K = _y_max_for_strip(beta_w, d_w)
        n2 = self.gt.n2
        if self.K < 0 or n2 > 2 * self.K:
            raise FreqViolation(
                f"y-degree {n2} of the reduced polynomial exceeds 2K = {2 * self.K} "
                f"(K < beta |d| = {beta_w * abs(d_w):g})"
            )
        self.k2 = n2 // 2
        certify_positive(t)
        self.M = M or default_grid(self.gt, N_max)
        self.N_max = min(N_max, self.M // 2 - 1)
        self.sf = s_factor(self.gt, self.M, method=method)
        self.oversample = oversample

    def _error_grid(self, q: TrigPoly2) -> int:
        diff_bw = max(self.gt.n1, self.gt.n2, q.n1, q.n2, 1)
        return min(1 << 11, next_pow2(int(self.oversample * (4 * diff_bw + 1))))

    def result(self, N: int) -> ApproxResult:
        if N > self.N_max:
            raise ValueError(f"N = {N} exceeds the slice grid limit {self.N_max}")
        s_n = s_truncate(self.sf, N)
        q = s_n.shift(0, -self.k2)
        p = mat_apply_poly(self.g_inv, q)
        if self.transposed:
            p = transpose_poly(p)
        grid = self._error_grid(q)
        err_g = error_2d(self.gt, q, grid=grid).value
        err = error_2d(self.t, p, grid=grid).value
        cert = certify(self.strip, p)
        return ApproxResult(
            p, N, err, p.n1, p.n2, cert, self.strip, self.g, self.k2, err_g, grid, self.transposed
        )

    def first_below(self, eps: float, schedule=DEFAULT_N_SCHEDULE):
        """First result in ``schedule`` with error <= eps, else the last one tried."""
        res = None
        for N in schedule:
            if N > self.N_max:
                break
            res = self.result(N)
            if res.measured_error <= eps:
                return res, True
        return res, False


def approx_rational(t: TrigPoly2, c: int, d: int, beta: float, N: int,
                    method: str = "roots", M: int | None = None) -> ApproxResult:
    """``p_N`` with ``freq(p_N)`` in ``F2(-c/d, beta)`` and ``|p_N|^2`` close to ``t``."""
    return RationalPipeline(t, c, d, beta, N_max=N, method=method, M=M).result(N)


# degree growth -------------------------------------------------------------------
@dataclass(frozen=True)
class DegreeReport:
    d: int
    degree: int
    shape: float
    constant: float


def degree_report(res: ApproxResult, d: int, delta: float, eps: float) -> DegreeReport:
    """``n1(p) + n2(p)`` against ``d^2 (d^delta - log eps)``."""
    shape = abs(d) ** 2 * (abs(d) ** delta - math.log(eps))
    deg = res.degree_j + res.degree_k
    return DegreeReport(abs(d), deg, shape, deg / shape)


def fit_exponent(ds, degrees) -> tuple:
    """Least-squares slope and intercept of ``log degree`` against ``log d``."""
    x = np.log(np.asarray(ds, dtype=float))
    y = np.log(np.maximum(np.asarray(degrees, dtype=float), 1.0))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


# irrational slopes ----------------------------------------------------------------
@dataclass(frozen=True)
class ConvergentTrial:
    depth: int
    c: int
    d: int
    quality: float
    J: float
    N: int | None
    error: float | None
    degree_j: int | None
    accepted: bool
    reason: str


@dataclass(frozen=True)
class IrrationalResult:
    result: ApproxResult
    convergent: ConvergentTrial
    trials: tuple


@dataclass(frozen=True)
class Insufficient:
    """No convergent up to ``max_depth`` produced a certified approximation."""

    max_depth: int
    trials: tuple

    def table(self) -> list:
        return [t.__dict__ for t in self.trials]


def _check_difference_strip(t: TrigPoly2, alpha, beta_tilde: float) -> None:
    # necessary condition for freq(t) in F2(alpha, bt) - F2(alpha, bt)
    a = _exact(Slope(alpha).value)
    lim = 2 * _exact(beta_tilde)
    bad = sorted(v for v in t.terms if abs(v[1] - v[0] * a) >= lim)
    if bad:
        raise FreqViolation(f"frequencies {bad[:5]} are outside F2 - F2 of the inner strip", bad)


def approx_irrational(t: TrigPoly2, alpha: float, beta: float, beta_tilde: float, eps: float,
                      max_depth: int = 8, schedule=DEFAULT_N_SCHEDULE, method: str = "roots"):
    """Search the convergents ``-c/d`` of ``alpha`` for a certified approximation.

    For each convergent the rational pipeline runs on the strip
    ``(-c/d, beta_tilde)`` until the error reaches ``eps``. The result is
    accepted when ``n1(p) < J = |d| (beta - beta_tilde) / |c + d alpha|``,
    which places every frequency of ``p`` inside ``F2(alpha, beta)``; the
    membership is then re-proved directly.

    Returns an :class:`IrrationalResult`, or :class:`Insufficient` with the
    per-convergent table when the depth budget runs out.
    """
    if not 0 < beta_tilde < beta:
        raise ValueError("need 0 < beta_tilde < beta")
    certify_positive(t)
    _check_difference_strip(t, alpha, beta_tilde)
    target = Strip(Slope(alpha), beta)
    convs = cf_convergents(alpha, max_depth)
    trials = []
    for cv in convs:
        J = lemfin_max_j(cv.c, cv.d, alpha, beta, beta_tilde)
        row = dict(depth=cv.index, c=cv.c, d=cv.d, quality=cv.quality, J=J,
                   N=None, error=None, degree_j=None)
        try:
            pipe = RationalPipeline(t, cv.c, cv.d, beta_tilde, N_max=max(schedule), method=method)
        except PreconditionError as exc:
            trials.append(ConvergentTrial(**row, accepted=False, reason=f"reduction: {exc}"))
            continue
        res, ok = pipe.first_below(eps, schedule)
        row.update(N=res.N, error=res.measured_error, degree_j=res.degree_j)
        if not ok:
            trials.append(ConvergentTrial(**row, accepted=False, reason="eps not reached"))
            continue
        if not res.degree_j < J:
            trials.append(ConvergentTrial(**row, accepted=False, reason="n1(p) >= J"))
            continue
        cert = certify(target, res.p)
        final = ApproxResult(
            res.p, res.N, res.measured_error, res.degree_j, res.degree_k, cert, target,
            res.g, res.k2, res.error_g, res.grid, res.transposed,
        )
        trial = ConvergentTrial(**row, accepted=True, reason="accepted")
        trials.append(trial)
        return IrrationalResult(final, trial, tuple(trials))
    return Insufficient(max_depth, tuple(trials))


# one-dimensional projection -------------------------------------------------------
@dataclass(frozen=True)
class ProjectionResult:
    p: TrigPoly1
    error: float
    floor: float
    lifted: TrigPoly2
    approx: ApproxResult


def _inner_beta(alpha, beta: float, lifted: TrigPoly2) -> float:
    a = _exact(Slope(alpha).value)
    widest = max((abs(k - j * a) for j, k in lifted.terms), default=Fraction(0))
    half = float(widest) / 2
    return 0.5 * (half + beta) if half < beta else half


def corollary1_project(alpha, beta: float, t1: TrigPoly1, eps: float, delta: float = 1e-6,
                       max_depth: int = 8, schedule=DEFAULT_N_SCHEDULE) -> ProjectionResult:
    """``p`` with ``freq(p)`` in ``F1(alpha, beta)`` and ``||t1 - |p|^2||`` about ``eps``.

    ``t1`` is lifted to the strip, a floor ``delta * ||lift||_inf`` is added
    (so the result approximates ``t1 + floor``; the floor is reported), the
    lifted polynomial is approximated on the strip and ``p(x) = q(x, 0)``.

    Raises
    ------
    FreqViolation
        A frequency of ``t1`` is not in ``F1(alpha, 2 beta)``.
    NotNonnegative
        The lifted polynomial is not certified strictly positive.
    """
    if beta > 0.25:
        raise ValueError("beta must be <= 1/4")
    wide = Strip(alpha, 2 * beta)
    bad = sorted(j for j in t1.terms if not f1_contains(wide, j))
    if bad:
        raise FreqViolation(f"frequencies {bad[:5]} are outside F1(alpha, 2 beta)", bad)
    T = lift(alpha, t1)
    mr = certified_min_real(T)
    if not mr.lower > 0:
        raise NotNonnegative(f"min of the lifted polynomial is {mr.value:.3e} (enclosure {mr.lower:.3e})")
    floor = delta * sup_norm(T).value
    T_f = T + floor
    slope = Slope(alpha)
    if slope.is_rational:
        fr = slope.value
        pipe = RationalPipeline(T_f, -fr.numerator, fr.denominator, beta, N_max=max(schedule))
        res, _ = pipe.first_below(eps, schedule)
    else:
        bt = _inner_beta(alpha, beta, T)
        if not bt < beta:
            raise FreqViolation("lifted frequencies leave no room for an inner strip")
        out = approx_irrational(T_f, float(slope.value), beta, bt, eps, max_depth, schedule)
        if isinstance(out, Insufficient):
            raise DepthExhausted(f"no convergent up to depth {max_depth} gave a certified result")
        res = out.result
    p = restrict(res.p)
    err = sup_norm(t1 - sq_modulus(p)).value
    return ProjectionResult(p, err, floor, T, res)
