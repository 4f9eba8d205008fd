"""Bohr sets, strips in the lattice and the action of SL(2, Z).

For a slope ``alpha`` and width ``beta > 0``::

    F2(alpha, beta) = {(j, k) in Z^2 : |k - j alpha| < beta}
    F1(alpha, beta) = {j in Z : |theta_alpha(j) - j alpha| < beta}

where ``theta_alpha(j)`` is the nearest integer to ``j alpha`` (ties to the
smaller one). Slopes are either exact rationals (:class:`fractions.Fraction`),
for which every membership test is exact, or doubles, for which strict
inequalities are evaluated in floating point with no added slack.

Sign convention for rational directions: a pair ``(c, d)`` describes the
slope ``alpha = -c / d``, i.e. ``c + d alpha = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from bohrfact.errors import DegenerateDirection, DepthExhausted, FreqViolation, NoSolution
from bohrfact.trigpoly import TrigPoly1, TrigPoly2, sq_modulus

Number = Union[Fraction, int, float]


# slopes ----------------------------------------------------------------------
@dataclass(frozen=True)
class Slope:
    """An exact rational or a double. ``Fraction`` keeps itself reduced."""

    value: Union[Fraction, float]

    def __post_init__(self):
        v = self.value
        if isinstance(v, Slope):
            v = v.value
        if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
            v = Fraction(v)
        elif isinstance(v, float):
            if not math.isfinite(v):
                raise ValueError("slope must be finite")
        else:
            raise TypeError(f"unsupported slope type {type(v).__name__}")
        object.__setattr__(self, "value", v)

    @classmethod
    def from_cd(cls, c: int, d: int) -> Slope:
        """The slope ``-c / d``, i.e. ``c + d alpha = 0``."""
        if d == 0:
            raise ValueError("d must be nonzero")
        return cls(Fraction(-c, d))

    @property
    def is_rational(self) -> bool:
        return isinstance(self.value, Fraction)

    def __float__(self):
        return float(self.value)

    def to_json_obj(self) -> dict:
        if self.is_rational:
            return {"rat": [self.value.numerator, self.value.denominator]}
        return {"real": self.value}

    @classmethod
    def from_json_obj(cls, obj: dict) -> Slope:
        if "rat" in obj:
            num, den = obj["rat"]
            return cls(Fraction(int(num), int(den)))
        if "real" in obj:
            return cls(float(obj["real"]))
        raise ValueError("slope object needs 'rat' or 'real'")


def _val(alpha) -> Union[Fraction, float]:
    return alpha.value if isinstance(alpha, Slope) else Slope(alpha).value


def _exact(x) -> Fraction:
    """Exact rational value of an int, Fraction or (binary) double."""
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Strip:
    """The region ``|k - j alpha| < beta``."""

    alpha: Slope
    beta: float

    def __post_init__(self):
        if not isinstance(self.alpha, Slope):
            object.__setattr__(self, "alpha", Slope(self.alpha))
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    def to_json_obj(self) -> dict:
        return {"alpha": self.alpha.to_json_obj(), "beta": float(self.beta)}

    @classmethod
    def from_json_obj(cls, obj: dict) -> Strip:
        return cls(Slope.from_json_obj(obj["alpha"]), float(obj["beta"]))


# theta and Bohr sets -----------------------------------------------------------
def theta(alpha, j: int) -> int:
    """Smallest integer ``k`` minimizing ``|k - j alpha|``.

    ``k = ceil(j alpha - 1/2)`` picks the smaller integer at exact ties.
    """
    a = _val(alpha)
    if isinstance(a, Fraction):
        return math.ceil(j * a - Fraction(1, 2))
    return math.ceil(j * a - 0.5)


def _distance(alpha, j: int, k: int):
    a = _val(alpha)
    return abs(k - j * a)


def _lt_beta(dist, beta) -> bool:
    if isinstance(dist, Fraction):
        return dist < _exact(beta)
    return dist < beta


def f2_contains(strip: Strip, point) -> bool:
    j, k = point
    return _lt_beta(_distance(strip.alpha, j, k), strip.beta)


def f1_contains(strip: Strip, j: int) -> bool:
    return f2_contains(strip, (j, theta(strip.alpha, j)))


def f2_enumerate(strip: Strip, j_range: Iterable[int]) -> list:
    """All ``(j, k)`` in the strip with ``j`` in ``j_range``, sorted by ``(j, k)``."""
    a = _val(strip.alpha)
    out = []
    for j in j_range:
        centre = j * a
        lo = math.floor(centre - strip.beta)
        hi = math.ceil(centre + strip.beta)
        out.extend((j, k) for k in range(lo, hi + 1) if f2_contains(strip, (j, k)))
    return sorted(out)


def f1_enumerate(strip: Strip, j_range: Iterable[int]) -> list:
    return [j for j in j_range if f1_contains(strip, j)]


# lift and restriction ------------------------------------------------------------
def lift(alpha, t: TrigPoly1) -> TrigPoly2:
    """``sum t_j e_j(x) e_{theta(j)}(y)``.

    ``Phi_alpha`` in the literature on these Bohr sets denotes the same map.
    """
    return TrigPoly2({(j, theta(alpha, j)): c for j, c in t.terms.items()})


def restrict(t2: TrigPoly2) -> TrigPoly1:
    """``t2(x, 0)``: sum the coefficients over ``k`` for each ``j``."""
    out = {}
    for (j, _), c in t2.terms.items():
        out[j] = out.get(j, 0) + c
    return TrigPoly1(out)


def check_freq_f1(alpha, beta: float, p: TrigPoly1) -> None:
    strip = Strip(alpha, beta)
    bad = sorted(j for j in p.terms if not f1_contains(strip, j))
    if bad:
        raise FreqViolation(f"frequencies {bad[:5]} are outside F1(alpha, {beta:g})", bad)


def check_freq_f2(strip: Strip, t: TrigPoly2) -> None:
    bad = sorted(v for v in t.terms if not f2_contains(strip, v))
    if bad:
        raise FreqViolation(f"frequencies {bad[:5]} are outside the strip", bad)


def lemma4_square_check(alpha, beta: float, p: TrigPoly1, atol: float = 0.0) -> bool:
    """``lift(|p|^2) == |lift(p)|^2`` for ``freq(p)`` inside ``F1(alpha, beta)``, ``beta <= 1/4``.

    Frequency sets are compared exactly and coefficients to ``atol``
    relative to ``l1_coeff``.
    """
    if beta > 0.25:
        raise ValueError("beta must be <= 1/4")
    check_freq_f1(alpha, beta, p)
    lhs = lift(alpha, sq_modulus(p))
    rhs = sq_modulus(lift(alpha, p))
    if lhs.freq != rhs.freq:
        return False
    scale = max(lhs.l1_coeff(), 1.0)
    return lhs.max_coeff_diff(rhs) <= atol * scale


# SL(2, Z) ---------------------------------------------------------------------
@dataclass(frozen=True)
class UnimodularMatrix:
    """``[[a, b], [c, d]]`` with ``ad - bc = 1``, acting by ``(j, k) -> (aj + bk, cj + dk)``."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.rows()} is not 1")

    @classmethod
    def identity(cls) -> UnimodularMatrix:
        return cls(1, 0, 0, 1)

    def rows(self) -> list:
        return [[self.a, self.b], [self.c, self.d]]

    def __matmul__(self, other: UnimodularMatrix) -> UnimodularMatrix:
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def apply(self, point) -> tuple:
        j, k = point
        return (self.a * j + self.b * k, self.c * j + self.d * k)

    def inverse(self) -> UnimodularMatrix:
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)


def mat_apply_lattice(g: UnimodularMatrix, point) -> tuple:
    return g.apply(point)


def mat_apply_poly(g: UnimodularMatrix, t: TrigPoly2) -> TrigPoly2:
    """Relabel frequencies, ``g e_(j,k) = e_g(j,k)``; as a function
    ``(g t)(x, y) = t(a x + c y, b x + d y)``."""
    return TrigPoly2({g.apply(v): c for v, c in t.terms.items()})


def mat_inverse(g: UnimodularMatrix) -> UnimodularMatrix:
    return g.inverse()


def strip_transform(g: UnimodularMatrix, strip: Strip) -> Strip:
    """The strip ``g F2(alpha, beta) = F2((c + d alpha)/(a + b alpha), beta / |a + b alpha|)``."""
    a = _val(strip.alpha)
    den = g.a + g.b * a
    if den == 0:
        raise DegenerateDirection(f"a + b alpha = 0 for g = {g.rows()}")
    alpha2 = (g.c + g.d * a) / den
    beta2 = strip.beta / abs(float(den))
    return Strip(Slope(alpha2), beta2)


def rational_reduce(c: int, d: int) -> UnimodularMatrix:
    """``g`` in SL(2, Z) with second row ``(c, d)``, so that ``g`` maps the strip of
    slope ``-c/d`` to a horizontal one.

    The first row satisfies ``|a| <= |b| <= max(1, |d|/2)``; for ``c = 0`` the
    diagonal matrix ``diag(d, d)`` (``d = +-1``) is returned instead.
    """
    c, d = int(c), int(d)
    if d == 0 or math.gcd(c, d) != 1:
        raise NoSolution(f"(c, d) = ({c}, {d}) must be coprime with d != 0")
    if abs(c) > abs(d):
        raise NoSolution(f"|c| > |d| for (c, d) = ({c}, {d}); transpose the strip first")
    if c == 0:
        return UnimodularMatrix(d, 0, 0, d)
    bmax = max(1, abs(d) // 2)
    for size in range(bmax + 1):
        for b in (size, -size) if size else (0,):
            num = 1 + b * c
            if num % d:
                continue
            a = num // d
            if abs(a) <= abs(b) and 2 * abs(b) <= max(2, abs(d)):
                return UnimodularMatrix(a, b, c, d)
    raise NoSolution(f"no reduction found for (c, d) = ({c}, {d})")


# transpose normalization ----------------------------------------------------------
def transpose_strip(strip: Strip) -> Strip:
    """The reflected strip ``{(k, j) : (j, k) in F2(alpha, beta)} = F2(1/alpha, beta/|alpha|)``."""
    a = _val(strip.alpha)
    if a == 0:
        raise DegenerateDirection("alpha = 0 has no transpose strip")
    return Strip(Slope(1 / a), strip.beta / abs(float(a)))


def transpose_poly(t: TrigPoly2) -> TrigPoly2:
    return TrigPoly2({(k, j): c for (j, k), c in t.terms.items()})


def normalize_strip(strip: Strip) -> tuple:
    """``(strip', transposed)`` with ``|alpha'| <= 1``."""
    if abs(_val(strip.alpha)) > 1:
        return transpose_strip(strip), True
    return strip, False


# continued fractions --------------------------------------------------------------
@dataclass(frozen=True)
class Convergent:
    """``p / q`` approximating ``alpha``, stored in the ``(c, d) = (-p, q)`` convention."""

    index: int
    partial_quotient: int
    c: int
    d: int
    quality: float

    @property
    def fraction(self) -> Fraction:
        return Fraction(-self.c, self.d)


@dataclass(frozen=True)
class ConvergentList:
    alpha: Union[Fraction, float]
    convergents: tuple
    terminated: bool
    precision_limited: bool

    def __len__(self):
        return len(self.convergents)

    def __getitem__(self, i) -> Convergent:
        return self.convergents[i]

    @property
    def partial_quotients(self) -> list:
        return [cv.partial_quotient for cv in self.convergents]

    @property
    def pairs(self) -> list:
        return [(cv.c, cv.d) for cv in self.convergents]


def cf_convergents(alpha, depth: int, strict: bool = False) -> ConvergentList:
    """Continued-fraction convergents ``0..depth`` of ``alpha``.

    The expansion is exact: a double is expanded as the binary rational it
    stores. A rational slope terminates at its own value (``terminated``).
    For a double, the expansion stops once a convergent is within a few ulps
    of ``alpha``, since later terms only describe rounding error
    (``precision_limited``). With ``strict``, stopping before ``depth``
    convergents are produced raises :class:`DepthExhausted`.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    a = _val(alpha)
    x = _exact(a)
    floor_limit = 0.0 if isinstance(a, Fraction) else 8 * math.ulp(float(a))
    p_prev, q_prev, p, q = 0, 1, 1, 0
    rem = x
    out = []
    terminated = limited = False
    for i in range(depth + 1):
        ai = math.floor(rem)
        p_prev, p = p, ai * p + p_prev
        q_prev, q = q, ai * q + q_prev
        err = abs(x - Fraction(p, q))
        out.append(Convergent(i, ai, -p, q, float(err)))
        frac = rem - ai
        if frac == 0:
            terminated = isinstance(a, Fraction)
            limited = not terminated
            break
        if float(err) <= floor_limit:
            limited = True
            break
        rem = 1 / frac
    if strict and len(out) < depth + 1:
        raise DepthExhausted(f"expansion stopped after {len(out)} convergents (requested {depth + 1})")
    return ConvergentList(a, tuple(out), terminated, limited)


def liouville_alpha(levels: int) -> float:
    """``sum_{k=1}^{levels} 10^(-k!)`` as a double; levels beyond 3 underflow the mantissa."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    total = sum(Fraction(1, 10 ** math.factorial(k)) for k in range(1, levels + 1))
    return float(total)


def lemfin_max_j(c: int, d: int, alpha, beta: float, beta_tilde: float) -> float:
    """``J = |d| (beta - beta_tilde) / |c + d alpha|``.

    Every ``(j, k)`` in ``F2(-c/d, beta_tilde)`` with ``|j| < J`` lies in
    ``F2(alpha, beta)``. Computed in exact arithmetic from the stored value of
    ``alpha`` and rounded down.
    """
    if not 0 < beta_tilde <= beta:
        raise ValueError("need 0 < beta_tilde <= beta")
    x = _exact(_val(alpha))
    gap = abs(c + d * x)
    if gap == 0:
        return math.inf
    J = abs(d) * (_exact(beta) - _exact(beta_tilde)) / gap
    v = float(J)
    return math.nextafter(v, 0.0) if Fraction(v) > J else v
