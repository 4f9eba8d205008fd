"""Sparse trigonometric polynomials in one and two variables.

A :class:`TrigPoly1` is a finite table ``{j: c_j}`` representing
``t(x) = sum_j c_j exp(2 pi i j x)`` on the circle ``T = R/Z``; a
:class:`TrigPoly2` is the same over lattice points ``(j, k)`` with
``t(x, y) = sum c_jk exp(2 pi i (j x + k y))``.

Values are immutable. Coefficients whose modulus is below
``tol * l1_coeff`` are pruned on construction, so the stored keys are
exactly the frequency set.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from bohrfact import _backend

ZERO_TOL = 1e-13

# grid size caps for norm estimates; beyond these the enclosure just widens
MAX_GRID_1D = 1 << 20
MAX_GRID_2D = 1 << 11


class AliasingWarning(UserWarning):
    pass


def next_pow2(n: int) -> int:
    return 1 << max(0, math.ceil(math.log2(max(1, n))))


def _prune(terms: dict, tol: float) -> dict:
    l1 = sum(abs(c) for c in terms.values())
    cut = tol * l1
    return {key: c for key, c in terms.items() if c != 0 and abs(c) >= cut}


class _TrigPoly:
    __slots__ = ("_terms",)
    dim = 0

    def __init__(self, terms: Mapping | None = None, tol: float | None = None):
        raw = {}
        for key, c in (terms or {}).items():
            key = self._norm_key(key)
            raw[key] = raw.get(key, 0) + complex(c)
        self._terms = _prune(raw, ZERO_TOL if tol is None else tol)

    @staticmethod
    def _norm_key(key):
        raise NotImplementedError

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    @property
    def freq(self) -> frozenset:
        return frozenset(self._terms)

    def coeff(self, key) -> complex:
        return self._terms.get(self._norm_key(key), 0j)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def l1_coeff(self) -> float:
        return float(sum(abs(c) for c in self._terms.values()))

    def _arrays(self):
        raise NotImplementedError

    @classmethod
    def _from_arrays(cls, j, k, c, tol=None):
        raise NotImplementedError

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = type(self).constant(other)
        if type(other) is not type(self):
            return NotImplemented
        out = dict(self._terms)
        for key, c in other._terms.items():
            out[key] = out.get(key, 0) + c
        return type(self)(out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)({key: -c for key, c in self._terms.items()}, tol=0.0)

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = type(self).constant(other)
        if type(other) is not type(self):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return type(self)({key: c * other for key, c in self._terms.items()})
        if type(other) is not type(self):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return type(self)()
        j, k, c = _backend.cauchy_product(*self._arrays(), *other._arrays())
        return type(self)._from_arrays(j, k, c)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash((type(self).__name__, frozenset(self._terms.items())))

    def allclose(self, other, atol: float = 1e-12) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.coeff(key) - other.coeff(key)) <= atol for key in keys)

    def max_coeff_diff(self, other) -> float:
        keys = set(self._terms) | set(other._terms)
        return max((abs(self.coeff(key) - other.coeff(key)) for key in keys), default=0.0)

    def conj(self):
        raise NotImplementedError

    def gradient_bound(self) -> float:
        raise NotImplementedError


class TrigPoly1(_TrigPoly):
    """Trigonometric polynomial on T with integer frequencies."""

    __slots__ = ()
    dim = 1

    @staticmethod
    def _norm_key(key):
        if isinstance(key, tuple):
            raise TypeError("TrigPoly1 keys are integers")
        return int(key)

    @classmethod
    def constant(cls, c) -> TrigPoly1:
        return cls({0: c})

    @classmethod
    def monomial(cls, j: int, c=1.0) -> TrigPoly1:
        return cls({j: c})

    @classmethod
    def from_dense(cls, coeffs, start: int = 0, tol: float | None = None) -> TrigPoly1:
        """Coefficients ``coeffs[i]`` at frequency ``start + i``."""
        return cls({start + i: c for i, c in enumerate(coeffs)}, tol=tol)

    def _arrays(self):
        keys = np.fromiter(self._terms.keys(), dtype=np.int64, count=len(self._terms))
        vals = np.fromiter(self._terms.values(), dtype=np.complex128, count=len(self._terms))
        return keys, np.zeros_like(keys), vals

    @classmethod
    def _from_arrays(cls, j, k, c, tol=None):
        return cls(dict(zip(j.tolist(), c.tolist())), tol=tol)

    @property
    def n_minus(self) -> int:
        """``-min freq``; the number of factors in ``e_{-1}``."""
        return -min(self._terms) if self._terms else 0

    @property
    def n_plus(self) -> int:
        return max(self._terms) if self._terms else 0

    @property
    def n(self) -> int:
        return max((abs(j) for j in self._terms), default=0)

    def dense(self, lo: int | None = None, hi: int | None = None) -> np.ndarray:
        """Coefficient vector for frequencies ``lo..hi`` (defaults: min..max freq)."""
        if lo is None:
            lo = min(self._terms, default=0)
        if hi is None:
            hi = max(self._terms, default=0)
        out = np.zeros(hi - lo + 1, dtype=np.complex128)
        for j, c in self._terms.items():
            if lo <= j <= hi:
                out[j - lo] = c
        return out

    def conj(self) -> TrigPoly1:
        return TrigPoly1({-j: c.conjugate() for j, c in self._terms.items()}, tol=0.0)

    def shift(self, m: int) -> TrigPoly1:
        """Multiply by the character ``e_m``."""
        return TrigPoly1({j + m: c for j, c in self._terms.items()}, tol=0.0)

    def dilate(self, m: int) -> TrigPoly1:
        """``t(m x)``."""
        return TrigPoly1({j * m: c for j, c in self._terms.items()}, tol=0.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=np.complex128)
        for j, c in self._terms.items():
            out += c * np.exp(2j * np.pi * j * x)
        return out if out.ndim else complex(out)

    def gradient_bound(self) -> float:
        """``2 pi sum |j| |c_j|``, a Lipschitz constant of ``t`` on T."""
        return 2 * math.pi * sum(abs(j) * abs(c) for j, c in self._terms.items())

    def __repr__(self):
        body = " + ".join(f"({c:.6g})e[{j}]" for j, c in sorted(self._terms.items()))
        return f"TrigPoly1({body or '0'})"


class TrigPoly2(_TrigPoly):
    """Trigonometric polynomial on T^2 with lattice frequencies ``(j, k)``."""

    __slots__ = ()
    dim = 2

    @staticmethod
    def _norm_key(key):
        j, k = key
        return (int(j), int(k))

    @classmethod
    def constant(cls, c) -> TrigPoly2:
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, j: int, k: int, c=1.0) -> TrigPoly2:
        return cls({(j, k): c})

    def _arrays(self):
        n = len(self._terms)
        keys = np.array(list(self._terms.keys()), dtype=np.int64).reshape(n, 2)
        vals = np.fromiter(self._terms.values(), dtype=np.complex128, count=n)
        return keys[:, 0].copy(), keys[:, 1].copy(), vals

    @classmethod
    def _from_arrays(cls, j, k, c, tol=None):
        return cls(dict(zip(zip(j.tolist(), k.tolist()), c.tolist())), tol=tol)

    @property
    def n1(self) -> int:
        return max((abs(j) for j, _ in self._terms), default=0)

    @property
    def n2(self) -> int:
        return max((abs(k) for _, k in self._terms), default=0)

    def conj(self) -> TrigPoly2:
        return TrigPoly2({(-j, -k): c.conjugate() for (j, k), c in self._terms.items()}, tol=0.0)

    def shift(self, dj: int, dk: int) -> TrigPoly2:
        return TrigPoly2({(j + dj, k + dk): c for (j, k), c in self._terms.items()}, tol=0.0)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        out = np.zeros(x.shape, dtype=np.complex128)
        for (j, k), c in self._terms.items():
            out += c * np.exp(2j * np.pi * (j * x + k * y))
        return out if out.ndim else complex(out)

    def gradient_bound(self) -> float:
        return 2 * math.pi * sum((abs(j) + abs(k)) * abs(c) for (j, k), c in self._terms.items())

    def _axis_gradient_bounds(self):
        gj = 2 * math.pi * sum(abs(j) * abs(c) for (j, _), c in self._terms.items())
        gk = 2 * math.pi * sum(abs(k) * abs(c) for (_, k), c in self._terms.items())
        return gj, gk

    def __repr__(self):
        body = " + ".join(f"({c:.6g})e[{j},{k}]" for (j, k), c in sorted(self._terms.items()))
        return f"TrigPoly2({body or '0'})"


TrigPoly = TrigPoly1 | TrigPoly2


# functional API ---------------------------------------------------------------
def add(a, b):
    return a + b


def mul(a, b):
    return a * b


def conj(a):
    return a.conj()


def scale(a, c: complex):
    return a * c


def sq_modulus(p):
    """``|p|^2 = p * conj(p)``, made exactly Hermitian."""
    t = p * p.conj()
    cls = type(t)
    out = {}
    for key, c in t.terms.items():
        neg = (-key) if cls is TrigPoly1 else (-key[0], -key[1])
        partner = t.coeff(neg).conjugate()
        out[key] = 0.5 * (c + partner)
    return cls(out)


def l1_coeff(t) -> float:
    return t.l1_coeff()


# grids ------------------------------------------------------------------------
@dataclass(frozen=True)
class GridSamples1:
    """Samples ``values[m] = t(m / M)``."""

    values: np.ndarray
    M: int


@dataclass(frozen=True)
class GridSamples2:
    """Samples ``values[m1, m2] = t(m1 / M1, m2 / M2)``."""

    values: np.ndarray
    M1: int
    M2: int


def sample(t, M, M2: int | None = None):
    """Exact samples of ``t`` on a uniform grid, by an inverse FFT.

    Frequencies are folded modulo the grid size, which is exact at the grid
    points regardless of bandwidth.
    """
    if isinstance(t, TrigPoly1):
        buf = np.zeros(M, dtype=np.complex128)
        if len(t):
            j, _, c = t._arrays()
            np.add.at(buf, np.mod(j, M), c)
        return GridSamples1(np.fft.ifft(buf) * M, M)
    M1 = M
    M2 = M if M2 is None else M2
    buf = np.zeros((M1, M2), dtype=np.complex128)
    if len(t):
        j, k, c = t._arrays()
        np.add.at(buf, (np.mod(j, M1), np.mod(k, M2)), c)
    return GridSamples2(np.fft.ifft2(buf) * (M1 * M2), M1, M2)


def _window(M: int, bandwidth: int | None, axis_name: str = "") -> np.ndarray:
    limit = (M - 1) // 2
    if bandwidth is None:
        bandwidth = limit
    if bandwidth > (M - 1) / 2:
        warnings.warn(
            f"declared bandwidth {bandwidth}{axis_name} exceeds (M-1)/2 = {(M - 1) / 2} "
            f"for grid size {M}; coefficients alias",
            AliasingWarning,
            stacklevel=3,
        )
    freqs = np.fft.fftfreq(M, d=1.0 / M).astype(np.int64)
    return freqs, bandwidth


def interpolate(samples, bandwidth=None, tol: float | None = None):
    """Inverse of :func:`sample` on band-limited inputs.

    Frequencies are assigned in the symmetric window ``|j| <= bandwidth``
    (default ``(M - 1) // 2``). For 2D samples ``bandwidth`` may be a pair.
    """
    if isinstance(samples, GridSamples1):
        coeffs = np.fft.fft(samples.values) / samples.M
        freqs, bw = _window(samples.M, bandwidth)
        keep = np.abs(freqs) <= bw
        if bw > (samples.M - 1) / 2:
            keep[:] = True
        return TrigPoly1(dict(zip(freqs[keep].tolist(), coeffs[keep].tolist())), tol=tol)
    if bandwidth is None or isinstance(bandwidth, int):
        bandwidth = (bandwidth, bandwidth)
    coeffs = np.fft.fft2(samples.values) / (samples.M1 * samples.M2)
    fj, bj = _window(samples.M1, bandwidth[0], " (axis 0)")
    fk, bk = _window(samples.M2, bandwidth[1], " (axis 1)")
    kj = np.abs(fj) <= bj
    kk = np.abs(fk) <= bk
    sub = coeffs[np.ix_(kj, kk)]
    jj, kk_ = np.meshgrid(fj[kj], fk[kk], indexing="ij")
    keys = zip(jj.ravel().tolist(), kk_.ravel().tolist())
    return TrigPoly2(dict(zip(keys, sub.ravel().tolist())), tol=tol)


# norms --------------------------------------------------------------------------
@dataclass(frozen=True)
class NormEstimate:
    """Grid estimate of an extremum with a rigorous enclosure ``[lower, upper]``."""

    value: float
    lower: float
    upper: float
    grid: tuple
    argmax: tuple = ()

    def __float__(self):
        return float(self.value)


def _grid_sizes(t, oversample: float):
    if oversample < 2:
        raise ValueError("oversample must be >= 2")
    if isinstance(t, TrigPoly1):
        return (min(MAX_GRID_1D, next_pow2(int(oversample * (2 * t.n + 1)))),)
    return (
        min(MAX_GRID_2D, next_pow2(int(oversample * (2 * t.n1 + 1)))),
        min(MAX_GRID_2D, next_pow2(int(oversample * (2 * t.n2 + 1)))),
    )


def _samples_and_slack(t, oversample):
    sizes = _grid_sizes(t, oversample)
    if isinstance(t, TrigPoly1):
        vals = sample(t, sizes[0]).values
        slack = t.gradient_bound() / (2 * sizes[0])
    else:
        vals = sample(t, *sizes).values
        gj, gk = t._axis_gradient_bounds()
        slack = gj / (2 * sizes[0]) + gk / (2 * sizes[1])
    return vals, slack, sizes


def _point(idx, sizes):
    return tuple(float(i) / m for i, m in zip(idx, sizes))


def sup_norm(t, oversample: float = 4) -> NormEstimate:
    """``max |t|`` on an oversampled grid; the true max is within ``[value, upper]``."""
    if t.is_zero():
        return NormEstimate(0.0, 0.0, 0.0, _grid_sizes(t, oversample))
    vals, slack, sizes = _samples_and_slack(t, oversample)
    mod = np.abs(vals)
    idx = np.unravel_index(np.argmax(mod), mod.shape)
    v = float(mod[idx])
    return NormEstimate(v, v, v + slack, sizes, _point(idx, sizes))


def min_real(t, oversample: float = 4) -> NormEstimate:
    """``min Re t``; the true min is within ``[lower, value]``."""
    vals, slack, sizes = _samples_and_slack(t, oversample)
    re = vals.real
    idx = np.unravel_index(np.argmin(re), re.shape)
    v = float(re[idx])
    return NormEstimate(v, v - slack, v, sizes, _point(idx, sizes))


def certified_min_real(t, oversample: float = 4) -> NormEstimate:
    """:func:`min_real` with the grid refined until the lower enclosure is
    positive or the grid cap is reached."""
    while True:
        est = min_real(t, oversample)
        capped = all(m >= cap for m, cap in zip(est.grid, _caps(t)))
        if est.lower > 0 or est.value <= 0 or capped:
            return est
        oversample *= 2


def _caps(t):
    return (MAX_GRID_1D,) if isinstance(t, TrigPoly1) else (MAX_GRID_2D, MAX_GRID_2D)


def min_modulus(t, oversample: float = 4) -> NormEstimate:
    vals, slack, sizes = _samples_and_slack(t, oversample)
    mod = np.abs(vals)
    idx = np.unravel_index(np.argmin(mod), mod.shape)
    v = float(mod[idx])
    return NormEstimate(v, max(0.0, v - slack), v, sizes, _point(idx, sizes))


# JSON ---------------------------------------------------------------------------------
def to_json_obj(t) -> dict:
    terms = []
    for key in sorted(t.terms):
        c = t.terms[key]
        if t.dim == 1:
            terms.append({"j": key, "re": c.real, "im": c.imag})
        else:
            terms.append({"j": key[0], "k": key[1], "re": c.real, "im": c.imag})
    return {"dim": t.dim, "terms": terms}


def from_json_obj(obj: dict):
    dim = obj.get("dim")
    if dim not in (1, 2):
        raise ValueError(f"polynomial JSON needs dim 1 or 2, got {dim!r}")
    terms = {}
    for entry in obj.get("terms", []):
        c = complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
        key = int(entry["j"]) if dim == 1 else (int(entry["j"]), int(entry["k"]))
        terms[key] = terms.get(key, 0) + c
    cls = TrigPoly1 if dim == 1 else TrigPoly2
    return cls(terms)
