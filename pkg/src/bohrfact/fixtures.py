"""Seeded random polynomial fixtures."""
from __future__ import annotations

import numpy as np

from bohrfact.trigpoly import TrigPoly1, TrigPoly2, sample, sq_modulus


def _crandn(rng, size):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def _floor_for_ratio(values: np.ndarray, ratio: float) -> float:
    lo, hi = float(values.min()), float(values.max())
    # smallest d >= 0 with lo + d >= ratio * (hi + d)
    return max(0.0, (ratio * hi - lo) / (1 - ratio))


def random_positive_1d(rng: np.random.Generator, n: int, ratio: float = 0.1, margin: float = 1.05) -> TrigPoly1:
    """``|q|^2 + d`` with ``deg q = n`` and ``d`` chosen so that ``min t >= ratio * max t``."""
    q = TrigPoly1.from_dense(_crandn(rng, n + 1))
    t = sq_modulus(q)
    vals = sample(t, 64 * (n + 1)).values.real
    d = _floor_for_ratio(vals, ratio) * margin + 1e-3 * vals.max()
    return t + d


def random_positive_2d(
    rng: np.random.Generator, n1: int, n2: int, ratio: float = 0.1, margin: float = 1.05
) -> TrigPoly2:
    """``|q|^2 + d`` with ``q`` supported on the box ``[0, n1] x [0, n2]``,
    so ``n1(t) = n1``, ``n2(t) = n2`` and ``min t >= ratio * max t``."""
    terms = {}
    for j in range(n1 + 1):
        for k in range(n2 + 1):
            terms[(j, k)] = complex(*rng.standard_normal(2))
    q = TrigPoly2(terms)
    t = sq_modulus(q)
    vals = sample(t, 64, 64).values.real
    d = _floor_for_ratio(vals, ratio) * margin + 1e-3 * vals.max()
    return t + d


def random_support_poly1(rng: np.random.Generator, freqs, scale: float = 1.0) -> TrigPoly1:
    freqs = list(freqs)
    return TrigPoly1(dict(zip(freqs, scale * _crandn(rng, len(freqs)))))


def random_support_poly2(rng: np.random.Generator, freqs, scale: float = 1.0) -> TrigPoly2:
    freqs = list(freqs)
    return TrigPoly2(dict(zip(freqs, scale * _crandn(rng, len(freqs)))))
