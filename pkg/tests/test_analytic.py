import math

import numpy as np
import pytest

from bohrfact.analytic import continuous_log, imag_log_sup, psi_fft, relative_residual, winding_number
from bohrfact.errors import NonzeroWinding, TailMassExceeded, ZeroOnCircle
from bohrfact.fixtures import random_positive_1d
from bohrfact.roots1d import spectral_factor_exact
from bohrfact.trigpoly import TrigPoly1, sample, sq_modulus

E = TrigPoly1.monomial


def test_winding_examples(five_four_cos):
    assert winding_number(E(2) * (2 + E(1))).index == 2
    assert winding_number(five_four_cos).index == 0
    assert winding_number(E(-3)).index == -3


def test_winding_certificate():
    w = winding_number(E(5) * (3 + E(-2)))
    assert w.index == 5
    assert w.max_step_arg < math.pi / 2


def test_zero_on_circle():
    with pytest.raises(ZeroOnCircle):
        winding_number(1 + E(1))


@pytest.mark.parametrize("seed", range(10))
def test_winding_additive(seed):
    rng = np.random.default_rng(seed)
    k1, k2 = rng.integers(-4, 5, 2)
    f = E(int(k1)) * random_positive_1d(rng, 3)
    g = E(int(k2)) * random_positive_1d(rng, 5)
    assert winding_number(f * g).index == winding_number(f).index + winding_number(g).index == k1 + k2


def test_log_of_constant():
    logs = continuous_log(TrigPoly1.constant(math.e))
    assert np.allclose(logs.values, 1)


def test_log_matches_principal_for_positive(five_four_cos):
    logs = continuous_log(five_four_cos, 64)
    x = np.arange(logs.M) / logs.M
    assert np.allclose(logs.values, np.log(5 + 4 * np.cos(2 * np.pi * x)), atol=1e-13)


def test_log_exp_roundtrip_and_additivity(rng):
    f = random_positive_1d(rng, 4) * (3 + E(1))
    g = 2 + 1j * E(-2)
    M = 256
    lf, lg, lfg = continuous_log(f, M), continuous_log(g, M), continuous_log(f * g, M)
    assert np.allclose(np.exp(lf.values), sample(f, M).values)
    assert np.allclose(lfg.values, lf.values + lg.values, atol=1e-12)
    assert np.abs(np.diff(lfg.values.imag)).max() < math.pi / 2


def test_log_needs_zero_winding():
    with pytest.raises(NonzeroWinding) as exc:
        continuous_log(E(1))
    assert exc.value.index == 1


def test_psi_fft_examples(five_four_cos):
    res = psi_fft(TrigPoly1.constant(4))
    assert res.plus.allclose(TrigPoly1.constant(2)) and res.minus.allclose(TrigPoly1.constant(2))
    res = psi_fft(five_four_cos)
    assert res.plus.max_coeff_diff(2 + E(1)) < 1e-12
    assert res.minus.max_coeff_diff(2 + E(-1)) < 1e-12


def test_psi_fft_outer_factor():
    q = TrigPoly1({0: 3, 1: 1, 2: 2})
    res = psi_fft(sq_modulus(q))
    # q has no zeros in the closed disk, so it is the outer factor up to a unimodular constant
    ratio = res.plus.coeff(0) / q.coeff(0)
    assert abs(abs(ratio) - 1) < 1e-10
    assert res.plus.max_coeff_diff(ratio * q) < 1e-10
    assert res.plus.max_coeff_diff(spectral_factor_exact(sq_modulus(q)).plus) < 1e-10


def test_psi_fft_grid_check(five_four_cos):
    with pytest.raises(ValueError):
        psi_fft(five_four_cos, grid_M=4)


def test_psi_fft_tail_exceeded():
    # a narrow output window cannot hold the degree-3 factor
    t = sq_modulus(TrigPoly1({0: 3, 1: 1, 3: 1}))
    with pytest.raises(TailMassExceeded):
        psi_fft(t, out_bandwidth=1)


@pytest.mark.parametrize("seed", range(20))
def test_splitting_and_symmetry(seed):
    rng = np.random.default_rng(seed)
    t = random_positive_1d(rng, int(rng.integers(1, 17)))
    res = psi_fft(t)
    assert relative_residual(res.plus, res.minus, t) <= 1e-8
    assert res.minus.max_coeff_diff(res.plus.conj()) <= 1e-9
    ex = spectral_factor_exact(t)
    assert res.plus.max_coeff_diff(ex.plus) <= 1e-7


def test_complex_winding_zero_input():
    # complex-valued t: both methods split exp(gamma) evenly, so they agree exactly
    t = (3 + E(1)) * (2 + 0.5j * E(-1))
    a, b = psi_fft(t), spectral_factor_exact(t)
    assert a.plus.max_coeff_diff(b.plus) < 1e-10
    assert a.minus.max_coeff_diff(b.minus) < 1e-10


def test_imag_log_sup_positive(five_four_cos):
    assert imag_log_sup(five_four_cos) < 1e-12
