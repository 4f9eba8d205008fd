import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bohrfact import trigpoly as tp
from bohrfact.trigpoly import TrigPoly1, TrigPoly2

E = TrigPoly1.monomial


def test_mul_cancels_frequencies():
    assert E(1) * E(-1) == TrigPoly1.constant(1)


def test_conj_involution():
    t = TrigPoly1({0: 2, 1: 1j})
    assert tp.conj(t) == TrigPoly1({0: 2, -1: -1j})
    assert tp.conj(tp.conj(t)) == t


def test_mul_by_hand():
    assert tp.mul(1 + E(1), 1 + E(-1)) == TrigPoly1({0: 2, 1: 1, -1: 1})


def test_sq_modulus_examples():
    assert tp.sq_modulus(2 + E(1)) == TrigPoly1({0: 5, 1: 2, -1: 2})
    assert tp.sq_modulus(E(7)) == TrigPoly1.constant(1)
    assert tp.sq_modulus(TrigPoly1()).is_zero()


def test_add_and_scale():
    a = TrigPoly1({0: 1, 2: 3})
    assert tp.add(a, a) == tp.scale(a, 2)
    assert (a - a).is_zero()


def test_pruning_keeps_canonical_form():
    t = TrigPoly1({0: 1.0, 3: 1e-20})
    assert t.freq == frozenset({0})
    assert TrigPoly1({0: 1.0, 3: 1e-20}, tol=0).freq == frozenset({0, 3})


def test_degrees():
    t = TrigPoly1({-3: 1, 2: 1})
    assert (t.n_minus, t.n_plus, t.n) == (3, 2, 3)
    u = TrigPoly2({(-2, 1): 1, (1, -4): 1})
    assert (u.n1, u.n2) == (2, 4)


def test_norms_of_five_four_cos(five_four_cos):
    t = five_four_cos
    assert t.l1_coeff() == 9
    sup = tp.sup_norm(t)
    assert sup.value == pytest.approx(9)
    assert sup.lower <= 9 <= sup.upper
    mr = tp.min_real(t)
    assert mr.value == pytest.approx(1)
    assert mr.argmax == pytest.approx((0.5,))
    assert mr.lower <= 1 <= mr.upper


@pytest.mark.parametrize("c", [1.5, 2.0, 3.0, 10.0])
def test_sup_enclosure_contains_true_max(c):
    # c + 4 cos 2 pi x has max c + 4
    t = TrigPoly1({-1: 2, 0: c, 1: 2}).dilate(3)
    est = tp.sup_norm(t, oversample=2)
    assert est.lower <= c + 4 <= est.upper


def test_oversample_must_be_at_least_two(five_four_cos):
    with pytest.raises(ValueError):
        tp.sup_norm(five_four_cos, oversample=1.5)


def test_certified_min_real_refines():
    t = TrigPoly1({-1: 2, 0: 4.05, 1: 2})
    est = tp.certified_min_real(t)
    assert est.lower > 0
    assert est.value == pytest.approx(0.05, abs=1e-6)


def test_sample_interpolate_character():
    s = tp.sample(E(1), 8)
    assert np.allclose(np.abs(s.values), 1)
    assert tp.interpolate(s).allclose(E(1), atol=1e-14)


def test_sample_constant():
    assert np.allclose(tp.sample(TrigPoly1.constant(3 - 1j), 16).values, 3 - 1j)


def test_roundtrip(five_four_cos):
    back = tp.interpolate(tp.sample(five_four_cos, 16))
    assert back.max_coeff_diff(five_four_cos) <= 1e-12


def test_aliasing_warning():
    with pytest.warns(tp.AliasingWarning):
        tp.interpolate(tp.sample(E(3), 8), bandwidth=5)


def test_roundtrip_2d(rng):
    t = TrigPoly2({(j, k): complex(*rng.standard_normal(2)) for j in range(-2, 3) for k in range(-3, 2)})
    back = tp.interpolate(tp.sample(t, 8, 8))
    assert back.max_coeff_diff(t) <= 1e-12


def test_eval_matches_grid(rng):
    t = TrigPoly2({(1, 2): 1 + 1j, (-3, 0): 0.5, (0, 0): 2})
    s = tp.sample(t, 16, 16).values
    assert t(3 / 16, 5 / 16) == pytest.approx(s[3, 5])


def test_json_roundtrip_exact(rng):
    t = TrigPoly2({(j, -j): complex(*rng.standard_normal(2)) for j in range(5)})
    obj = json.loads(json.dumps(tp.to_json_obj(t)))
    assert tp.from_json_obj(obj) == t
    t1 = TrigPoly1({-2: math.pi, 4: 1j / 3})
    assert tp.from_json_obj(json.loads(json.dumps(tp.to_json_obj(t1)))) == t1


def test_json_rejects_bad_dim():
    with pytest.raises(ValueError):
        tp.from_json_obj({"dim": 3, "terms": []})


coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False, min_magnitude=1e-3)
poly1 = st.dictionaries(st.integers(-30, 30), coeff, min_size=1, max_size=20).map(TrigPoly1)


@given(poly1, poly1)
@settings(max_examples=60, deadline=None)
def test_freq_of_product_in_sumset(p, q):
    sums = {a + b for a in p.freq for b in q.freq}
    assert (p * q).freq <= sums


@given(poly1)
@settings(max_examples=60, deadline=None)
def test_sq_modulus_matches_pointwise(p):
    x = np.arange(256) / 256
    lhs = tp.sq_modulus(p)(x)
    rhs = np.abs(p(x)) ** 2
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-10 * p.l1_coeff() ** 2)
    # Hermitian symmetry
    t = tp.sq_modulus(p)
    for j, c in t.terms.items():
        assert t.coeff(-j) == pytest.approx(np.conj(c), abs=1e-12 * t.l1_coeff())


@given(poly1)
@settings(max_examples=60, deadline=None)
def test_interpolate_inverts_sample(p):
    M = tp.next_pow2(2 * p.n + 2)
    assert tp.interpolate(tp.sample(p, M)).max_coeff_diff(p) <= 1e-12 * max(1.0, p.l1_coeff())
