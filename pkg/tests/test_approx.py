import math
from fractions import Fraction as F

import pytest

from bohrfact.approx import (
    ApproxResult,
    Insufficient,
    IrrationalResult,
    RationalPipeline,
    approx_irrational,
    approx_rational,
    build_test_t,
    certify,
    corollary1_project,
    degree_report,
    fit_exponent,
)
from bohrfact.errors import FreqViolation, NotNonnegative, PreconditionError
from bohrfact.lattice import Slope, Strip, f1_contains, f2_contains, f2_enumerate, liouville_alpha, theta
from bohrfact.specfact2d import error_2d
from bohrfact.trigpoly import TrigPoly1, TrigPoly2, sq_modulus, sup_norm

STRIP = Strip(F(-2, 3), 0.3)
Q = 1 + TrigPoly2.monomial(3, -2)
GOLDEN = (1 + math.sqrt(5)) / 2 - 1


@pytest.fixture(scope="module")
def pipeline():
    return RationalPipeline(build_test_t([Q], 0.2), 2, 3, 0.3, N_max=32)


def test_build_test_t():
    assert build_test_t([], 0.5) == TrigPoly2.constant(0.5)
    assert build_test_t([Q], 0.1) == 0.1 + sq_modulus(Q)
    with pytest.raises(ValueError):
        build_test_t([Q], 0)
    with pytest.raises(FreqViolation):
        build_test_t([1 + TrigPoly2.monomial(1, 1)], 0.1, STRIP)


def test_build_test_t_difference_set(rng):
    pts = f2_enumerate(STRIP, range(-9, 10))
    qs = []
    for _ in range(2):
        idx = rng.choice(len(pts), 4, replace=False)
        qs.append(TrigPoly2({pts[i]: complex(*rng.standard_normal(2)) for i in idx}))
    t = build_test_t(qs, 0.1, STRIP)
    diffs = {(a[0] - b[0], a[1] - b[1]) for a in pts for b in pts}
    assert set(t.terms) <= diffs


def test_certify_margins():
    cert = certify(STRIP, Q)
    assert [(e.j, e.k) for e in cert] == [(0, 0), (3, -2)]
    assert all(e.margin == pytest.approx(0.3) for e in cert)
    with pytest.raises(FreqViolation):
        certify(STRIP, TrigPoly2.monomial(1, 0))


def test_result_rechecks_certificate(pipeline):
    res = pipeline.result(4)
    with pytest.raises(FreqViolation):
        ApproxResult(res.p + TrigPoly2.monomial(1, 1), *list(res.__dict__.values())[1:])


def test_alpha_zero_embeds_1d(five_four_cos_y):
    res = approx_rational(five_four_cos_y, 0, 1, 1.5, 0)
    assert res.measured_error <= 1e-8
    assert res.p.l1_coeff() == pytest.approx(3)
    assert sup_norm(sq_modulus(res.p) - five_four_cos_y).value <= 1e-8


def test_rational_fixture_converges(pipeline):
    errs = {N: pipeline.result(N).measured_error for N in (8, 16, 24, 32)}
    assert errs[32] <= 1e-6
    assert errs[32] < errs[16] < errs[8]


def test_rational_certified_every_n(pipeline):
    for N in (0, 1, 4, 12, 32):
        res = pipeline.result(N)
        assert all(f2_contains(STRIP, v) for v in res.p.terms)
        assert len(res.certificate) == len(res.p.terms)


def test_error_equality_under_g(pipeline):
    for N in (2, 8, 24):
        res = pipeline.result(N)
        assert abs(res.measured_error - res.error_g) <= 1e-10
        # independent recomputation on the reduced side
        from bohrfact.lattice import mat_apply_poly

        q = mat_apply_poly(res.g, res.p)
        direct = error_2d(pipeline.gt, q, grid=res.grid).value
        assert direct == pytest.approx(res.error_g, abs=1e-12)


def test_n0_large_error_still_certified(pipeline):
    res = pipeline.result(0)
    assert res.measured_error > 1e-2
    assert res.certificate


def test_monotone_doubling(pipeline):
    prev = pipeline.result(2).measured_error
    for N in (4, 8, 16, 32):
        e = pipeline.result(N).measured_error
        assert e <= 1.1 * prev
        prev = e


def test_positive_slope_variant():
    t = build_test_t([1 + TrigPoly2.monomial(3, 2)], 0.2)
    res = approx_rational(t, -2, 3, 0.3, 24)
    assert res.measured_error < 1e-5
    assert all(f2_contains(Strip(F(2, 3), 0.3), v) for v in res.p.terms)


def test_transposed_slope():
    strip = Strip(F(5, 2), 0.7)
    q = 1 + 0.5 * TrigPoly2.monomial(2, 5)
    certify(strip, q)
    res = approx_rational(build_test_t([q], 0.2), -5, 2, 0.7, 24)
    assert res.transposed
    assert res.measured_error < 1e-4
    assert abs(res.measured_error - res.error_g) <= 1e-10


def test_end_to_end_oracle():
    q = 1 + 0.5 * TrigPoly2.monomial(3, -2)
    floor = 1e-6 * sup_norm(sq_modulus(q)).value
    t = build_test_t([q], floor)
    res = approx_rational(t, 2, 3, 0.3, 32)
    recovered = sq_modulus(res.p)
    assert sup_norm(recovered - sq_modulus(q)).value <= 2 * floor + res.measured_error + 1e-12


def test_precondition_errors():
    t = build_test_t([1 + TrigPoly2.monomial(3, -2)], 0.2)
    with pytest.raises(FreqViolation):
        approx_rational(build_test_t([1 + TrigPoly2.monomial(1, 0)], 0.2), 2, 3, 0.3, 4)
    with pytest.raises(ValueError):
        approx_rational(t, 2, 4, 0.3, 4)
    neg = TrigPoly2({(0, 0): 1, (3, -2): 1, (-3, 2): 1})
    with pytest.raises(PreconditionError):
        approx_rational(neg, 2, 3, 0.3, 4)


def test_first_below(pipeline):
    res, ok = pipeline.first_below(1e-6)
    assert ok and res.measured_error <= 1e-6
    res, ok = pipeline.first_below(1e-30)
    assert not ok and res.N == 32


def test_degree_report():
    res = approx_rational(build_test_t([Q], 0.2), 2, 3, 0.3, 8)
    rep = degree_report(res, 3, 0.5, 1e-3)
    assert rep.degree == res.degree_j + res.degree_k
    assert rep.shape == pytest.approx(9 * (3**0.5 - math.log(1e-3)))
    assert rep.constant == pytest.approx(rep.degree / rep.shape)


def _degree_family(c, d, eps):
    s = Strip(Slope.from_cd(c, d), 0.3)
    j = next(j for j in range(d, 100) if f1_contains(s, j))
    q = 1 + 0.6 * TrigPoly2.monomial(j, theta(s.alpha.value, j))
    res, ok = RationalPipeline(build_test_t([q], 0.2), c, d, 0.3, N_max=64).first_below(eps)
    assert ok
    return res.degree_j + res.degree_k


def test_degree_growth_with_d():
    ds = [3, 5, 8, 13]
    degs = [_degree_family(-c, d, 1e-3) for c, d in [(2, 3), (3, 5), (5, 8), (8, 13)]]
    assert degs == sorted(degs)
    slope, _ = fit_exponent(ds, degs)
    # this family grows about linearly in d
    assert 0.8 < slope < 3.5


def test_degree_integer_alpha_matches_zero():
    q0 = 1 + 0.6 * TrigPoly2.monomial(1, 0)
    q1 = 1 + 0.6 * TrigPoly2.monomial(1, 1)
    r0 = approx_rational(build_test_t([q0], 0.2), 0, 1, 0.3, 12)
    r1 = approx_rational(build_test_t([q1], 0.2), -1, 1, 0.3, 12)
    assert r0.degree_j == r1.degree_j
    assert r0.measured_error == pytest.approx(r1.measured_error, rel=1e-6)


def _bohr_fixture(alpha, beta=0.15):
    s = Strip(alpha, beta)
    vs = [(j, theta(alpha, j)) for j in range(1, 200) if f1_contains(s, j)][:2]
    q = 1 + 0.6 * TrigPoly2.monomial(*vs[0]) + 0.3 * TrigPoly2.monomial(*vs[1])
    return build_test_t([q], 0.1)


def test_irrational_liouville_accepted():
    a = liouville_alpha(3)
    out = approx_irrational(_bohr_fixture(a), a, 0.3, 0.15, 1e-2, max_depth=4)
    assert isinstance(out, IrrationalResult)
    assert out.convergent.depth <= 4 and out.convergent.d == 9
    assert out.result.measured_error <= 1e-2
    assert out.result.degree_j < out.convergent.J
    assert all(f2_contains(Strip(a, 0.3), v) for v in out.result.p.terms)


def test_irrational_golden_insufficient():
    out = approx_irrational(_bohr_fixture(GOLDEN), GOLDEN, 0.3, 0.15, 1e-2, max_depth=4)
    assert isinstance(out, Insufficient)
    assert len(out.table()) == 5
    assert all(not row["accepted"] for row in out.table())


def test_irrational_constant_depth0():
    out = approx_irrational(TrigPoly2.constant(4.0), GOLDEN, 0.3, 0.15, 1e-6, max_depth=2)
    assert isinstance(out, IrrationalResult) and out.convergent.depth == 0
    assert out.result.p.l1_coeff() == pytest.approx(2)


def test_irrational_preconditions():
    with pytest.raises(ValueError):
        approx_irrational(TrigPoly2.constant(1.0), GOLDEN, 0.3, 0.3, 1e-2)
    with pytest.raises(FreqViolation):
        approx_irrational(build_test_t([1 + TrigPoly2.monomial(1, 0)], 0.1), GOLDEN, 0.3, 0.15, 1e-2)


def test_projection_constant():
    res = corollary1_project(F(0), 0.2, TrigPoly1.constant(4.0), 1e-6)
    assert res.p.l1_coeff() == pytest.approx(2, rel=1e-6)
    assert res.error <= 1e-5


def test_projection_five_four_cos():
    alpha = math.sqrt(2) - 1
    j = next(j for j in range(1, 50) if f1_contains(Strip(alpha, 0.2), j))
    t1 = TrigPoly1({-j: 2, 0: 5, j: 2})
    res = corollary1_project(alpha, 0.2, t1, 1e-6)
    assert res.error <= 2e-5
    assert all(f1_contains(Strip(alpha, 0.2), m) for m in res.p.terms)
    # 2 + e_j up to a unimodular factor e_m
    freqs = sorted(res.p.terms)
    assert len(freqs) == 2 and freqs[1] - freqs[0] == j
    assert abs(res.p.terms[freqs[0]]) == pytest.approx(2, rel=1e-5)
    assert abs(res.p.terms[freqs[1]]) == pytest.approx(1, rel=1e-5)


def test_projection_errors():
    alpha = math.sqrt(2) - 1
    bad = next(j for j in range(1, 50) if not f1_contains(Strip(alpha, 0.4), j))
    with pytest.raises(FreqViolation):
        corollary1_project(alpha, 0.2, TrigPoly1({-bad: 1, 0: 3, bad: 1}), 1e-3)
    with pytest.raises(NotNonnegative):
        corollary1_project(F(0), 0.2, TrigPoly1({-1: 1, 0: 2, 1: 1}), 1e-3)
    with pytest.raises(ValueError):
        corollary1_project(F(0), 0.3, TrigPoly1.constant(1.0), 1e-3)
