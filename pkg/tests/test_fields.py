import numpy as np
import pytest

from landau_ee.errors import AccuracyError, DomainError
from landau_ee.fields import (
    ConvolutionQuad,
    TamenessParams,
    _gauge_quadrature,
    curl_div_check,
    decay_audit,
    field_eval,
    gauge_convolve,
    gauge_decay_constant,
    gaussian_bump,
    gaussian_potential,
    power_law_field,
    power_law_potential,
    pseudo_potential,
    zero_field,
    zero_potential,
)

TM = TamenessParams(2, 0.5)


def test_tameness_params():
    assert TM.n0 == 2
    assert TamenessParams(2, 0.1).n0 == 6
    with pytest.raises(DomainError):
        TamenessParams(2, 1.2)
    with pytest.raises(DomainError):
        TamenessParams(2, 0.0)


def test_family_validation():
    with pytest.raises(DomainError):
        power_law_field(0.1, 1.2, tameness=TM)  # needs exponent >= 1.5
    with pytest.raises(DomainError):
        power_law_potential(0.1, 0.3, tameness=TM)  # needs exponent >= 0.5
    power_law_potential(0.1, 0.6, tameness=TM)
    with pytest.raises(DomainError):
        gaussian_bump(0.1, -1.0, tameness=TM)


def test_field_eval_points():
    assert field_eval(zero_field(TM), np.array([3.0, 4.0])) == 0.0
    g = gaussian_bump(0.7, 2.0, tameness=TM)
    assert field_eval(g, np.zeros(2)) == pytest.approx(0.7, abs=1e-15)
    gc = gaussian_bump(0.7, 2.0, center=(1.0, 1.0), tameness=TM)
    assert field_eval(gc, np.array([1.0, 1.0])) == pytest.approx(0.7, abs=1e-15)


def test_decay_audits_are_true_bounds():
    fams = [
        gaussian_bump(0.3, 1.0, tameness=TM),
        gaussian_bump(-0.5, 0.8, center=(1.0, -2.0), tameness=TM),
        power_law_field(0.3, 1.5, tameness=TM),
        gaussian_potential(0.2, 1.0, tameness=TM),
        power_law_potential(0.2, 0.5, tameness=TM),
    ]
    for f in fams:
        observed, reported = decay_audit(f)
        assert observed <= reported
    assert decay_audit(zero_field(TM)) == (0.0, 0.0)


def test_gauge_closed_form_gaussian():
    g = gaussian_bump(0.3, 1.0, tameness=TM)
    x = np.array([1.2, -0.7])
    r2 = x @ x
    expect = 0.3 * 1.0 * (1 - np.exp(-r2)) / (2 * r2) * np.array([x[1], -x[0]])
    assert np.allclose(gauge_convolve(g, x), expect, atol=1e-15)
    assert np.allclose(gauge_convolve(g, np.zeros(2)), 0.0)
    assert np.allclose(gauge_convolve(zero_field(TM), x), 0.0)


def test_gauge_quadrature_matches_closed_form():
    fams = [
        gaussian_bump(0.3, 1.0, tameness=TM),
        power_law_field(0.3, 1.5, tameness=TM),
        gaussian_bump(0.5, 0.8, center=(1.0, -2.0), tameness=TM),
    ]
    for f in fams:
        for r in (0.5, 2.0, 10.0):
            x = np.array([r / np.sqrt(2.0), -r / np.sqrt(2.0)])
            a_closed = gauge_convolve(f, x)
            a_quad = gauge_convolve(f, x, method="quadrature")
            assert np.max(np.abs(a_closed - a_quad)) <= 1e-6


def test_gauge_quadrature_tail_error():
    f = power_law_field(0.3, 1.5, tameness=TM)
    with pytest.raises(AccuracyError):
        gauge_convolve(
            f, np.array([2.0, 0.0]), quad=ConvolutionQuad(r_max=20.0), method="quadrature"
        )


def test_gauge_linearity():
    # quadrature of a superposed profile equals the sum of the gauges
    g = gaussian_bump(0.3, 1.0, tameness=TM)
    p = power_law_field(0.2, 1.6, tameness=TM)

    class Sum:
        kind = "sum"
        center = (0.0, 0.0)

        def value(self, x):
            return g.value(x) + p.value(x)

    x = np.array([1.3, -0.4])
    lhs = _gauge_quadrature(Sum(), x, ConvolutionQuad(r_max=2e5))
    rhs = gauge_convolve(g, x) + gauge_convolve(p, x)
    assert np.max(np.abs(lhs - rhs)) <= 1e-6
    # scaling is exact in the closed form
    g2 = gaussian_bump(0.6, 1.0, tameness=TM)
    assert np.allclose(gauge_convolve(g2, x), 2.0 * gauge_convolve(g, x), atol=1e-15)


def test_gauge_decay_audit():
    for f in (
        gaussian_bump(0.3, 1.0, tameness=TM),
        power_law_field(0.3, 1.5, tameness=TM),
        gaussian_bump(0.5, 0.8, center=(1.0, -2.0), tameness=TM),
    ):
        bound = gauge_decay_constant(f)
        rng = np.random.default_rng(5)
        for _ in range(40):
            phi = rng.uniform(0, 2 * np.pi)
            r = rng.uniform(0.01, 100.0)
            x = r * np.array([np.cos(phi), np.sin(phi)])
            a = gauge_convolve(f, x)
            assert np.hypot(*a) * (1 + r) ** TM.eps <= bound


def test_curl_div_audit():
    rng = np.random.default_rng(9)
    fams = [
        gaussian_bump(0.3, 1.0, tameness=TM),
        power_law_field(0.3, 1.5, tameness=TM),
        gaussian_bump(0.5, 0.8, center=(1.0, -2.0), tameness=TM),
    ]
    # two fixed reference points
    ce, de = curl_div_check(fams[0], np.array([1.0, 0.5]), 1e-3)
    assert ce <= 1e-4 and de <= 1e-4
    ce, de = curl_div_check(fams[1], np.array([3.0, -2.0]), 1e-3)
    assert ce <= 1e-4 and de <= 1e-4
    # 20-point audit with ||x|| <= 50
    for f in fams:
        for _ in range(20):
            x = rng.uniform(-1, 1, size=2)
            x *= rng.uniform(0.1, 50.0) / np.hypot(*x)
            ce, de = curl_div_check(f, x, 1e-3)
            assert ce <= 1e-4 and de <= 1e-4
    ce, de = curl_div_check(zero_field(TM), np.array([1.0, 2.0]), 1e-3)
    assert ce == 0.0 and de == 0.0


def test_pseudo_potential():
    g = gaussian_bump(0.3, 1.0, tameness=TM)
    v = gaussian_potential(0.2, 1.0, tameness=TM)
    x = np.array([1.0, 1.0])
    assert pseudo_potential(zero_field(TM), zero_potential(TM), x) == 0.0
    assert pseudo_potential(zero_field(TM), v, x) == pytest.approx(v.value(x), abs=1e-15)
    a = gauge_convolve(g, x)
    assert abs(pseudo_potential(g, v, x) - (a @ a + v.value(x))) <= 1e-12
