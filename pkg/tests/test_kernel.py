"""Damping kernel: stable evaluation, influence coefficients, the
exponential expansion of sqrt(f), and its one-sided spectrum against a
direct-quadrature oracle."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbarrier.errors import (DegenerateKernelError, DomainError, PoleError)
from qbarrier.kernel import DampingKernel
from qbarrier.quadrature import integrate_adaptive
from qbarrier.units import MASS

STD = DampingKernel(5e-3, 100.0)


def test_sigma_frozen_values():
    assert STD.sigma == pytest.approx(0.63663940701888, rel=1e-13)
    assert STD.decay_gap == pytest.approx(0.31581970350944, rel=1e-13)
    assert DampingKernel(1e-3, 100.0).sigma == pytest.approx(
        0.127327881403776, rel=1e-13)


def test_construction_validation():
    with pytest.raises(DegenerateKernelError):
        DampingKernel(-1e-3, 100.0)
    with pytest.raises(DegenerateKernelError):
        DampingKernel(5e-3, 0.0)
    clean = DampingKernel(0.0, 100.0)
    assert clean.sigma == 0.0
    assert clean.decay_gap == 0.0


@settings(max_examples=100, deadline=None)
@given(g=st.floats(1e-6, 1.0), om=st.floats(1.0, 1e4))
def test_sigma_dominates_gamma(g, om):
    k = DampingKernel(g, om)
    assert k.sigma > k.gamma


def test_f_at_zero_and_positivity():
    assert STD.f(0.0) == 1.0
    t = np.linspace(0.0, 80.0, 400)
    vals = STD.f(t)
    assert np.all(vals > 0.0)
    assert vals[0] == 1.0


def test_f_matches_naive_formula():
    # direct sigma*t*e^{gamma t}/sinh(sigma t) where sinh is safe
    t = np.array([0.05, 0.7, 3.0, 12.0])
    s, g = STD.sigma, STD.gamma
    naive = s * t * np.exp(g * t) / np.sinh(s * t)
    np.testing.assert_allclose(STD.f(t), naive, rtol=1e-14)


def test_f_stable_at_extreme_times():
    # the naive ratio turns inf/inf = nan once gamma*t overflows; the
    # rewritten form underflows cleanly to zero instead
    t = np.array([300.0, 2e5])
    s, g = STD.sigma, STD.gamma
    with np.errstate(over="ignore", invalid="ignore"):
        naive = s * t * np.exp(g * t) / np.sinh(s * t)
    assert math.isnan(naive[1])
    vals = STD.f(t)
    assert np.all(np.isfinite(vals))
    assert vals[0] > 0.0
    assert vals[1] == 0.0


def test_f_clean_limit():
    clean = DampingKernel(0.0, 100.0)
    t = np.linspace(0.0, 50.0, 101)
    np.testing.assert_array_equal(clean.f(t), np.ones_like(t))
    assert clean.sqrt_f(17.3) == 1.0


def test_f_rejects_negative_times():
    with pytest.raises(DomainError):
        STD.f(-0.1)


def test_peak_time_brackets_maximum():
    t0 = STD.peak_time()
    assert t0 > 0.0
    f0 = STD.f(t0)
    assert f0 >= STD.f(t0 * 0.97)
    assert f0 >= STD.f(t0 * 1.03)
    # the documented rise is second order in gamma/sigma
    assert f0 - 1.0 <= 2.0 * (STD.gamma / STD.sigma) ** 2
    assert DampingKernel(0.0, 100.0).peak_time() == 0.0


def test_f_strictly_decreasing_past_peak():
    t0 = STD.peak_time()
    t = np.linspace(t0, t0 + 60.0, 1000)
    vals = STD.f(t)
    assert np.all(np.diff(vals) < 0.0)


def test_f_decays_faster_than_any_slower_exponential():
    gap = STD.sigma - STD.gamma
    t = np.array([40.0, 100.0, 200.0])
    weighted = STD.f(t) * np.exp(0.9 * gap * t)
    assert np.all(np.diff(weighted) < 0.0)
    assert weighted[-1] < 1e-2


def test_influence_coefficients_identity():
    # f(t) = (2 t / m) * growing(t), an exact algebraic identity
    rng = np.random.default_rng(11)
    t = rng.uniform(0.05, 40.0, size=20)
    coeff = STD.propagator_coefficients(t)
    np.testing.assert_allclose((2.0 * t / MASS) * coeff.growing, STD.f(t),
                               rtol=1e-12)


def test_influence_coefficients_closed_forms():
    t = np.array([0.3, 1.0, 4.0])
    s, g = STD.sigma, STD.gamma
    coeff = STD.propagator_coefficients(t)
    np.testing.assert_allclose(
        coeff.symmetric, MASS * 0.5 * s / np.tanh(s * t), rtol=1e-13)
    np.testing.assert_allclose(
        coeff.decaying, MASS * 0.5 * s * np.exp(-g * t) / np.sinh(s * t),
        rtol=1e-13)
    np.testing.assert_allclose(
        coeff.growing, MASS * 0.5 * s * np.exp(g * t) / np.sinh(s * t),
        rtol=1e-13)


def test_influence_coefficients_clean_limit():
    clean = DampingKernel(0.0, 100.0)
    t = np.array([0.5, 2.0])
    coeff = clean.propagator_coefficients(t)
    np.testing.assert_allclose(coeff.symmetric, MASS * 0.5 / t, rtol=1e-15)
    np.testing.assert_array_equal(coeff.symmetric, coeff.decaying)
    np.testing.assert_array_equal(coeff.decaying, coeff.growing)


def test_influence_decaying_coefficient_dies():
    coeff_1 = STD.propagator_coefficients(np.array([1.0]))
    coeff_50 = STD.propagator_coefficients(np.array([50.0]))
    assert coeff_50.decaying[0] < 1e-10 * coeff_1.decaying[0]


def test_influence_pole_at_zero():
    with pytest.raises(PoleError):
        STD.propagator_coefficients(0.0)


def test_taylor_sqrt_f_closed_forms():
    g, s = STD.gamma, STD.sigma
    ref = np.array([
        1.0,
        g / 2.0,
        g * g / 4.0 - s * s / 6.0,
        g ** 3 / 8.0 - s * s * g / 4.0,
        g ** 4 / 16.0 - g * g * s * s / 4.0 + 3.0 * s ** 4 / 20.0,
    ])
    np.testing.assert_allclose(STD.taylor_sqrt_f(4), ref, rtol=1e-13)


def test_taylor_sqrt_f_against_finite_differences():
    h = 1e-4
    t = h * np.arange(1, 5)
    vals = np.concatenate(([1.0], STD.sqrt_f(t)))
    d1 = (-25.0 / 12.0 * vals[0] + 4.0 * vals[1] - 3.0 * vals[2]
          + 4.0 / 3.0 * vals[3] - 0.25 * vals[4]) / h
    d2 = (2.0 * vals[0] - 5.0 * vals[1] + 4.0 * vals[2] - vals[3]) / h ** 2
    taylor = STD.taylor_sqrt_f(2)
    assert d1 == pytest.approx(taylor[1], abs=5e-9)
    assert d2 == pytest.approx(taylor[2], rel=5e-4)


def test_series_coefficients():
    amps, rates = STD.series_coefficients(4)
    np.testing.assert_allclose(amps, [1.0, 0.5, 0.375, 0.3125], rtol=1e-15)
    np.testing.assert_allclose(
        rates, STD.decay_gap + 2.0 * STD.sigma * np.arange(4), rtol=1e-15)


def test_sqrt_f_series_converges_to_sqrt_f():
    t = np.array([0.5, 1.0, 2.5, 6.0])
    approx = STD.sqrt_f_series(t, 60)
    np.testing.assert_allclose(approx, STD.sqrt_f(t), rtol=1e-12)


def test_series_requires_damping():
    clean = DampingKernel(0.0, 100.0)
    with pytest.raises(DegenerateKernelError):
        clean.series_coefficients(4)
    with pytest.raises(DegenerateKernelError):
        clean.sqrt_f_spectrum(1.0)


def _spectrum_oracle(kernel, omega, tol=1e-11):
    """Direct quadrature of the defining transform, independent of the
    series evaluation under test."""
    fn = lambda t: kernel.sqrt_f(t) * np.exp(-1j * omega * t)
    res = integrate_adaptive(fn, 0.0, math.inf, tol,
                             tail=("exp", kernel.decay_gap),
                             max_panel_width=2.0 / max(abs(omega), 0.25))
    return res.value


@pytest.mark.parametrize("gamma", [1e-3, 5e-3])
@pytest.mark.parametrize("omega", [0.0, 0.5, -7.3, 31.0, 50.0])
def test_spectrum_against_quadrature(gamma, omega):
    kernel = DampingKernel(gamma, 100.0)
    got = kernel.sqrt_f_spectrum(omega)
    want = _spectrum_oracle(kernel, omega)
    assert abs(got - want) <= 1e-8 * abs(want)


def test_spectrum_real_at_zero():
    val = STD.sqrt_f_spectrum(0.0)
    assert val.imag == pytest.approx(0.0, abs=1e-12)
    assert val.real > 0.0


def test_spectrum_conjugate_symmetry():
    for om in (1.7, 12.0, 43.0):
        left = STD.sqrt_f_spectrum(-om)
        right = STD.sqrt_f_spectrum(om)
        assert left == pytest.approx(right.conjugate(), rel=1e-12)


def test_spectrum_vectorized_matches_scalar():
    om = np.array([-3.0, 0.0, 0.7, 26.0])
    vec = STD.sqrt_f_spectrum(om)
    assert vec.shape == om.shape
    for o, v in zip(om, vec):
        assert STD.sqrt_f_spectrum(float(o)) == pytest.approx(v, rel=1e-13)


def test_spectrum_far_tail_falls_like_inverse_omega():
    # sqrt(f(0)) = 1 forces gtilde ~ 1/(i omega) far out
    om = 4000.0
    val = STD.sqrt_f_spectrum(om)
    assert val == pytest.approx(1.0 / (1j * om), rel=2e-3)


def test_product_rule_deviation_reported():
    # the factorized approximation is measured, never asserted small;
    # -s prints the number for the record
    grid = np.linspace(0.1, 20.0, 40)
    dev = STD.product_rule_deviation(grid)
    assert math.isfinite(dev) and dev >= 0.0
    print(f"product rule worst relative deviation on [0.1, 20]: {dev:.3e}")
    with pytest.raises(DomainError):
        STD.product_rule_deviation(np.array([1.0]))
