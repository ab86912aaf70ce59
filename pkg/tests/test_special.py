from math import factorial, prod

import mpmath
import numpy as np
import pytest
from scipy.special import kv

from polyensemble_toolkit.utils import quadrature as quad
from polyensemble_toolkit.utils.errors import ConfigError, PreconditionError, SeriesDivergenceError
from polyensemble_toolkit.utils.special import (HypergeometricSpec, MeijerGSpec, RationalMeijerG, gamma_ratio,
                                                hyper_pfq, log_gamma, meijer_g, mellin_barnes_result, phi_class)


def test_log_gamma():
    assert log_gamma(5.0).real == pytest.approx(np.log(24.0))
    with pytest.raises(PreconditionError):
        log_gamma(-2.0)
    with pytest.raises(PreconditionError):
        log_gamma(np.array([1.0, 0.0]))


def test_gamma_ratio_cancels_poles():
    z = np.array([-3.0, 0.5, 2.0])
    assert np.allclose(gamma_ratio(z, 0, 2), 1.0 / (z * (z + 1.0)))
    assert np.allclose(gamma_ratio(z, 2, 0), z * (z + 1.0))
    assert np.allclose(gamma_ratio(z, 1, 1), 1.0)
    with pytest.raises(PreconditionError):
        gamma_ratio(z, 0, 0.5)


@pytest.mark.parametrize("x", [-5.0, -0.5, 0.0, 3.0, 20.0])
def test_exponential_series(x):
    assert hyper_pfq(HypergeometricSpec(), x).real == pytest.approx(np.exp(x), rel=1e-10)


def test_binomial_series_inside_unit_disc():
    x = np.array([-0.6, 0.2, 0.5])
    assert np.allclose(hyper_pfq(HypergeometricSpec((2.5,)), x).real, (1.0 - x) ** -2.5, rtol=1e-10)


def test_terminating_series_is_a_polynomial():
    b, c, x = 1.5, 2.5, 3.0
    expected = 1.0 - 2.0 * b / c * x + b * (b + 1.0) / (c * (c + 1.0)) * x ** 2
    spec = HypergeometricSpec((-2.0, b), (c,))
    assert spec.terminates_at == 2
    assert hyper_pfq(spec, x).real == pytest.approx(expected)
    assert hyper_pfq(HypergeometricSpec((-1.0, 2.0, 3.0), ()), 5.0).real == pytest.approx(1.0 - 30.0)


def test_divergent_series_are_rejected():
    with pytest.raises(SeriesDivergenceError):
        hyper_pfq(HypergeometricSpec((1.0, 1.0), (2.0,)), 1.0)
    with pytest.raises(SeriesDivergenceError):
        hyper_pfq(HypergeometricSpec((1.0, 1.0), ()), 0.1)
    with pytest.raises(PreconditionError):
        hyper_pfq(HypergeometricSpec((1.0,), (-2.0,)), 0.1)


def test_hypergeometric_against_mpmath():
    spec = HypergeometricSpec((1.5,), (2.5, 3.5))
    for x in (-7.0, 0.3, 7.0):
        expected = float(mpmath.hyper([1.5], [2.5, 3.5], x))
        assert hyper_pfq(spec, x).real == pytest.approx(expected, rel=1e-12)


def test_meijer_spec_classes():
    assert MeijerGSpec.phi([0, 1]).kind == "phi"
    assert MeijerGSpec.beta([3], [1]).kind == "beta"
    assert MeijerGSpec.dual([2], [0]).kind == "dual"
    assert MeijerGSpec(1, 1, 1, 2, (0,), (0, 1)).kind == "psi"
    assert MeijerGSpec(1, 1, 2, 2, (0, 0), (0, 1)).kind is None
    with pytest.raises(PreconditionError):
        MeijerGSpec(1, 0, 1, 1, (), (0,))
    with pytest.raises(PreconditionError):
        MeijerGSpec(3, 0, 0, 2, (), (0, 1))


def test_phi_class_closed_forms():
    x = np.array([0.1, 1.0, 4.0])
    assert np.allclose(phi_class([2], x).real, x ** 2 * np.exp(-x))
    assert np.allclose(phi_class([0, 1], x).real, 2.0 * np.sqrt(x) * kv(1, 2.0 * np.sqrt(x)))


def test_phi_class_mellin_barnes_against_mpmath():
    for x in (0.5, 2.0, 5.0):
        expected = float(mpmath.meijerg([[], []], [[0, 0, 1], []], x))
        assert phi_class([0, 0, 1], np.array([x]))[0].real == pytest.approx(expected, rel=1e-8)


def test_beta_class_by_residues():
    x = np.array([0.2, 0.5, 1.5])
    assert np.allclose(meijer_g(MeijerGSpec.beta([3], [1]), x), [0.16, 0.25, 0.0], atol=1e-12)
    # product of two uniforms on [0, 1]
    assert meijer_g(MeijerGSpec.beta([1, 1], [0, 0]), 0.3) == pytest.approx(-np.log(0.3), rel=1e-10)


def test_dual_class_by_residues():
    g = RationalMeijerG(MeijerGSpec.dual([2], [0]))
    x = np.array([1.5, 3.0])
    assert np.allclose(g(x).real, x - 1.0, atol=1e-12)


def test_psi_class_series():
    spec = MeijerGSpec(1, 1, 1, 1, (0,), (0,))
    assert meijer_g(spec, 0.5) == pytest.approx(1.0 / 1.5, rel=1e-12)


def test_meijer_g_against_mpmath_beta():
    spec = MeijerGSpec.beta([2, 3], [0, 1])
    for x in (0.1, 0.6):
        expected = float(mpmath.meijerg([[], [2, 3]], [[0, 1], []], x))
        assert meijer_g(spec, x) == pytest.approx(expected, rel=1e-9)


def test_meijer_g_rejects_bad_arguments():
    with pytest.raises(PreconditionError):
        meijer_g(MeijerGSpec.phi([0]), 0.0)
    with pytest.raises(PreconditionError):
        meijer_g(MeijerGSpec(1, 1, 2, 2, (0, 0), (0, 1)), 0.5)


def test_mellin_barnes_result_reports_error():
    result = mellin_barnes_result(MeijerGSpec.phi([0, 1, 2]), 1.5)
    assert result.converged
    assert result.error_estimate < 1e-8
    # G^{1,0}_{0,1}(-; 3 | x) = x^3 e^{-x}
    single = mellin_barnes_result(MeijerGSpec.phi([3]), 2.0)
    assert single.value.real == pytest.approx(8.0 * np.exp(-2.0), rel=1e-10)


def test_log_gamma_reference_values(specialReference):
    for entry in specialReference["log_gamma"]:
        expected = complex(*entry["value"])
        value = log_gamma(complex(*entry["z"]))
        assert abs(value - expected) <= 1e-12 * max(1.0, abs(expected)), entry["z"]


def test_meijer_g_reference_values(specialReference):
    for entry in specialReference["meijer_g"]:
        spec = MeijerGSpec(entry["m"], entry["n"], entry["p"], entry["q"], entry["a"], entry["b"])
        assert meijer_g(spec, entry["x"]) == pytest.approx(entry["value"], rel=entry["rtol"]), (spec, entry["x"])


def test_meijer_g_methods():
    psi = MeijerGSpec(1, 1, 1, 2, (0,), (0, -1))
    x = np.array([0.5, 2.0, 6.0])
    series = meijer_g(psi, x, method="series")
    assert np.allclose(series, (1.0 - np.exp(-x)) / x, rtol=1e-12)
    assert np.allclose(meijer_g(psi, x, method="mellin-barnes"), series, rtol=1e-9)
    beta = MeijerGSpec.beta([3], [1])
    assert np.allclose(meijer_g(beta, [0.2, 1.5], method="residues"), [0.16, 0.0], atol=1e-12)
    phi = MeijerGSpec.phi([0, 1])
    assert meijer_g(phi, 2.0, method="series") == pytest.approx(meijer_g(phi, 2.0, method="mellin-barnes"),
                                                                 rel=1e-9)


def test_meijer_g_rejects_unavailable_methods():
    with pytest.raises(PreconditionError):
        meijer_g(MeijerGSpec.phi([0, 0, 1]), 2.0, method="series")
    with pytest.raises(PreconditionError):
        meijer_g(MeijerGSpec.phi([0, 1]), 2.0, method="residues")
    with pytest.raises(PreconditionError):
        meijer_g(MeijerGSpec.beta([3], [1]), 0.5, method="series")
    with pytest.raises(ConfigError):
        meijer_g(MeijerGSpec.phi([0]), 1.0, method="taylor")


def _gamma(z):
    return np.exp(log_gamma(z).real)


@pytest.mark.parametrize("z", [0.5, 1.0, 2.0, 3.0, 4.5, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0])
def test_reciprocal_gamma_on_hankel_contour(z):
    contour = quad.hankel_contour(max(1.0, z), 40.0 + z, 32)
    s = contour.nodes
    value = contour.sum(np.exp(s) * s ** (-z)) / (2j * np.pi)
    assert value.real == pytest.approx(1.0 / _gamma(z), rel=1e-9)
    assert abs(value.imag) <= 1e-9 * abs(value)


def test_gamma_integral_grid():
    rule = quad.uniform_interval(0.0, 200.0, panel=1.0, nodes=16)
    t = rule.nodes
    for nu in range(7):
        for v in range(7):
            value = np.sum(rule.weights * t ** (nu + v) * np.exp(-t))
            assert value == pytest.approx(factorial(nu + v), rel=1e-12), (nu, v)


def test_binomial_contour_identity_grid():
    # residue form of the Hankel integral with (1 - s)^{-mu-1}
    contour = quad.circle(0.0, 0.5, 64)
    s = contour.nodes
    for nu in range(7):
        for u in range(7):
            for mu in range(1, 7):
                value = mu * contour.sum(s ** (-nu - u - 1) * (1.0 - s) ** (-mu - 1)) / (2j * np.pi)
                expected = _gamma(u + nu + mu + 1) / (_gamma(mu) * _gamma(u + nu + 1))
                assert value.real == pytest.approx(expected, rel=1e-10), (nu, u, mu)


def test_beta_integral_grid():
    rule = quad.interval([0.0, 1.0], nodes=32)
    t = rule.nodes
    for nu in range(7):
        for mu in range(1, 7):
            for v in range(7):
                value = np.sum(rule.weights * t ** (nu + v) * (1.0 - t) ** (mu - 1))
                expected = _gamma(mu) * _gamma(v + nu + 1) / _gamma(v + nu + mu + 1)
                assert value == pytest.approx(expected, rel=1e-10), (nu, mu, v)


@pytest.mark.parametrize("nu, mu", [(0.5, 1.5), (2.5, 3.5), (1.0, 2.5)])
def test_beta_integral_fractional(nu, mu):
    rule = quad.graded_interval(0.0, 1.0, levels=40, nodes=16, toward="both")
    t = rule.nodes
    for v in range(7):
        value = np.sum(rule.weights * t ** (nu + v) * (1.0 - t) ** (mu - 1.0))
        expected = _gamma(mu) * _gamma(v + nu + 1) / _gamma(v + nu + mu + 1)
        assert value == pytest.approx(expected, rel=1e-10), v


@pytest.mark.parametrize("nus, extent, orders, rtol", [((2,), 1024.0, 4, 1e-10), ((0, 0), 4096.0, 4, 1e-9),
                                                       ((0, 1), 4096.0, 4, 1e-9), ((1, 1), 4096.0, 4, 1e-9),
                                                       ((0, 0, 1), 4096.0, 2, 1e-8),
                                                       ((1, 0, 2), 4096.0, 2, 1e-8)])
def test_phi_class_moments(nus, extent, orders, rtol):
    rule = quad.graded_half_line(extent)
    weight = phi_class(nus, rule.nodes).real
    for j in range(orders):
        expected = prod(factorial(j + v) for v in nus)
        assert np.sum(rule.weights * rule.nodes ** j * weight) == pytest.approx(expected, rel=rtol), j


@pytest.mark.parametrize("nus, mus", [((1,), (2,)), ((0,), (1,)), ((0, 0), (1, 1)), ((0, 1), (2, 2)),
                                      ((1, 0, 2), (1, 2, 1))])
def test_beta_class_moments(nus, mus):
    rule = quad.graded_interval(0.0, 1.0, levels=40, nodes=16, toward="both")
    spec = MeijerGSpec.beta([v + m for v, m in zip(nus, mus)], list(nus))
    weight = meijer_g(spec, rule.nodes)
    for j in range(4):
        expected = prod(factorial(j + v) / factorial(j + v + m) for v, m in zip(nus, mus))
        assert np.sum(rule.weights * rule.nodes ** j * weight) == pytest.approx(expected, rel=1e-8), j
