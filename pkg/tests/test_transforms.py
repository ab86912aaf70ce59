from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import Polynomial
from scipy.special import kv

from polyensemble_toolkit.ensembles import core
from polyensemble_toolkit.ensembles import transforms as tr
from polyensemble_toolkit.ensembles.kernels import AtomicKernel, gue_christoffel_darboux, kernel_from_system
from polyensemble_toolkit.utils import polynomials as poly
from polyensemble_toolkit.utils import quadrature as quad
from polyensemble_toolkit.utils.errors import ConfigError, ContourError, PreconditionError
from polyensemble_toolkit.utils.polynomials import WeightedFunction


def exponential(tag="exp"):
    return WeightedFunction(lambda x: np.exp(-np.asarray(x)), core.HALF_LINE, (0.0, 48.0), tag)


def test_moments_of_standard_transforms():
    assert np.allclose(tr.ginibre(0).b.values(4), [1.0, 1.0, 0.5, 1.0 / 6.0])
    assert np.allclose(tr.ginibre(2).b.values(3), [0.5, 1.0 / 6.0, 1.0 / 24.0])
    assert np.allclose(tr.truncated(0, 2).b.values(4), [2.0, 6.0, 12.0, 20.0])
    assert np.allclose(tr.iterated_spec(tr.GINIBRE, [0, 1]).b.values(3), [1.0, 0.5, 1.0 / 12.0])


def test_moment_sequence_validation():
    with pytest.raises(PreconditionError):
        tr.MomentSequence(lambda j: -1.0)(0)
    with pytest.raises(PreconditionError):
        tr.MomentSequence(lambda j: np.inf)(2)


def test_moments_from_weight():
    spec = tr.general(tr.ginibre(0).phi)
    for j in range(6):
        assert spec.b(j) == pytest.approx(1.0 / factorial(j), rel=1e-9)
    assert spec.multiplicative


def test_laurent_series():
    series = tr.LaurentSeries(lambda j: 0.5 ** j, 0, (0.0, 2.0), label="geometric")
    assert complex(series(0.5)).real == pytest.approx(4.0 / 3.0)
    assert series.contains(1.0) and not series.contains(3.0)
    squared = series.hadamard(series)
    assert squared.coefficient(3) == pytest.approx(0.5 ** 6)
    assert squared.annulus == (0.0, 4.0)
    with pytest.raises(PreconditionError):
        tr.LaurentSeries(lambda j: 1.0, 0, (1.0, 1.0))


def test_op_L():
    assert np.allclose(tr.op_L([1.0, 3.0, 1.0], tr.ginibre(0).b).coef, [1.0, 3.0, 0.5])


@pytest.mark.parametrize("spec", [tr.ginibre(1), tr.truncated(0, 2), tr.iterated_spec(tr.GINIBRE, [0, 2])])
def test_contour_route_matches_hadamard_product(spec):
    p = Polynomial([0.5, -1.0, 2.0, 0.25, 1.0])
    assert np.allclose(tr.op_L_contour(p, spec.psi, spec.sigma()).coef, tr.op_L(p, spec.b).coef,
                       rtol=1e-10, atol=1e-10)


def test_contour_route_checks_the_contour():
    p = Polynomial([1.0, 1.0])
    with pytest.raises(ContourError):
        tr.op_L_contour(p, tr.truncated(0, 1).psi, quad.circle(0.0, 2.0, 64))
    with pytest.raises(ContourError):
        tr.op_L_contour(p, tr.ginibre(0).psi, quad.circle(3.0, 0.5, 64))


def test_iterated_psi_is_the_moment_series():
    psi = tr.iterated_spec(tr.GINIBRE, [0, 1]).psi
    s = 0.7
    expected = sum(s ** k / (factorial(k) * factorial(k + 1)) for k in range(30))
    assert complex(psi(s)).real == pytest.approx(expected, rel=1e-12)


def test_iterated_truncated_weight_of_two_uniforms():
    phi = tr.iterated_spec(tr.TRUNCATED, [0, 0], [1, 1]).phi
    t = np.array([0.1, 0.5, 0.9])
    assert np.allclose(phi(t), -np.log(t), rtol=1e-10)


def test_inverse_weierstrass():
    assert np.allclose(tr.inv_weierstrass([0.0, 0.0, 0.0, 1.0]).coef, poly.hermite_monic(3).coef)
    assert np.allclose(tr.inv_weierstrass(poly.hermite_monic(2)).coef, [-2.0, 0.0, 1.0])


def test_inverse_weierstrass_line_integral():
    p = Polynomial([2.0, -1.0, 0.0, 0.0, 1.0])
    x = np.array([-1.0, 0.0, 0.5, 2.0])
    assert np.allclose(tr.inv_weierstrass_line(p, x), tr.inv_weierstrass(p)(x), atol=1e-9)
    x = np.array([0.5, 1.0])
    assert np.allclose(tr.inv_weierstrass_line(p, x, abscissa=0.0), tr.inv_weierstrass(p)(x), atol=1e-8)


def test_weierstrass_of_gaussian_and_atoms():
    q = WeightedFunction(lambda x: np.exp(-0.5 * np.asarray(x) ** 2) / np.sqrt(2.0 * np.pi), core.REAL_LINE,
                         (-12.0, 12.0))
    y = np.array([-3.0, 0.0, 2.5])
    assert np.allclose(tr.weierstrass(q)(y), np.exp(-0.25 * y ** 2) / np.sqrt(4.0 * np.pi), rtol=1e-10)
    atoms = tr.weierstrass(core.AtomicMeasureRow([0.0, 1.0], [1.0, 2.0]))
    gaussian = lambda t: np.exp(-0.5 * t ** 2) / np.sqrt(2.0 * np.pi)
    assert np.allclose(atoms(y), gaussian(y) + 2.0 * gaussian(y - 1.0))


def test_mellin_convolution_of_two_exponentials():
    y = np.array([0.5, 1.0, 3.0])
    F = tr.mellin_convolve(exponential(), exponential())
    assert np.allclose(F(y), 2.0 * kv(0, 2.0 * np.sqrt(y)), rtol=1e-8)
    assert F(np.array([-1.0]))[0] == 0.0


def test_mellin_convolution_with_atoms():
    y = np.array([0.5, 2.0])
    F = tr.mellin_convolve(core.AtomicMeasureRow([2.0], [1.0]), exponential())
    assert np.allclose(F(y), 0.5 * np.exp(-0.5 * y))
    with pytest.raises(PreconditionError):
        tr.mellin_convolve(core.AtomicMeasureRow([1.0], [1.0]), core.AtomicMeasureRow([2.0], [1.0]))
    with pytest.raises(PreconditionError):
        tr.mellin_convolve(core.AtomicMeasureRow([-1.0], [1.0]), exponential())
    gaussian = WeightedFunction(lambda x: np.exp(-np.asarray(x) ** 2), core.REAL_LINE, (-6.0, 6.0))
    with pytest.raises(PreconditionError):
        tr.mellin_convolve(gaussian, exponential())


def test_exchange_identity():
    q = WeightedFunction(lambda x: np.asarray(x) * np.exp(-np.asarray(x)), core.HALF_LINE, (0.0, 48.0))
    left, right = tr.exchange_identity([1.0, 0.0, 1.0], q, tr.ginibre(1))
    assert right == pytest.approx(7.0, rel=1e-10)
    assert left == pytest.approx(right, rel=1e-8)
    left, right = tr.exchange_identity([1.0, 0.0, 1.0], core.AtomicMeasureRow([1.0, 3.0], [0.5, 0.5]), tr.ginibre(1))
    assert right == pytest.approx(6.0)
    assert left == pytest.approx(right, rel=1e-8)


@pytest.mark.parametrize("system, spec", [(core.laguerre_ensemble(3, 0)[1], tr.ginibre(1)),
                                          (core.gue_ensemble(3)[1], tr.gue_add()),
                                          (core.jacobi_ensemble(2, 1, 5)[1], tr.truncated(0, 2))])
def test_transformed_systems_stay_biorthogonal(system, spec):
    transformed = tr.transform_system(system, spec)
    off, diag = core.gram_defect(transformed.gram())
    assert off < 1e-8 and diag < 1e-8
    assert poly.is_monic(transformed.char_poly, 1e-12)
    assert transformed.descriptor["transform"] == spec.to_dict()


def test_transforms_check_the_support():
    with pytest.raises(PreconditionError):
        tr.transform_system(core.laguerre_ensemble(2)[1], tr.gue_add())
    with pytest.raises(PreconditionError):
        tr.transform_system(core.gue_ensemble(2)[1], tr.ginibre(0))
    with pytest.raises(PreconditionError):
        tr.transform_kernel(gue_christoffel_darboux(2), tr.gue_add())


def test_gue_addition_rescales_the_kernel():
    n = 3
    scaled = gue_christoffel_darboux(n)
    x = np.linspace(-4.0, 4.0, 9)
    expected = scaled.matrix(x / np.sqrt(2.0), x / np.sqrt(2.0)) / np.sqrt(2.0)
    summed = kernel_from_system(tr.transform_system(core.gue_ensemble(n)[1], tr.gue_add()))
    assert np.allclose(summed.matrix(x, x), expected, atol=1e-9)
    routed = tr.transform_kernel(kernel_from_system(core.gue_ensemble(n)[1]), tr.gue_add())
    assert np.allclose(routed.density(x), np.diag(expected), atol=1e-8)


def test_atomic_kernel_transform_keeps_the_trace():
    kernel = tr.transform_kernel(AtomicKernel(core.degenerate_ensemble([1.0, 2.0])), tr.ginibre(0))
    assert kernel.support == core.HALF_LINE
    assert kernel.trace() == pytest.approx(2.0, rel=1e-6)


@settings(max_examples=16, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3))
def test_ginibre_on_identity_gives_laguerre(n, nu):
    p = tr.avg_char_poly_transformed(poly.poly_from_roots(np.ones(n)), tr.ginibre(nu))
    expected = poly.laguerre_monic(n, nu).coef
    assert np.allclose(p.coef, expected, rtol=1e-8, atol=1e-8 * np.max(np.abs(expected)))


@pytest.mark.parametrize("n, nu, mu", [(2, 0, 2), (2, 1, 3), (3, 0, 4)])
def test_truncation_of_identity_gives_jacobi(n, nu, mu):
    p = tr.avg_char_poly_transformed(poly.poly_from_roots(np.ones(n)), tr.truncated(nu, mu))
    assert np.allclose(p.coef, poly.jacobi01_monic(n, nu, mu - n).coef, atol=1e-9)


def test_average_char_poly_transforms():
    assert np.allclose(tr.avg_char_poly_transformed(poly.hermite_monic(2), tr.gue_add()).coef, [-2.0, 0.0, 1.0])
    assert np.allclose(tr.avg_char_poly_transformed(poly.laguerre_monic(2), tr.ginibre(1)).coef, [12.0, -12.0, 1.0])
    with pytest.raises(PreconditionError):
        tr.avg_char_poly_transformed([1.0, 2.0], tr.ginibre(0))


def test_chain_transforms():
    chain = tr.chain_transforms([tr.ginibre(0), tr.ginibre(1)])
    iterated = tr.iterated_spec(tr.GINIBRE, [0, 1])
    assert np.allclose(chain.b.values(5), iterated.b.values(5))
    t = np.array([0.5, 2.0, 5.0])
    assert np.allclose(chain.phi(t), iterated.phi(t), rtol=1e-7)
    assert chain.extras["chain"] == ["ginibre(0)", "ginibre(1)"]
    with pytest.raises(ConfigError):
        tr.chain_transforms([tr.ginibre(0), tr.gue_add()])
    with pytest.raises(ConfigError):
        tr.chain_transforms([])
    with pytest.raises(ConfigError):
        chain.to_dict()


@pytest.mark.parametrize("descriptor", [{"kind": "gue-add"}, {"kind": "ginibre", "nu": 2},
                                        {"kind": "truncated", "nu": 0, "mu": 3},
                                        {"kind": "iterated", "family": "ginibre", "nu": [0, 1]},
                                        {"kind": "iterated", "family": "truncated", "nu": [0, 1], "mu": [1, 2]}])
def test_transform_descriptors(descriptor):
    assert tr.TransformSpec.from_dict(descriptor).to_dict() == descriptor


@pytest.mark.parametrize("descriptor", [{"kind": "rotation"}, {"kind": "truncated", "nu": 0},
                                        {"kind": "truncated", "nu": 0, "mu": 0}, {"kind": "ginibre", "nu": -1},
                                        {"kind": "iterated", "family": "truncated", "nu": [0]},
                                        {"kind": "iterated", "family": "circular", "nu": [0]},
                                        {"kind": "iterated", "nu": [0]}])
def test_invalid_transform_descriptors(descriptor):
    with pytest.raises(ConfigError):
        tr.TransformSpec.from_dict(descriptor)


def test_transformed_density_keeps_masses():
    ensemble, _ = core.laguerre_ensemble(2, 0)
    transformed = tr.transformed_density(ensemble, tr.ginibre(0))
    assert transformed.support == core.HALF_LINE
    assert np.allclose(transformed.moment_matrix(0), [[1.0, 1.0]], rtol=1e-6)
    with pytest.raises(PreconditionError):
        transformed.joint_density([1.0, 2.0])
