import numpy as np
import pytest

from polyensemble_toolkit.ensembles import closed_kernels as ck
from polyensemble_toolkit.ensembles import core
from polyensemble_toolkit.ensembles import transforms as tr
from polyensemble_toolkit.ensembles.kernels import AtomicKernel, correlation_function, kernel_from_system
from polyensemble_toolkit.utils.errors import ConfigError, ContourError, PreconditionError


def test_product_spec():
    spec = ck.ProductSpec(ck.TRUNCATED_PRODUCT, 3, [0, 1], [1, 1])
    assert spec.r == 2 and spec.d == 1
    assert ck.ProductSpec.from_dict(spec.to_dict()) == spec
    assert "mu" not in ck.ProductSpec(ck.GINIBRE_PRODUCT, 2, [0]).to_dict()


@pytest.mark.parametrize("descriptor", [{"kind": "circular-product", "n": 2, "nu": [0]},
                                        {"kind": ck.GINIBRE_PRODUCT, "n": 0, "nu": [0]},
                                        {"kind": ck.GINIBRE_PRODUCT, "n": 2, "nu": []},
                                        {"kind": ck.TRUNCATED_PRODUCT, "n": 2, "nu": [0, 0], "mu": [1]},
                                        {"kind": ck.GINIBRE_PRODUCT, "nu": [0]}])
def test_invalid_product_specs(descriptor):
    with pytest.raises(ConfigError):
        ck.ProductSpec.from_dict(descriptor)


def test_wishart_kernel():
    assert ck.wishart_kernel(1, 0).density(np.array([1.0]))[0] == pytest.approx(np.exp(-1.0), rel=1e-10)
    x = np.array([0.5, 2.0, 6.0])
    laguerre = kernel_from_system(core.laguerre_ensemble(3, 1)[1])
    assert np.allclose(ck.wishart_kernel(3, 1).matrix(x, x), laguerre.matrix(x, x), atol=1e-9)
    assert ck.wishart_kernel(2).quadrature_error(x) < 1e-10


def test_colliding_contours():
    with pytest.raises(ContourError):
        ck.WishartKernel(1, 0, radius=0.5)


def test_single_factor_product_is_wishart():
    y = np.array([0.5, 1.0, 3.0])
    assert np.allclose(ck.product_ginibre_kernel(1, [0]).density(y), np.exp(-y), rtol=1e-7)
    assert np.allclose(ck.product_ginibre_kernel(2, [1]).density(y), ck.wishart_kernel(2, 1).density(y), rtol=1e-7)


def test_degenerate_ginibre_kernel():
    y = np.array([0.5, 1.5, 4.0])
    assert np.allclose(ck.degenerate_ginibre_kernel([2.0], [0]).density(y), 0.5 * np.exp(-0.5 * y), rtol=1e-8)
    routed = tr.transform_kernel(AtomicKernel(core.degenerate_ensemble([1.0, 2.0])), tr.ginibre(0))
    assert np.allclose(ck.degenerate_ginibre_kernel([1.0, 2.0], [0]).density(y), routed.density(y), rtol=1e-7)
    with pytest.raises(PreconditionError):
        ck.degenerate_ginibre_kernel([0.0, 1.0], [0])


def test_alternative_product_form():
    y = np.array([0.3, 1.0, 2.5])
    assert np.allclose(ck.alternative_product_ginibre_kernel(2, [0, 1]).density(y),
                       ck.product_ginibre_kernel(2, [0, 1]).density(y), rtol=1e-6)


def assertSameCorrelations(kernel, reference, points, rtol=1e-6):
    for k in range(2, points.shape[1] + 1):
        expected = correlation_function(reference, points[:, :k])
        assert np.all(expected > 0.0)
        assert np.allclose(correlation_function(kernel, points[:, :k]), expected, rtol=rtol, atol=0.0)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("nus", [(0, 0), (1, 2)])
def test_product_ginibre_routes_agree(n, nus):
    points = np.array([[0.4, 1.3, 3.0], [0.15, 0.8, 2.2], [0.6, 1.9, 4.5]])[:, :n]
    product = ck.product_ginibre_kernel(n, nus)
    routed = tr.transform_kernel(kernel_from_system(core.laguerre_ensemble(n, nus[0])[1]), tr.ginibre(nus[1]))
    assertSameCorrelations(ck.alternative_product_ginibre_kernel(n, nus), product, points)
    assertSameCorrelations(routed, product, points)


@pytest.mark.slow
def test_product_ginibre_trace():
    assert ck.product_ginibre_kernel(2, [0, 0]).trace() == pytest.approx(2.0, rel=1e-5)


def test_truncated_polynomials():
    assert ck.truncated_p(1, [0], [1]) == [-1, 2]
    assert ck.truncated_p(2, [0], [2]) == [2, -12, 12]
    system = ck.truncated_product_system(2, [0], [2])
    assert np.allclose(system.P[1].coef, [-2.0, 6.0])
    assert np.allclose(system.char_poly.coef, [1.0 / 6.0, -1.0, 1.0])


@pytest.mark.parametrize("form", ["double-contour", "g-product-integral"])
def test_truncated_single_point_is_uniform(form):
    kernel = ck.truncated_product_kernel(1, [0], [1], form=form)
    assert np.allclose(kernel.density(np.array([0.2, 0.7])), 1.0, atol=1e-8)


def test_truncated_forms_agree():
    x = np.array([0.1, 0.4, 0.8])
    contour = ck.truncated_product_kernel(2, [0, 0], [1, 1])
    integral = ck.truncated_product_kernel(2, [0, 0], [1, 1], form="g-product-integral")
    assert np.allclose(contour.density(x), integral.density(x), rtol=1e-6)
    assert contour.trace() == pytest.approx(2.0, rel=1e-5)


def test_truncated_product_routes_agree():
    n, nus, mus = 3, (0, 1), (2, 2)
    points = np.array([[0.15, 0.45, 0.8], [0.05, 0.3, 0.6], [0.25, 0.55, 0.9]])
    contour = ck.truncated_product_kernel(n, nus, mus)
    assertSameCorrelations(ck.truncated_product_kernel(n, nus, mus, form="g-product-integral"), contour, points)
    assertSameCorrelations(kernel_from_system(ck.truncated_product_system(n, nus, mus)), contour, points)


@pytest.mark.parametrize("n, nu, mu", [(2, 1, 2), (2, 0, 3), (3, 1, 3)])
def test_single_truncation_is_jacobi(n, nu, mu):
    points = np.array([[0.1, 0.5, 0.85], [0.3, 0.6, 0.95], [0.02, 0.25, 0.7]])[:, :n]
    system = core.jacobi_ensemble(n, nu, n + nu + mu)[1]
    assertSameCorrelations(ck.truncated_product_kernel(n, [nu], [mu]), kernel_from_system(system), points)
    coef = np.array(ck.truncated_p(n, [nu], [mu]), dtype=float)
    assert np.allclose(system.char_poly.coef, coef / coef[-1], rtol=1e-10)


def test_truncated_kernel_errors():
    with pytest.raises(PreconditionError):
        ck.truncated_product_kernel(3, [0], [1])
    with pytest.raises(PreconditionError):
        ck.truncated_product_kernel(2, [0, 0], [1])
    with pytest.raises(ConfigError):
        ck.truncated_product_kernel(1, [0], [1], form="series")


@pytest.mark.parametrize("n, nus, mus, d", [(2, (0,), (1,), 1), (3, (0, 0), (1, 1), 1), (3, (0, 1), (1, 1), 1),
                                            (2, (0, 0), (1, 1), 0)])
def test_rank_at_one(rng, n, nus, mus, d):
    report = ck.rank_at_one_check(n, nus, mus, 50, rng)
    assert report.d == d
    assert report.passed
    assert report.minimum >= d
    assert report.to_dict()["trials"] == 50


def test_truncation_chain(rng):
    Y = ck.truncation_chain(3, (1, 0), (1, 2), 4, rng)
    assert Y.shape == (4, 3, 3)
    assert np.all(np.linalg.svd(Y, compute_uv=False) <= 1.0 + 1e-12)
    with pytest.raises(ConfigError):
        ck.truncation_chain(2, (2, 0), (1, 1), 4, rng)
    with pytest.raises(ConfigError):
        ck.rank_at_one_check(2, (0, 0), (1,), 4, rng)


@pytest.mark.slow
@pytest.mark.parametrize("n, nus, mus, d", [(3, (0,), (1,), 2), (4, (1, 0), (1, 1), 2), (3, (0, 0), (1, 1), 1),
                                            (2, (1,), (1,), 1)])
def test_rank_at_one_full_trials(rng, n, nus, mus, d):
    report = ck.rank_at_one_check(n, nus, mus, 1000, rng)
    assert report.d == d
    assert report.to_dict()["trials"] == 1000
    assert report.minimum >= d
    assert report.passed
