import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import ks_2samp

from polyensemble_toolkit.utils.random_matrices import (EIGENVALUES, SQUARED_SINGULAR_VALUES, SpectrumSample,
                                                        eigenvalues_hermitian, eigenvalues_hermitian_batch,
                                                        ginibre_batch, gue_batch,
                                                        haar_unitary_batch, sample_ginibre, sample_gue,
                                                        sample_haar_unitary, spawnGenerators,
                                                        squared_singular_values, squared_singular_values_batch,
                                                        truncate)


def test_gue_is_hermitian_with_unit_diagonal_variance(rng):
    H = gue_batch(3, 4000, rng)
    assert np.allclose(H, np.conj(np.swapaxes(H, -1, -2)))
    diagonal = np.real(np.diagonal(H, axis1=-2, axis2=-1)).ravel()
    assert abs(diagonal.var() - 1.0) < 0.06
    off = H[:, 0, 1]
    assert abs(off.real.var() - 0.5) < 0.04
    assert abs(off.imag.var() - 0.5) < 0.04


def test_ginibre_entries_have_unit_second_moment(rng):
    G = ginibre_batch(4, 3, 3000, rng)
    assert G.shape == (3000, 4, 3)
    assert abs(np.mean(np.abs(G) ** 2) - 1.0) < 0.02


def test_haar_unitary_is_unitary_and_uniform(rng):
    U = haar_unitary_batch(3, 4000, rng)
    eye = np.eye(3)
    assert np.allclose(U @ np.conj(np.swapaxes(U, -1, -2)), eye, atol=1e-12)
    assert abs(np.mean(np.abs(U[:, 0, 0]) ** 2) - 1.0 / 3.0) < 0.02
    # phase fixing leaves the diagonal phases uniform
    assert abs(np.mean(U[:, 0, 0])) < 0.03


def test_single_draw_shapes(rng):
    assert sample_gue(2, rng).shape == (2, 2)
    assert sample_ginibre(3, 2, rng).shape == (3, 2)
    assert sample_haar_unitary(4, rng).shape == (4, 4)


def test_spectrum_sample_sorts_and_validates():
    sample = SpectrumSample([3.0, 1.0, 2.0])
    assert np.array_equal(sample.points, [1.0, 2.0, 3.0])
    assert len(sample) == 3
    assert SpectrumSample([-1.0, 1.0], EIGENVALUES).points[0] == -1.0
    with pytest.raises(ValueError):
        SpectrumSample([-1.0, 1.0], SQUARED_SINGULAR_VALUES)
    with pytest.raises(ValueError):
        SpectrumSample([1.0], "moments")


def test_squared_singular_values_of_diagonal():
    sample = squared_singular_values(np.diag([2.0, 1.0]))
    assert np.allclose(sample.points, [1.0, 4.0])
    assert sample.kind == SQUARED_SINGULAR_VALUES


def test_eigenvalues_hermitian_checks_hermiticity():
    sample = eigenvalues_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(sample.points, [-1.0, 1.0])
    with pytest.raises(ValueError):
        eigenvalues_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        eigenvalues_hermitian(np.ones((2, 3)))


def test_truncate_takes_leading_block():
    U = np.arange(16.0).reshape(4, 4)
    assert np.array_equal(truncate(U, 2, 3), U[:2, :3])
    with pytest.raises(ValueError):
        truncate(U, 5, 1)
    with pytest.raises(ValueError):
        truncate(U, 0, 1)


def test_spawned_generators_are_reproducible():
    first = [g.standard_normal(3) for g in spawnGenerators(7, 2)]
    second = [g.standard_normal(3) for g in spawnGenerators(7, 2)]
    assert np.array_equal(first[0], second[0]) and np.array_equal(first[1], second[1])
    assert not np.array_equal(first[0], first[1])


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_squared_singular_values_sum_to_frobenius_norm(rows, cols, seed):
    X = sample_ginibre(rows, cols, np.random.default_rng(seed))
    single = squared_singular_values(X).points
    batch = squared_singular_values_batch(X[None])[0]
    assert single.size == min(rows, cols)
    assert np.isclose(single.sum(), np.sum(np.abs(X) ** 2))
    assert np.allclose(single, batch)


def test_gue_is_unitarily_invariant(rng):
    H = gue_batch(3, 5000, rng)
    W = haar_unitary_batch(3, 5000, rng)
    rotated = W @ H @ np.conj(np.swapaxes(W, -1, -2))
    assert np.allclose(eigenvalues_hermitian_batch(rotated), eigenvalues_hermitian_batch(H), atol=1e-10)
    fresh = gue_batch(3, 5000, rng)
    assert ks_2samp(np.real(rotated[:, 0, 0]), np.real(fresh[:, 0, 0])).pvalue > 1e-3
    assert ks_2samp(np.real(rotated[:, 0, 2]), np.real(fresh[:, 0, 2])).pvalue > 1e-3
    assert ks_2samp(eigenvalues_hermitian_batch(rotated)[:, -1],
                    eigenvalues_hermitian_batch(fresh)[:, -1]).pvalue > 1e-3


@pytest.mark.parametrize("n", [1, 2])
def test_gue_trace_of_square(rng, n):
    H = gue_batch(n, 20000, rng)
    traces = np.real(np.einsum("kij,kji->k", H, H))
    # tr H^2 has variance 2n^2 here
    assert abs(traces.mean() - n * n) < 5.0 * n * np.sqrt(2.0 / traces.size)
    diagonal = np.real(np.diagonal(H, axis1=-2, axis2=-1)).ravel()
    assert abs(diagonal.var() - 1.0) < 0.05


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_squared_singular_values_survive_unitary_rotations(rows, cols, seed):
    rng = np.random.default_rng(seed)
    X = sample_ginibre(rows, cols, rng)
    U, V = sample_haar_unitary(rows, rng), sample_haar_unitary(cols, rng)
    assert np.allclose(squared_singular_values(U @ X @ V).points, squared_singular_values(X).points,
                       rtol=1e-10, atol=1e-12)


def test_ginibre_is_invariant_under_haar_rotation(rng):
    X = ginibre_batch(2, 2, 5000, rng)
    rotated = haar_unitary_batch(2, 5000, rng) @ X
    fresh = ginibre_batch(2, 2, 5000, rng)
    assert ks_2samp(np.abs(rotated[:, 0, 0]) ** 2, np.abs(fresh[:, 0, 0]) ** 2).pvalue > 1e-3


@pytest.mark.parametrize("draw", [
    lambda rng: gue_batch(3, 10, rng),
    lambda rng: ginibre_batch(3, 2, 10, rng),
    lambda rng: haar_unitary_batch(4, 10, rng),
])
def test_same_seed_gives_identical_matrices(draw):
    first = draw(np.random.default_rng(123))
    second = draw(np.random.default_rng(123))
    assert first.tobytes() == second.tobytes()
    assert not np.array_equal(first, draw(np.random.default_rng(124)))
