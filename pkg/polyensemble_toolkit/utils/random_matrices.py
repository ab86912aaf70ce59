# **************************************************************************
# *

# * Authors:  David Herreros Calero (dherreros@cnb.csic.es)
# *
# * Unidad de  Bioinformatica of Centro Nacional de Biotecnologia , CSIC
# *
# * This program is free software; you can redistribute it and/or modify
# * it under the terms of the GNU General Public License as published by
# * the Free Software Foundation; either version 2 of the License, or
# * (at your option) any later version.
# *
# * This program is distributed in the hope that it will be useful,
# * but WITHOUT ANY WARRANTY; without even the implied warranty of
# * MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# * GNU General Public License for more details.
# *
# * You should have received a copy of the GNU General Public License
# * along with this program; if not, write to the Free Software
# * Foundation, Inc., 59 Temple Place, Suite 330, Boston, MA
# * 02111-1307  USA
# *
# *  All comments concerning this program package may be sent to the
# *  e-mail address 'scipion@cnb.csic.es'
# *
# **************************************************************************


import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh, svdvals


logger = logging.getLogger(__name__)

EIGENVALUES = "eigenvalues"
SQUARED_SINGULAR_VALUES = "squared-singular-values"


@dataclass(frozen=True)
class SpectrumSample:
    """Ascending spectrum of one sampled matrix."""
    points: np.ndarray
    kind: str = SQUARED_SINGULAR_VALUES

    def __post_init__(self):
        points = np.sort(np.asarray(self.points, dtype=float))
        if self.kind not in (EIGENVALUES, SQUARED_SINGULAR_VALUES):
            raise ValueError("Unknown spectrum kind: %s" % self.kind)
        if self.kind == SQUARED_SINGULAR_VALUES and points.size and points[0] < 0.0:
            raise ValueError("Squared singular values must be nonnegative")
        object.__setattr__(self, "points", points)

    def __len__(self):
        return self.points.size


def asComplexMatrix(X):
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError("Expected a matrix with at least one row and one column, got shape %s"
                         % (X.shape,))
    if not np.all(np.isfinite(X)):
        raise ValueError("Matrix has non-finite entries")
    return X


def _checkDims(*dims):
    for dim in dims:
        if int(dim) != dim or dim < 1:
            raise ValueError("Matrix dimensions must be positive integers, got %s" % (dims,))


# ----- Batched samplers (leading axis indexes independent draws) -----
def gue_batch(n, size, rng):
    _checkDims(n, size)
    A = rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))
    # (A + A^*)/2: diagonal N(0,1), off-diagonal real/imag parts of variance 1/2
    return 0.5 * (A + np.conj(np.swapaxes(A, -1, -2)))


def ginibre_batch(rows, cols, size, rng):
    _checkDims(rows, cols, size)
    return (rng.standard_normal((size, rows, cols))
            + 1j * rng.standard_normal((size, rows, cols))) / np.sqrt(2.0)


def haar_unitary_batch(m, size, rng):
    Z = ginibre_batch(m, m, size, rng)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=-2, axis2=-1)
    phases = d / np.abs(d)
    return Q * phases[:, None, :]


def squared_singular_values_batch(X):
    s = np.linalg.svd(X, compute_uv=False)
    return np.sort(s ** 2, axis=-1)


def eigenvalues_hermitian_batch(H):
    return np.linalg.eigvalsh(H)


# ----- Single draws -----
def sample_gue(n, rng):
    return gue_batch(n, 1, rng)[0]


def sample_ginibre(rows, cols, rng):
    return ginibre_batch(rows, cols, 1, rng)[0]


def sample_haar_unitary(m, rng):
    return haar_unitary_batch(m, 1, rng)[0]


def truncate(U, rows, cols):
    U = asComplexMatrix(U)
    _checkDims(rows, cols)
    if rows > U.shape[0] or cols > U.shape[1]:
        raise ValueError("Cannot take a %dx%d block of a %dx%d matrix" % (rows, cols, *U.shape))
    return U[:rows, :cols].copy()


def squared_singular_values(X):
    X = asComplexMatrix(X)
    values = np.clip(svdvals(X) ** 2, 0.0, None)
    return SpectrumSample(values, SQUARED_SINGULAR_VALUES)


def eigenvalues_hermitian(H, tol=1e-12):
    H = asComplexMatrix(H)
    if H.shape[0] != H.shape[1]:
        raise ValueError("Hermitian matrix must be square")
    scale = max(1.0, np.max(np.abs(H)))
    if np.max(np.abs(H - H.conj().T)) > tol * scale:
        raise ValueError("Matrix is not Hermitian within %g" % tol)
    return SpectrumSample(eigvalsh(H), EIGENVALUES)


def spawnGenerators(seed, count):
    """Independent generators derived deterministically from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]
