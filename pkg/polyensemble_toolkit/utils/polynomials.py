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


from fractions import Fraction
from math import comb, factorial

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import hermite_e
from numpy.polynomial import polynomial as P
from scipy.special import gammaln

from polyensemble_toolkit.utils.errors import PreconditionError


def as_polynomial(p):
    """Coefficient list (index j multiplies x^j) or Polynomial -> trimmed Polynomial."""
    if isinstance(p, Polynomial):
        coef = p.coef
    else:
        coef = np.atleast_1d(np.asarray(p))
    if not np.iscomplexobj(coef):
        coef = coef.astype(float)
    nonzero = np.nonzero(coef)[0]
    coef = coef[:nonzero[-1] + 1] if nonzero.size else coef[:1] * 0
    return Polynomial(coef)


def leading_coefficient(p):
    return as_polynomial(p).coef[-1]


def is_monic(p, tol=0.0):
    return abs(leading_coefficient(p) - 1.0) <= tol


def naive_eval(p, x):
    """Power-sum evaluation, reference for Horner."""
    x = np.asarray(x)
    return sum(c * x ** j for j, c in enumerate(as_polynomial(p).coef))


# ----- Classical families -----
def hermite_monic(k):
    """Probabilists' Hermite He_k, orthogonal for e^{-x^2/2} on the real line."""
    if k < 0:
        raise ValueError("Degree must be nonnegative")
    return Polynomial(hermite_e.herme2poly([0] * k + [1]))


def hermite_norm(k):
    return np.sqrt(2.0 * np.pi) * factorial(k)


def laguerre_monic(k, nu=0):
    """Monic Laguerre polynomial for the weight x^nu e^{-x} on [0, inf)."""
    if k < 0 or nu < 0:
        raise ValueError("Degree and nu must be nonnegative")
    coef = [(-1) ** (k - j) * (factorial(k) // factorial(j)) * comb(k + nu, k - j)
            for j in range(k + 1)]
    return Polynomial(np.array(coef, dtype=float))


def laguerre_norm(k, nu=0):
    return float(factorial(k) * factorial(k + nu))


def _jacobi01_fractions(k, alpha, beta):
    # 2F1(-k, k+alpha+beta+1; alpha+1; x) made monic
    coef = []
    term = Fraction(1)
    for j in range(k + 1):
        coef.append(term)
        term = term * Fraction((j - k) * (k + alpha + beta + 1 + j), (alpha + 1 + j) * (j + 1))
    lead = coef[-1]
    return [c / lead for c in coef]


def jacobi01_monic(k, alpha=0, beta=0):
    """Monic polynomial orthogonal for x^alpha (1-x)^beta on [0, 1]."""
    if k < 0 or alpha < 0 or beta < 0:
        raise ValueError("Degree and exponents must be nonnegative")
    return Polynomial(np.array([float(c) for c in _jacobi01_fractions(k, alpha, beta)]))


def jacobi01_norm(k, alpha=0, beta=0):
    s = alpha + beta
    log_h = (gammaln(k + 1) + gammaln(k + alpha + 1) + gammaln(k + beta + 1) + gammaln(k + s + 1)
             - np.log(2 * k + s + 1) - 2.0 * gammaln(2 * k + s + 1))
    return float(np.exp(log_h))


# ----- Node based constructions -----
def poly_from_roots(roots):
    roots = np.asarray(roots, dtype=float).ravel()
    if roots.size == 0:
        return Polynomial([1.0])
    coef = P.polyfromroots(roots)
    coef[-1] = 1.0
    return Polynomial(coef)


def check_distinct(nodes, tol=1e-12):
    nodes = np.asarray(nodes, dtype=float).ravel()
    if nodes.size == 0:
        raise PreconditionError("At least one node is needed")
    gaps = np.abs(nodes[:, None] - nodes[None, :]) + np.eye(nodes.size) * np.inf
    scale = max(1.0, np.max(np.abs(nodes)))
    if np.min(gaps) <= tol * scale:
        raise PreconditionError("Nodes must be distinct, got %s" % nodes.tolist())
    return nodes


def lagrange_basis(nodes):
    nodes = check_distinct(nodes)
    basis = []
    for k, a_k in enumerate(nodes):
        others = np.delete(nodes, k)
        numerator = poly_from_roots(others)
        basis.append(numerator / np.prod(a_k - others))
    return basis


# ----- Weighted functions -----
class WeightedFunction:
    """
    Real function with a support interval.

    ``extent`` is the interval outside of which the function is numerically
    negligible; quadrature builders integrate over it. ``evaluator`` may also
    accept complex arguments, in which case no support masking is applied.
    """

    def __init__(self, evaluator, support=(-np.inf, np.inf), extent=None, tag=""):
        self.evaluator = evaluator
        self.support = (float(support[0]), float(support[1]))
        if extent is None:
            extent = support
        self.extent = (max(float(extent[0]), self.support[0]),
                       min(float(extent[1]), self.support[1]))
        self.tag = tag

    def __call__(self, x):
        x = np.asarray(x)
        if np.iscomplexobj(x):
            return self.evaluator(x)
        lo, hi = self.support
        inside = (x >= lo) & (x <= hi)
        safe = np.where(inside, x, self._interiorPoint())
        values = np.asarray(self.evaluator(safe))
        return np.where(inside, values, 0.0)

    def _interiorPoint(self):
        lo, hi = self.support
        if np.isfinite(lo) and np.isfinite(hi):
            return 0.5 * (lo + hi)
        if np.isfinite(lo):
            return lo + 1.0
        if np.isfinite(hi):
            return hi - 1.0
        return 0.0

    def scaled(self, factor, tag=None):
        return WeightedFunction(lambda x: factor * self.evaluator(x), self.support, self.extent,
                                tag or self.tag)

    def __repr__(self):
        return "WeightedFunction(%s, support=%s)" % (self.tag, self.support)


def polynomial_times(p, weight, support, extent=None, tag=""):
    """WeightedFunction for p(x)·weight(x)."""
    p = as_polynomial(p)
    return WeightedFunction(lambda x: p(x) * weight(x), support, extent, tag)
