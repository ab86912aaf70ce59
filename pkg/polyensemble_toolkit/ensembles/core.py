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


"""
Polynomial ensembles and their biorthogonal systems.

An ensemble on n particles is (1/Z_n) Δ_n(x) det[f_{k-1}(x_j)]. A
biorthogonal system P_k, Q_k (∫ P_j Q_k = δ_jk) gives its correlation kernel
Σ P_j(x) Q_j(y). Dual rows can be atomic (finite sums of point masses); they
are kept exact and only ever integrated against other functions.
"""

import logging
from math import factorial

import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import solve_triangular

from polyensemble_toolkit.utils import polynomials as poly
from polyensemble_toolkit.utils import quadrature as quad
from polyensemble_toolkit.utils.errors import ConfigError, PreconditionError
from polyensemble_toolkit.utils.polynomials import WeightedFunction


logger = logging.getLogger(__name__)

REAL_LINE = (-np.inf, np.inf)
HALF_LINE = (0.0, np.inf)
UNIT_INTERVAL = (0.0, 1.0)


class AtomicMeasureRow:
    """Σ_i w_i δ_{a_i}."""

    def __init__(self, atoms, weights):
        self.atoms = np.asarray(atoms, dtype=float).ravel()
        self.weights = np.asarray(weights, dtype=float).ravel()
        if self.atoms.size != self.weights.size:
            raise PreconditionError("Atom locations and weights differ in length")
        if np.unique(self.atoms).size != self.atoms.size:
            raise PreconditionError("Atom locations must be distinct")
        if not np.all(np.isfinite(self.weights)):
            raise PreconditionError("Atom weights must be finite")

    def integrate(self, g):
        """∫ g dQ for a function g."""
        return np.sum(self.weights * np.asarray(g(self.atoms)))

    def __repr__(self):
        return "AtomicMeasureRow(%s)" % list(zip(self.atoms.tolist(), self.weights.tolist()))


def integration_rule(support, extent, nodes=16):
    """Composite rule suited to functions living on ``support`` (numerically on ``extent``)."""
    lo, hi = extent
    if support[0] == 0.0 and support[1] == 1.0:
        return quad.graded_interval(0.0, 1.0, levels=40, nodes=nodes, toward="both")
    if support[0] == 0.0 and not np.isfinite(support[1]):
        return quad.graded_half_line(extent=hi, nodes=max(nodes, 24))
    if np.isfinite(lo) and np.isfinite(hi):
        return quad.uniform_interval(lo, hi, panel=max((hi - lo) / 64.0, 0.25), nodes=nodes)
    raise PreconditionError("Cannot integrate over an unbounded extent %s" % (extent,))


class BiorthogonalSystem:

    def __init__(self, P, Q, support, extent=None, char_poly=None, variant="monic",
                 descriptor=None):
        if len(P) != len(Q):
            raise PreconditionError("P and Q lists differ in length (%d vs %d)" % (len(P), len(Q)))
        if len(P) == 0:
            raise PreconditionError("Empty biorthogonal system")
        self.P = [poly.as_polynomial(p) for p in P]
        self.Q = list(Q)
        self.support = (float(support[0]), float(support[1]))
        if extent is None:
            extents = [q.extent for q in self.Q if isinstance(q, WeightedFunction)]
            extent = (min(e[0] for e in extents), max(e[1] for e in extents)) if extents \
                else self.support
        self.extent = (float(extent[0]), float(extent[1]))
        self.char_poly = None if char_poly is None else poly.as_polynomial(char_poly)
        self.variant = variant
        self.descriptor = descriptor or {}

    @property
    def n(self):
        return len(self.P)

    @property
    def is_atomic(self):
        return any(isinstance(q, AtomicMeasureRow) for q in self.Q)

    def rule(self, nodes=16):
        return integration_rule(self.support, self.extent, nodes)

    def gram(self, rule=None):
        """G_jk = ∫ P_j Q_k."""
        n = self.n
        G = np.zeros((n, n))
        if rule is None and not all(isinstance(q, AtomicMeasureRow) for q in self.Q):
            rule = self.rule()
        if not self.is_atomic:
            x = rule.nodes
            Pv = np.array([p(x) for p in self.P])
            Qv = np.array([q(x) for q in self.Q])
            return np.real((Pv * rule.weights[None, :]) @ Qv.T)
        for k, q in enumerate(self.Q):
            for j, p in enumerate(self.P):
                G[j, k] = q.integrate(p) if isinstance(q, AtomicMeasureRow) \
                    else np.sum(rule.weights * p(rule.nodes) * q(rule.nodes))
        return G

    def __repr__(self):
        return "BiorthogonalSystem(n=%d, variant=%s, %s)" % (self.n, self.variant, self.descriptor)


def gram_defect(G):
    """(max |off-diagonal|, max |diagonal - 1|)."""
    G = np.asarray(G)
    off = G - np.diag(np.diag(G))
    return float(np.max(np.abs(off))), float(np.max(np.abs(np.diag(G) - 1.0)))


class PolynomialEnsemble:

    def __init__(self, f, support, extent=None, normalization=None, descriptor=None):
        self.f = list(f)
        self.support = (float(support[0]), float(support[1]))
        self.extent = extent if extent is not None else \
            (min(g.extent[0] for g in self.f), max(g.extent[1] for g in self.f))
        self.normalization = normalization
        self.descriptor = descriptor or {}

    @property
    def n(self):
        return len(self.f)

    def rule(self, nodes=16):
        return integration_rule(self.support, self.extent, nodes)

    def moment_matrix(self, degree=None, rule=None):
        """M_ji = ∫ x^j f_i(x) dx for j = 0..degree."""
        degree = self.n if degree is None else degree
        rule = rule or self.rule()
        x = rule.nodes
        powers = np.vander(x, degree + 1, increasing=True).T
        F = np.array([g(x) for g in self.f])
        return (powers * rule.weights[None, :]) @ F.T

    def check_nondegenerate(self, rule=None, cond_limit=1e13):
        M = self.moment_matrix(self.n - 1, rule)
        for k in range(1, self.n + 1):
            if np.linalg.cond(M[:k, :k]) > cond_limit:
                raise PreconditionError(
                    "Monic biorthogonal system does not exist: leading %dx%d moment minor is "
                    "singular" % (k, k))
        return True

    def joint_density(self, x):
        """(1/Z_n) Δ_n(x) det[f_{k-1}(x_j)] for the configuration x."""
        if self.normalization is None:
            raise PreconditionError("Normalization constant is unknown for this ensemble")
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.n:
            raise PreconditionError("Configuration has %d points, ensemble has %d" % (x.size, self.n))
        vandermonde = np.prod([x[k] - x[j] for j in range(self.n) for k in range(j + 1, self.n)])
        F = np.array([[g(xj) for g in self.f] for xj in x])
        return vandermonde * np.linalg.det(F) / self.normalization


def biorthogonalize(ensemble, rule=None, cond_limit=1e13):
    """
    Monic biorthogonal system from the moment matrix.

    Returns the system and the average characteristic polynomial p_n, the
    monic polynomial of degree n orthogonal to every f_k.
    """
    n = ensemble.n
    M = ensemble.moment_matrix(n, rule)
    coefs = []
    for k in range(n + 1):
        if k == 0:
            coefs.append(np.array([1.0]))
            continue
        block = M[:k, :k]
        if np.linalg.cond(block) > cond_limit:
            raise PreconditionError("Monic biorthogonal system does not exist (degree %d)" % k)
        c = np.linalg.solve(block.T, -M[k, :k])
        coefs.append(np.concatenate([c, [1.0]]))
    P = [Polynomial(c) for c in coefs[:n]]
    B = np.array([[np.dot(c, M[:c.size, i]) for i in range(n)] for c in coefs[:n]])
    D = np.linalg.inv(B.T)
    f = ensemble.f

    def dual(row):
        return WeightedFunction(lambda x: sum(row[i] * f[i](x) for i in range(n)),
                                ensemble.support, ensemble.extent, tag="dual")

    Q = [dual(D[k]) for k in range(n)]
    system = BiorthogonalSystem(P, Q, ensemble.support, ensemble.extent, char_poly=coefs[n],
                                descriptor=dict(ensemble.descriptor, route="moments"))
    return system, Polynomial(coefs[n])


# ----- Classical ensembles -----
def _checkCount(n):
    if int(n) != n or n < 1:
        raise PreconditionError("Particle count must be a positive integer, got %s" % n)


def gue_extent(n):
    half = 10.0 + 2.0 * np.sqrt(n)
    return (-half, half)


def gue_ensemble(n):
    _checkCount(n)
    extent = gue_extent(n)
    gauss = lambda x: np.exp(-0.5 * np.asarray(x) ** 2)
    f = [poly.polynomial_times(Polynomial([0] * k + [1]), gauss, REAL_LINE, extent, "x^%d e^{-x^2/2}" % k)
         for k in range(n)]
    P = [poly.hermite_monic(k) for k in range(n)]
    Q = [poly.polynomial_times(P[k] / poly.hermite_norm(k), gauss, REAL_LINE, extent, "q_%d" % k)
         for k in range(n)]
    Z = (2.0 * np.pi) ** (0.5 * n) * np.prod([float(factorial(k)) for k in range(1, n + 1)])
    descriptor = {"family": "gue", "n": n}
    ensemble = PolynomialEnsemble(f, REAL_LINE, extent, Z, descriptor)
    system = BiorthogonalSystem(P, Q, REAL_LINE, extent, poly.hermite_monic(n), descriptor=descriptor)
    return ensemble, system


def laguerre_extent(n, nu):
    return (0.0, 48.0 + 4.0 * (n + nu))


def laguerre_ensemble(n, nu=0):
    _checkCount(n)
    if nu < 0:
        raise PreconditionError("nu must be nonnegative")
    extent = laguerre_extent(n, nu)
    weight = lambda x: np.asarray(x) ** nu * np.exp(-np.asarray(x))
    f = [poly.polynomial_times(Polynomial([0] * k + [1]), weight, HALF_LINE, extent,
                               "x^%d e^{-x}" % (nu + k)) for k in range(n)]
    P = [poly.laguerre_monic(k, nu) for k in range(n)]
    Q = [poly.polynomial_times(P[k] / poly.laguerre_norm(k, nu), weight, HALF_LINE, extent, "q_%d" % k)
         for k in range(n)]
    Z = float(np.prod([factorial(k) * factorial(k + nu - 1) for k in range(1, n + 1)]))
    descriptor = {"family": "laguerre", "n": n, "nu": nu}
    ensemble = PolynomialEnsemble(f, HALF_LINE, extent, Z, descriptor)
    system = BiorthogonalSystem(P, Q, HALF_LINE, extent, poly.laguerre_monic(n, nu),
                                descriptor=descriptor)
    return ensemble, system


def jacobi_ensemble(n, nu, m):
    """Squared singular values of the n x n block of an m x m Haar unitary (nu extra rows)."""
    _checkCount(n)
    mu = m - n - nu
    if nu < 0 or mu < n:
        raise PreconditionError(
            "Jacobi ensemble needs mu = m - n - nu >= n (got mu=%d, n=%d); for mu < n the squared "
            "singular values have deterministic atoms at 1" % (mu, n))
    alpha, beta = nu, mu - n
    weight = lambda x: np.asarray(x) ** alpha * (1.0 - np.asarray(x)) ** beta
    f = [poly.polynomial_times(Polynomial([0] * k + [1]), weight, UNIT_INTERVAL, None,
                               "x^%d (1-x)^%d" % (alpha + k, beta)) for k in range(n)]
    P = [poly.jacobi01_monic(k, alpha, beta) for k in range(n)]
    norms = [poly.jacobi01_norm(k, alpha, beta) for k in range(n)]
    Q = [poly.polynomial_times(P[k] / norms[k], weight, UNIT_INTERVAL, None, "q_%d" % k)
         for k in range(n)]
    Z = factorial(n) * float(np.prod(norms))
    descriptor = {"family": "jacobi", "n": n, "nu": nu, "m": m}
    ensemble = PolynomialEnsemble(f, UNIT_INTERVAL, UNIT_INTERVAL, Z, descriptor)
    system = BiorthogonalSystem(P, Q, UNIT_INTERVAL, UNIT_INTERVAL, poly.jacobi01_monic(n, alpha, beta),
                                descriptor=descriptor)
    return ensemble, system


def degenerate_ensemble(a, variant="monic", positive=True):
    """
    Limiting system for a fixed source with eigenvalues / squared singular values a.

    ``variant`` is "monic" (P_k = Π_{l<k}(x - a_l), Q_k atoms on a_0..a_k) or
    "lagrange" (P_k the Lagrange basis, Q_k = δ_{a_k}).
    """
    a = poly.check_distinct(a)
    if positive and np.any(a <= 0.0):
        raise PreconditionError("Squared singular values of the source must be positive")
    n = a.size
    support = HALF_LINE if positive else REAL_LINE
    if variant == "monic":
        P = [poly.poly_from_roots(a[:k]) for k in range(n)]
        M = np.array([[p(ai) for ai in a] for p in P])
        W = solve_triangular(M.T, np.eye(n), lower=True)
        Q = [AtomicMeasureRow(a[:k + 1], W[k, :k + 1]) for k in range(n)]
    elif variant == "lagrange":
        P = poly.lagrange_basis(a)
        Q = [AtomicMeasureRow([a[k]], [1.0]) for k in range(n)]
    else:
        raise ConfigError("Unknown degenerate variant: %s" % variant)
    descriptor = {"family": "degenerate", "a": a.tolist(), "variant": variant, "positive": positive}
    return BiorthogonalSystem(P, Q, support, (float(a.min()), float(a.max())),
                              poly.poly_from_roots(a), variant, descriptor)


def atomic_kernel_weights(system, x):
    """Weights c_i(x) with k_n(x, ·) = Σ_i c_i(x) δ_{a_i} for an atomic system."""
    atoms = np.unique(np.concatenate([q.atoms for q in system.Q]))
    x = np.asarray(x, dtype=float)
    weights = np.zeros(x.shape + (atoms.size,))
    for p, q in zip(system.P, system.Q):
        index = np.searchsorted(atoms, q.atoms)
        weights[..., index] += np.asarray(p(x))[..., None] * q.weights
    return atoms, weights


def average_char_poly_mc(samples, x_grid):
    """
    Monte Carlo estimate of E Π (x - x_j) with jackknife standard errors.

    ``samples`` is a list of SpectrumSample or an (N, n) array.
    """
    points = spectra_array(samples)
    N = points.shape[0]
    if N < 100:
        logger.warning("Average characteristic polynomial from only %d samples", N)
    x = np.atleast_1d(np.asarray(x_grid, dtype=float))
    values = np.prod(x[None, :, None] - points[:, None, :], axis=-1)
    estimate = values.mean(axis=0)
    if N == 1:
        return estimate, np.zeros_like(estimate)
    leave_one_out = (values.sum(axis=0)[None, :] - values) / (N - 1)
    spread = leave_one_out - leave_one_out.mean(axis=0)[None, :]
    stderr = np.sqrt((N - 1) / N * np.sum(spread ** 2, axis=0))
    return estimate, stderr


def spectra_array(samples):
    if isinstance(samples, np.ndarray):
        points = np.atleast_2d(samples)
    else:
        samples = list(samples)
        if not samples:
            raise ValueError("Empty sample list")
        points = np.array([s.points for s in samples])
    if points.size == 0:
        raise ValueError("Empty sample list")
    return points


def build_base_system(descriptor):
    """Base ensemble system from a JSON descriptor {"family": ..., parameters}."""
    family = descriptor.get("family")
    try:
        if family == "gue":
            return gue_ensemble(int(descriptor["n"]))[1]
        if family == "laguerre":
            return laguerre_ensemble(int(descriptor["n"]), int(descriptor.get("nu", 0)))[1]
        if family == "jacobi":
            return jacobi_ensemble(int(descriptor["n"]), int(descriptor.get("nu", 0)),
                                   int(descriptor["m"]))[1]
        if family == "degenerate":
            return degenerate_ensemble(descriptor["a"], descriptor.get("variant", "monic"),
                                       bool(descriptor.get("positive", True)))
    except KeyError as error:
        raise ConfigError("Ensemble descriptor %s misses %s" % (descriptor, error))
    raise ConfigError("Unknown ensemble family: %s" % family)
