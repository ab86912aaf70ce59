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
Double contour integral kernels for Wishart, products of Ginibre matrices,
Ginibre products on a fixed source and products of truncated unitary
matrices.

All of them share the structure

    K(x, y) = sign / (2πi)^2 ∮_x du ∮_y dv  B(u; x) A(v; y) / (v - u)

so a grid K(x_i, y_j) is one product B @ C @ A^T with C = 1/(v - u)
tabulated once per kernel.
"""

import logging
from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np
from scipy.special import loggamma

from polyensemble_toolkit.ensembles.core import (BiorthogonalSystem, HALF_LINE, UNIT_INTERVAL,
                                                laguerre_extent)
from polyensemble_toolkit.ensembles.kernels import CorrelationKernel
from polyensemble_toolkit.ensembles.transforms import _ginibreParts
from polyensemble_toolkit.utils import quadrature as quad
from polyensemble_toolkit.utils.errors import ConfigError, ContourError, PreconditionError
from polyensemble_toolkit.utils.polynomials import WeightedFunction
from polyensemble_toolkit.utils.random_matrices import haar_unitary_batch
from polyensemble_toolkit.utils.special import MeijerGSpec, RationalMeijerG, phi_class


logger = logging.getLogger(__name__)

GINIBRE_PRODUCT = "ginibre-product"
TRUNCATED_PRODUCT = "truncated-product"
SMALLEST_ARGUMENT = 1e-16


@dataclass
class ProductSpec:
    kind: str
    n: int
    nu: tuple
    mu: tuple = ()
    source: dict = field(default_factory=lambda: {"kind": "identity"})

    def __post_init__(self):
        self.nu = tuple(int(v) for v in self.nu)
        self.mu = tuple(int(m) for m in self.mu)
        if self.kind not in (GINIBRE_PRODUCT, TRUNCATED_PRODUCT):
            raise ConfigError("Unknown product kind: %s" % self.kind)
        if self.n < 1 or not self.nu or min(self.nu) < 0:
            raise ConfigError("Products need n >= 1 and a nonempty list of nonnegative nu")
        if self.kind == TRUNCATED_PRODUCT:
            if len(self.mu) != len(self.nu) or min(self.mu) < 1:
                raise ConfigError("Truncated products need one mu >= 1 per factor")

    @property
    def r(self):
        return len(self.nu)

    @property
    def d(self):
        """n - Σ mu, the number of forced unit singular values when positive."""
        return self.n - sum(self.mu)

    def to_dict(self):
        out = {"kind": self.kind, "n": self.n, "nu": list(self.nu), "source": dict(self.source)}
        if self.mu:
            out["mu"] = list(self.mu)
        return out

    @classmethod
    def from_dict(cls, descriptor):
        try:
            return cls(descriptor["kind"], int(descriptor["n"]), descriptor["nu"],
                       descriptor.get("mu", ()), descriptor.get("source", {"kind": "identity"}))
        except KeyError as error:
            raise ConfigError("Product descriptor %s misses %s" % (descriptor, error))


class DoubleContourKernel(CorrelationKernel):
    """
    Subclasses provide the contours and the factors ``x_factor(u, x)`` and
    ``y_factor(v, y)``, each returning an (len(x), nodes) array.
    """

    def __init__(self, n, support, extent, x_contour, y_contour, sign=1.0, label="", chunk=256):
        super().__init__(n, support, extent, label=label)
        if x_contour.distance_to(y_contour) < 1e-8:
            raise ContourError("Contours %s and %s collide" % (x_contour.kind, y_contour.kind))
        self.x_contour = x_contour
        self.y_contour = y_contour
        self.sign = sign
        self.chunk = chunk
        u, v = x_contour.nodes, y_contour.nodes
        self._cauchy = (sign / (2j * np.pi) ** 2) * (x_contour.weights[:, None] * y_contour.weights[None, :]) \
            / (v[None, :] - u[:, None])

    def x_factor(self, u, x):
        raise NotImplementedError

    def y_factor(self, v, y):
        raise NotImplementedError

    def _clip(self, x):
        return np.maximum(np.asarray(x, dtype=float), SMALLEST_ARGUMENT)

    def evaluate(self, x, y):
        x, y = np.broadcast_arrays(x, y)
        flat_x, flat_y = self._clip(x.ravel()), self._clip(y.ravel())
        out = np.empty(flat_x.shape, dtype=complex)
        u, v = self.x_contour.nodes, self.y_contour.nodes
        for start in range(0, flat_x.size, self.chunk):
            stop = start + self.chunk
            left = self.x_factor(u, flat_x[start:stop]) @ self._cauchy
            out[start:stop] = np.sum(left * self.y_factor(v, flat_y[start:stop]), axis=1)
        return out.reshape(x.shape)

    def matrix(self, xs, ys):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        out = np.zeros((xs.size, ys.size))
        ix, iy = self._inside(xs), self._inside(ys)
        if np.any(ix) and np.any(iy):
            B = self.x_factor(self.x_contour.nodes, self._clip(xs[ix]))
            A = self.y_factor(self.y_contour.nodes, self._clip(ys[iy]))
            out[np.ix_(ix, iy)] = self._real(B @ self._cauchy @ A.T)
        return out

    def refined(self):
        """Same kernel on contours with doubled node counts."""
        raise NotImplementedError

    def quadrature_error(self, points):
        """max |K - K_refined| on the diagonal at the given points."""
        points = np.atleast_1d(np.asarray(points, dtype=float))
        return float(np.max(np.abs(self.density(points) - self.refined().density(points))))

    def diagnostics(self, points=None):
        out = super().diagnostics()
        out.update({"x_contour": repr(self.x_contour), "y_contour": repr(self.y_contour)})
        if points is not None:
            out["quadrature_error"] = self.quadrature_error(points)
        return out


def _logGammaSum(z, shifts):
    total = np.zeros(np.shape(z), dtype=complex)
    for s in shifts:
        total = total + loggamma(z + s)
    return total


def _logFalling(z, n):
    # log ∏_{k<n} (z - k)
    total = np.zeros(np.shape(z), dtype=complex)
    for k in range(n):
        total = total + np.log(z - k)
    return total


# ----- Wishart -----
class WishartKernel(DoubleContourKernel):

    def __init__(self, n, nu=0, radius=0.4, nodes=128):
        if n < 1 or nu < 0:
            raise PreconditionError("Wishart kernel needs n >= 1 and nu >= 0")
        self.nu = int(nu)
        self.radius, self.nodes = radius, nodes
        super().__init__(n, HALF_LINE, laguerre_extent(n, nu), quad.circle(0.0, radius, nodes),
                         quad.circle(1.0, radius, nodes), sign=-1.0, label="wishart(%d,%d)" % (n, nu))

    def x_factor(self, u, x):
        n = self.n
        return np.exp(x[:, None] * u[None, :]) * ((u - 1.0) ** n * u ** (-n - self.nu))[None, :]

    def y_factor(self, v, y):
        n = self.n
        return np.exp(-y[:, None] * v[None, :]) * (v ** (n + self.nu) * (v - 1.0) ** (-n))[None, :]

    def refined(self):
        return WishartKernel(self.n, self.nu, self.radius, 2 * self.nodes)


def wishart_kernel(n, nu=0):
    return WishartKernel(n, nu)


# ----- Products of Ginibre matrices -----
def _productExtent(n, nus):
    r = len(nus)
    return ((48.0 + 4.0 * (n + sum(nus))) / r) ** r


def _lineHeight(n, nus, decay=40.0):
    r = len(nus)
    H = 8.0
    while r * np.pi * H / 2.0 - (n + sum(nus) + 1.0) * np.log(H) < decay:
        H += 2.0
    return H


class ProductGinibreKernel(DoubleContourKernel):
    """Squared singular values of G_r ... G_1, G_j of size (n+nu_j) x (n+nu_{j-1})."""

    def __init__(self, n, nus, nodes=256, line_nodes=16):
        self.nus = tuple(int(v) for v in nus)
        if n < 1 or not self.nus or min(self.nus) < 0:
            raise PreconditionError("Product Ginibre kernel needs n >= 1 and nonnegative nu")
        self.nodes, self.line_nodes = nodes, line_nodes
        gamma = quad.segment_ellipse(0.0, float(n), 0.25, nodes)
        band = gamma.params["semi_minor"] + 1.0
        line = quad.vertical_line(-0.5, _lineHeight(n, self.nus), nodes=line_nodes, panel=0.5,
                                  fine_band=(-band, band), fine_panel=0.125)
        super().__init__(n, HALF_LINE, (0.0, _productExtent(n, self.nus)), gamma, line,
                         label="product-ginibre(%d,%s)" % (n, self.nus))

    def x_factor(self, u, x):
        log_u = -_logFalling(u, self.n) - _logGammaSum(u, [v + 1.0 for v in self.nus])
        return np.exp(np.log(x)[:, None] * u[None, :] + log_u[None, :])

    def y_factor(self, v, y):
        log_v = _logFalling(v, self.n) + _logGammaSum(v, [nu + 1.0 for nu in self.nus])
        return np.exp(-np.log(y)[:, None] * (v[None, :] + 1.0) + log_v[None, :])

    def refined(self):
        return ProductGinibreKernel(self.n, self.nus, 2 * self.nodes, 2 * self.line_nodes)


def product_ginibre_kernel(n, nus):
    return ProductGinibreKernel(n, nus)


# ----- Ginibre products on a fixed source -----
class DegenerateGinibreKernel(DoubleContourKernel):
    """
    Squared singular values of G_r ... G_1 A with A having squared singular
    values a (coincident values allowed).
    """

    def __init__(self, a, nus, nodes=256):
        a = np.sort(np.asarray(a, dtype=float).ravel())
        if a.size == 0 or np.any(a <= 0.0):
            raise PreconditionError("Source squared singular values must be positive")
        self.a = a
        self.nus = tuple(int(v) for v in nus)
        self.nodes = nodes
        self.phi, _, self.psi = _ginibreParts(self.nus)
        delta = min(0.5, 0.5 * a.min())
        around_a = quad.segment_ellipse(a.min(), a.max(), delta, nodes)
        sigma = quad.circle(0.0, 2.0 * (a.max() + delta) + 1.0, nodes)
        extent = (0.0, a.max() * self.phi.extent[1])
        super().__init__(a.size, HALF_LINE, extent, sigma, around_a, sign=-1.0,
                         label="degenerate-ginibre(%s,%s)" % (a.tolist(), self.nus))

    def _sourceProduct(self, z):
        out = np.ones_like(z)
        for aj in self.a:
            out = out * (z - aj)
        return out

    def x_factor(self, s, x):
        z = x[:, None] / s[None, :]
        return self.psi(z) * (self._sourceProduct(s) / s)[None, :]

    def y_factor(self, u, y):
        z = y[:, None] / u[None, :]
        return phi_class(self.nus, z) * (1.0 / (u * self._sourceProduct(u)))[None, :]

    def refined(self):
        return DegenerateGinibreKernel(self.a, self.nus, 2 * self.nodes)


def degenerate_ginibre_kernel(a, nus):
    return DegenerateGinibreKernel(a, nus)


def alternative_product_ginibre_kernel(n, nus):
    """Product Ginibre kernel as the identity-source limit of the fixed-source kernel."""
    kernel = DegenerateGinibreKernel(np.ones(n), nus)
    kernel.label = "alternative-product-ginibre(%d,%s)" % (n, kernel.nus)
    return kernel


# ----- Products of truncated unitary matrices -----
def _checkTruncated(n, nus, mus):
    nus = tuple(int(v) for v in nus)
    mus = tuple(int(m) for m in mus)
    if n < 1 or not nus or len(nus) != len(mus) or min(nus) < 0 or min(mus) < 1:
        raise PreconditionError("Truncated product needs n >= 1 and lists nu >= 0, mu >= 1 of equal length")
    if n > sum(mus):
        raise PreconditionError(
            "n = %d exceeds Σ mu = %d: the product has %d singular values forced to 1 and its squared "
            "singular values are not a determinantal point process" % (n, sum(mus), n - sum(mus)))
    return nus, mus


def truncated_p(k, nus, mus):
    """Exact integer coefficients of P_k, lowest degree first."""
    coef = []
    for j in range(k + 1):
        value = (-1) ** (k - j) * comb(k, j)
        for nu, mu in zip(nus, mus):
            value *= factorial(j + nu + mu) // factorial(j + nu)
        coef.append(value)
    return coef


def truncated_product_system(n, nus, mus):
    nus, mus = _checkTruncated(n, nus, mus)
    P, Q = [], []
    for k in range(n):
        P.append(np.array([float(c) for c in truncated_p(k, nus, mus)]))
        spec = MeijerGSpec.beta([-k] + [v + m for v, m in zip(nus, mus)], [0] + list(nus))
        g = RationalMeijerG(spec)
        scale = 1.0 / factorial(k)
        Q.append(WeightedFunction(lambda y, g=g, scale=scale: scale * np.real(g(y)), UNIT_INTERVAL,
                                  UNIT_INTERVAL, "Q_%d" % k))
    char = truncated_p(n, nus, mus)
    char_poly = np.array([float(c) / char[-1] for c in char])
    descriptor = {"family": TRUNCATED_PRODUCT, "n": n, "nu": list(nus), "mu": list(mus)}
    return BiorthogonalSystem(P, Q, UNIT_INTERVAL, UNIT_INTERVAL, char_poly, "truncated-product", descriptor)


class TruncatedProductKernel(DoubleContourKernel):
    """Hankel-contour form; the Hankel contour is closed since the s-integrand is rational."""

    def __init__(self, n, nus, mus, nodes=256, hankel_nodes=16):
        self.nus, self.mus = _checkTruncated(n, nus, mus)
        self.nodes, self.hankel_nodes = nodes, hankel_nodes
        gamma = quad.segment_ellipse(0.0, float(n), 0.25, nodes)
        reach = float(max(v + m for v, m in zip(self.nus, self.mus)))
        C = quad.hankel_contour(0.5, max(reach, 1.0), hankel_nodes, vertex=-1.0, closed=True)
        super().__init__(n, UNIT_INTERVAL, UNIT_INTERVAL, gamma, C,
                         label="truncated-product(%d,%s,%s)" % (n, self.nus, self.mus))

    def _blocks(self, z):
        out = np.ones_like(z)
        for nu, mu in zip(self.nus, self.mus):
            for i in range(1, mu + 1):
                out = out * (z + nu + i)
        return out

    def _falling(self, z):
        out = np.ones_like(z)
        for k in range(self.n):
            out = out * (z - k)
        return out

    def x_factor(self, t, x):
        return np.exp(np.log(x)[:, None] * t[None, :]) * (self._blocks(t) / self._falling(t))[None, :]

    def y_factor(self, s, y):
        return np.exp(-np.log(y)[:, None] * (s[None, :] + 1.0)) * (self._falling(s) / self._blocks(s))[None, :]

    def refined(self):
        return TruncatedProductKernel(self.n, self.nus, self.mus, 2 * self.nodes, 2 * self.hankel_nodes)


class TruncatedGProductKernel(CorrelationKernel):
    """K(x, y) = -∫_0^1 G^{0,r+1}(ux) G^{r+1,0}(uy) du with nu_0 = 0, mu_0 = -n."""

    def __init__(self, n, nus, mus, nodes=16, chunk=64):
        nus, mus = _checkTruncated(n, nus, mus)
        super().__init__(n, UNIT_INTERVAL, UNIT_INTERVAL,
                         label="truncated-g-product(%d,%s,%s)" % (n, nus, mus))
        self.nus, self.mus = nus, mus
        self.left = RationalMeijerG(MeijerGSpec.dual([n] + [-v - m for v, m in zip(nus, mus)],
                                                     [0] + [-v for v in nus]))
        self.right = RationalMeijerG(MeijerGSpec.beta([-n] + [v + m for v, m in zip(nus, mus)],
                                                      [0] + list(nus)))
        self.u_rule = quad.graded_interval(0.0, 1.0, levels=48, nodes=nodes, toward="lo")
        self.chunk = chunk

    def evaluate(self, x, y):
        x, y = np.broadcast_arrays(x, y)
        flat_x = np.maximum(x.ravel(), SMALLEST_ARGUMENT)
        flat_y = np.maximum(y.ravel(), SMALLEST_ARGUMENT)
        u, w = self.u_rule.nodes, self.u_rule.weights
        out = np.empty(flat_x.shape, dtype=complex)
        for start in range(0, flat_x.size, self.chunk):
            xc, yc = flat_x[start:start + self.chunk], flat_y[start:start + self.chunk]
            A = self.left(xc[:, None] * u[None, :])
            B = self.right(yc[:, None] * u[None, :])
            out[start:start + self.chunk] = -(A * B) @ w
        return out.reshape(x.shape)


def truncated_product_kernel(n, nus, mus, form="double-contour"):
    if form == "double-contour":
        return TruncatedProductKernel(n, nus, mus)
    if form == "g-product-integral":
        return TruncatedGProductKernel(n, nus, mus)
    raise ConfigError("Unknown truncated product kernel form: %s" % form)


# ----- Rank at one -----
@dataclass
class RankReport:
    n: int
    nu: tuple
    mu: tuple
    d: int
    counts: list
    tol: float

    @property
    def minimum(self):
        return int(min(self.counts)) if self.counts else 0

    @property
    def passed(self):
        return self.minimum >= max(self.d, 0)

    def to_dict(self):
        return {"n": self.n, "nu": list(self.nu), "mu": list(self.mu), "d": self.d, "trials": len(self.counts),
                "min_count": self.minimum, "max_count": int(max(self.counts)) if self.counts else 0,
                "tol": self.tol, "passed": self.passed}


def truncation_chain(n, nus, mus, size, rng):
    """Batch of T_r ... T_1 with T_j the (n+nu_j) x (n+nu_{j-1}) block of a Haar unitary of size n+nu_j+mu_j."""
    previous = 0
    Y = None
    for nu, mu in zip(nus, mus):
        if nu + mu < previous:
            raise ConfigError("Truncation chain needs nu_j + mu_j >= nu_{j-1} (got %d + %d < %d)"
                              % (nu, mu, previous))
        U = haar_unitary_batch(n + nu + mu, size, rng)
        T = U[:, :n + nu, :n + previous]
        Y = T if Y is None else T @ Y
        previous = nu
    return Y


def rank_at_one_check(n, nus, mus, trials, rng, tol=1e-8):
    """Count singular values within ``tol`` of 1 for sampled products of truncations."""
    nus = tuple(int(v) for v in nus)
    mus = tuple(int(m) for m in mus)
    if len(nus) != len(mus) or not nus:
        raise ConfigError("nu and mu lists must have equal nonzero length")
    counts = []
    remaining = trials
    while remaining > 0:
        size = min(remaining, 256)
        Y = truncation_chain(n, nus, mus, size, rng)
        s = np.linalg.svd(Y, compute_uv=False)
        counts.extend(np.sum(np.abs(s - 1.0) <= tol, axis=-1).tolist())
        remaining -= size
    report = RankReport(n, nus, mus, n - sum(mus), counts, tol)
    logger.info("Rank at one: d=%d, min count=%d over %d trials", report.d, report.minimum, trials)
    return report
