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
Transformations of polynomial ensembles.

A multiplicative transform is given by a weight φ on [0, inf), the reciprocal
moments b_j = 1 / ∫ t^j φ(t) dt and the Laurent series ψ(s) = Σ b_j s^j.
Polynomials transform by the Hadamard operator L (x^j -> b_j x^j) and dual
functions by Mellin convolution with φ. Adding a GUE matrix transforms
polynomials by the inverse Weierstrass transform and dual functions by the
Weierstrass transform.
"""

import logging
from dataclasses import dataclass, field
from math import comb

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import gammaln

from polyensemble_toolkit.ensembles.core import (AtomicMeasureRow, BiorthogonalSystem, HALF_LINE,
                                                PolynomialEnsemble, REAL_LINE, UNIT_INTERVAL)
from polyensemble_toolkit.ensembles.kernels import AtomicKernel, SumKernel
from polyensemble_toolkit.utils import polynomials as poly
from polyensemble_toolkit.utils import quadrature as quad
from polyensemble_toolkit.utils.errors import (ConfigError, ContourError, PreconditionError,
                                               QuadratureError)
from polyensemble_toolkit.utils.polynomials import WeightedFunction
from polyensemble_toolkit.utils.special import (HypergeometricSpec, MeijerGSpec, RationalMeijerG,
                                                hyper_pfq, phi_class)


logger = logging.getLogger(__name__)

GUE_ADD = "gue-add"
GINIBRE = "ginibre"
TRUNCATED = "truncated"
GENERAL = "general"

GAUSSIAN_REACH = 12.0
LOG_SPAN = 60.0
LOG_PANEL = 0.5
INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


# ----- Moment data -----
class MomentSequence:
    """Positive reciprocal moments b_j, computed on demand from ``formula``."""

    def __init__(self, formula, label=""):
        self.formula = formula
        self.label = label
        self._cache = {}

    def __call__(self, j):
        if j not in self._cache:
            value = float(self.formula(j))
            if not (np.isfinite(value) and value > 0.0):
                raise PreconditionError("Moment b_%d = %r is not a finite positive number" % (j, value))
            self._cache[j] = value
        return self._cache[j]

    def values(self, count):
        return np.array([self(j) for j in range(count)])

    def times(self, other):
        return MomentSequence(lambda j: self(j) * other(j), "%s*%s" % (self.label, other.label))

    @classmethod
    def from_weight(cls, phi, nodes=24):
        """b_j = 1 / ∫ t^j φ(t) dt by quadrature over the extent of φ."""
        lo, hi = phi.extent
        rule = quad.graded_interval(lo, hi, nodes=nodes, toward="both") if hi <= 1.0 \
            else quad.graded_half_line(hi, nodes=nodes)
        values = phi(rule.nodes) * rule.weights
        return cls(lambda j: 1.0 / np.sum(values * rule.nodes ** j), "moments(%s)" % phi.tag)


class LaurentSeries:
    """
    ψ(s) = Σ_{j >= j_min} c_j s^j converging on the annulus lo < |s| < hi.

    ``evaluator`` gives closed-form values; without it the series is summed
    directly.
    """

    def __init__(self, coefficient, j_min, annulus, evaluator=None, label="", terms=400):
        lo, hi = annulus
        if not (0.0 <= lo < hi):
            raise PreconditionError("Empty convergence annulus (%g, %g)" % (lo, hi))
        self.coefficient = coefficient
        self.j_min = int(j_min)
        self.annulus = (float(lo), float(hi))
        self.evaluator = evaluator
        self.label = label
        self.terms = terms

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        if self.evaluator is not None:
            return self.evaluator(s)
        total = np.zeros_like(s)
        power = s ** self.j_min
        for j in range(self.j_min, self.j_min + self.terms):
            term = self.coefficient(j) * power
            total = total + term
            power = power * s
        if np.any(np.abs(term) > 1e-15 * np.maximum(1.0, np.abs(total))):
            logger.warning("Laurent series %s not converged after %d terms", self.label, self.terms)
        return total

    def contains(self, radius):
        lo, hi = self.annulus
        return lo < radius < hi

    def hadamard(self, other):
        """Coefficient-wise product, converging on the product annulus."""
        lo = self.annulus[0] * other.annulus[0]
        hi = self.annulus[1] * other.annulus[1]
        return LaurentSeries(lambda j: self.coefficient(j) * other.coefficient(j),
                             max(self.j_min, other.j_min), (lo, hi),
                             label="%s.%s" % (self.label, other.label))


def _logFactorialSum(j, shifts):
    return sum(gammaln(j + s + 1.0) for s in shifts)


# ----- Transform descriptors -----
@dataclass
class TransformSpec:
    kind: str
    nu: tuple = ()
    mu: tuple = ()
    family: str = None
    phi: WeightedFunction = None
    b: MomentSequence = None
    psi: LaurentSeries = None
    label: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def multiplicative(self):
        return self.kind != GUE_ADD

    def sigma(self, nodes=128):
        """Default circle for the Hadamard contour integral."""
        lo, hi = self.psi.annulus
        radius = 1.0 if not np.isfinite(hi) else (0.5 * hi if lo == 0.0 else np.sqrt(lo * hi))
        return quad.circle(0.0, radius, nodes)

    def to_dict(self):
        if self.kind == GUE_ADD:
            return {"kind": GUE_ADD}
        if self.kind == GINIBRE:
            return {"kind": GINIBRE, "nu": int(self.nu[0])}
        if self.kind == TRUNCATED:
            return {"kind": TRUNCATED, "nu": int(self.nu[0]), "mu": int(self.mu[0])}
        if self.family is not None:
            out = {"kind": "iterated", "family": self.family, "nu": [int(v) for v in self.nu]}
            if self.family == TRUNCATED:
                out["mu"] = [int(v) for v in self.mu]
            return out
        raise ConfigError("Transform %s has no JSON descriptor" % self.label)

    @classmethod
    def from_dict(cls, descriptor):
        kind = descriptor.get("kind")
        try:
            if kind == GUE_ADD:
                return gue_add()
            if kind == GINIBRE:
                return ginibre(int(descriptor.get("nu", 0)))
            if kind == TRUNCATED:
                return truncated(int(descriptor.get("nu", 0)), int(descriptor["mu"]))
            if kind == "iterated":
                return iterated_spec(descriptor["family"], descriptor["nu"], descriptor.get("mu"))
        except KeyError as error:
            raise ConfigError("Transform descriptor %s misses %s" % (descriptor, error))
        raise ConfigError("Unknown transform kind: %s" % kind)


def gue_add():
    return TransformSpec(GUE_ADD, label=GUE_ADD)


def _ginibreExtent(nus):
    r = len(nus)
    return ((48.0 + 4.0 * sum(nus)) / r) ** r


def _ginibreParts(nus):
    nus = tuple(int(v) for v in nus)
    r = len(nus)
    j0 = -min(nus)
    if r == 1:
        nu = nus[0]
        phi_eval = lambda t: np.asarray(t) ** nu * np.exp(-np.asarray(t))
        psi_eval = lambda s: s ** (-nu) * np.exp(s)
    else:
        phi_eval = lambda t: np.real(phi_class(nus, t))
        lead = np.exp(-_logFactorialSum(j0, nus))
        series = HypergeometricSpec((1.0,), tuple(j0 + v + 1.0 for v in nus))
        psi_eval = lambda s: lead * s ** j0 * hyper_pfq(series, s)
    phi = WeightedFunction(phi_eval, HALF_LINE, (0.0, _ginibreExtent(nus)), "phi-ginibre%s" % (nus,))
    b = MomentSequence(lambda j: np.exp(-_logFactorialSum(j, nus)), "ginibre%s" % (nus,))
    coefficient = lambda j: np.exp(-_logFactorialSum(j, nus)) if j >= j0 else 0.0
    psi = LaurentSeries(coefficient, j0, (0.0, np.inf), psi_eval, "psi-ginibre%s" % (nus,))
    return phi, b, psi


def _logTruncatedMoment(j, nus, mus):
    return sum(gammaln(j + v + m + 1.0) - gammaln(m) - gammaln(j + v + 1.0) for v, m in zip(nus, mus))


def _truncatedParts(nus, mus):
    nus = tuple(int(v) for v in nus)
    mus = tuple(int(m) for m in mus)
    r = len(nus)
    j0 = -min(nus)
    if r == 1:
        nu, mu = nus[0], mus[0]
        phi_eval = lambda t: np.asarray(t) ** nu * (1.0 - np.asarray(t)) ** (mu - 1)
        psi_eval = lambda s: mu * s ** (-nu) * (1.0 - s) ** (-mu - 1)
    else:
        scale = np.exp(sum(gammaln(m) for m in mus))
        g = RationalMeijerG(MeijerGSpec.beta([v + m for v, m in zip(nus, mus)], nus))
        phi_eval = lambda t: scale * np.real(g(t))
        lead = np.exp(_logTruncatedMoment(j0, nus, mus))
        series = HypergeometricSpec((1.0,) + tuple(j0 + v + m + 1.0 for v, m in zip(nus, mus)),
                                    tuple(j0 + v + 1.0 for v in nus))
        psi_eval = lambda s: lead * s ** j0 * hyper_pfq(series, s)
    phi = WeightedFunction(phi_eval, UNIT_INTERVAL, UNIT_INTERVAL, "phi-truncated%s%s" % (nus, mus))
    b = MomentSequence(lambda j: np.exp(_logTruncatedMoment(j, nus, mus)), "truncated%s%s" % (nus, mus))
    coefficient = lambda j: np.exp(_logTruncatedMoment(j, nus, mus)) if j >= j0 else 0.0
    psi = LaurentSeries(coefficient, j0, (0.0, 1.0), psi_eval, "psi-truncated%s%s" % (nus, mus))
    return phi, b, psi


def ginibre(nu=0):
    """Multiplication by an (n+nu) x n Ginibre matrix."""
    if int(nu) != nu or nu < 0:
        raise ConfigError("Ginibre nu must be a nonnegative integer, got %s" % nu)
    phi, b, psi = _ginibreParts([nu])
    return TransformSpec(GINIBRE, (int(nu),), (), GINIBRE, phi, b, psi, "ginibre(%d)" % nu)


def truncated(nu=0, mu=1):
    """Multiplication by the (n+nu) x n block of an (n+nu+mu) Haar unitary."""
    if int(nu) != nu or nu < 0 or int(mu) != mu or mu < 1:
        raise ConfigError("Truncation needs integers nu >= 0 and mu >= 1, got nu=%s, mu=%s" % (nu, mu))
    phi, b, psi = _truncatedParts([nu], [mu])
    return TransformSpec(TRUNCATED, (int(nu),), (int(mu),), TRUNCATED, phi, b, psi,
                         "truncated(%d,%d)" % (nu, mu))


def general(phi, b=None, psi=None, label="general"):
    """Transform from an arbitrary weight; b defaults to reciprocal moments of phi."""
    b = b or MomentSequence.from_weight(phi)
    if psi is None:
        # b_j decays like T^{-j} for a weight supported on [0, T]
        psi = LaurentSeries(b, 0, (0.0, phi.support[1]), label=label)
    return TransformSpec(GENERAL, phi=phi, b=b, psi=psi, label=label)


def iterated_spec(kind, nus, mus=None):
    """
    One transform for r successive Ginibre or truncated-unitary factors, with
    φ a Meijer G-function and ψ the matching hypergeometric Laurent series.
    """
    nus = [int(v) for v in nus]
    if not nus or min(nus) < 0:
        raise ConfigError("Iterated transforms need a nonempty list of nonnegative nu")
    if kind == GINIBRE:
        phi, b, psi = _ginibreParts(nus)
        return TransformSpec(GENERAL, tuple(nus), (), GINIBRE, phi, b, psi, "ginibre%s" % (tuple(nus),))
    if kind == TRUNCATED:
        if mus is None or len(mus) != len(nus):
            raise ConfigError("Iterated truncations need nu and mu lists of equal length")
        mus = [int(m) for m in mus]
        if min(mus) < 1:
            raise ConfigError("Every mu must be at least 1")
        phi, b, psi = _truncatedParts(nus, mus)
        return TransformSpec(GENERAL, tuple(nus), tuple(mus), TRUNCATED, phi, b, psi,
                             "truncated%s%s" % (tuple(nus), tuple(mus)))
    raise ConfigError("Unknown iterated transform kind: %s" % kind)


# ----- Polynomial side -----
def op_L(p, b):
    """x^j -> b_j x^j."""
    coef = poly.as_polynomial(p).coef
    return Polynomial(coef * b.values(coef.size))


def _checkAnnulus(psi, sigma):
    radii = np.abs(sigma.nodes)
    lo, hi = psi.annulus
    if np.min(radii) <= lo or np.max(radii) >= hi:
        raise ContourError("Contour %s leaves the annulus (%g, %g) of %s"
                           % (sigma.kind, lo, hi, psi.label))
    if sigma.winding_number(0.0) != 1:
        raise ContourError("Contour %s must encircle the origin once" % sigma.kind)


def op_L_contour(p, psi, sigma=None):
    """
    L p from (1/2πi) ∮ ψ(s) p(x/s) ds/s, evaluated at the roots of unity and
    turned back into coefficients by FFT.
    """
    p = poly.as_polynomial(p)
    sigma = sigma or quad.circle(0.0, 1.0 if not np.isfinite(psi.annulus[1]) else 0.5 * psi.annulus[1], 128)
    _checkAnnulus(psi, sigma)
    count = p.coef.size
    x = np.exp(2j * np.pi * np.arange(count) / count)
    s = sigma.nodes
    kernel = sigma.weights * psi(s) / s / (2j * np.pi)
    values = np.array([np.sum(kernel * p(xk / s)) for xk in x])
    coef = np.fft.fft(values) / count
    scale = max(1.0, float(np.max(np.abs(coef))))
    if np.max(np.abs(coef.imag)) <= 1e-9 * scale and not np.iscomplexobj(p.coef):
        coef = coef.real
    return Polynomial(coef)


def _gaussianMoment(i):
    # E Z^i for a standard normal Z
    if i % 2:
        return 0
    return int(np.prod(np.arange(i - 1, 0, -2))) if i else 1


def inv_weierstrass(p):
    """Inverse Weierstrass transform on polynomials: x^k -> E (x + iZ)^k."""
    coef = poly.as_polynomial(p).coef
    out = np.zeros(coef.size, dtype=coef.dtype)
    for k, c in enumerate(coef):
        for i in range(0, k + 1, 2):
            out[k - i] += c * comb(k, i) * (-1) ** (i // 2) * _gaussianMoment(i)
    return Polynomial(out)


def inv_weierstrass_line(p, x, abscissa=None, half_height=GAUSSIAN_REACH, panel=0.5, nodes=16):
    """
    (1 / (i√(2π))) ∫ e^{(s-x)^2/2} p(s) ds along the vertical line Re s = abscissa.

    The line goes through Re s = x unless an abscissa is given.
    """
    p = poly.as_polynomial(p)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rule = quad.uniform_interval(-half_height, half_height, panel, nodes)
    c = x if abscissa is None else np.full(x.shape, float(abscissa))
    s = c[:, None] + 1j * rule.nodes[None, :]
    integrand = np.exp(0.5 * (s - x[:, None]) ** 2) * p(s)
    return np.real(integrand @ rule.weights) * INV_SQRT_2PI


# ----- Dual function side -----
def _gaussian(y, a):
    return np.exp(-0.5 * (y - a) ** 2) * INV_SQRT_2PI


def weierstrass(q, chunk=512):
    """(1/√(2π)) ∫ q(t) e^{-(y-t)^2/2} dt."""
    if isinstance(q, AtomicMeasureRow):
        atoms, weights = q.atoms, q.weights
        extent = (atoms.min() - GAUSSIAN_REACH, atoms.max() + GAUSSIAN_REACH)
        return WeightedFunction(lambda y: sum(w * _gaussian(np.asarray(y), a) for a, w in zip(atoms, weights)),
                                REAL_LINE, extent, "W[atoms]")
    lo, hi = q.extent

    def evaluate(y):
        y = np.asarray(y, dtype=float)
        flat = y.ravel()
        out = np.empty(flat.shape)
        for start in range(0, flat.size, chunk):
            yc = flat[start:start + chunk]
            t, w = quad.stretched_rule(np.maximum(yc - GAUSSIAN_REACH, lo),
                                       np.minimum(yc + GAUSSIAN_REACH, hi), panels=48)
            values = np.asarray(q(t)) * _gaussian(yc[:, None], t)
            out[start:start + chunk] = np.sum(w * values, axis=1)
        if not np.all(np.isfinite(out)):
            raise QuadratureError("Weierstrass transform of %s diverged" % q.tag)
        return out.reshape(y.shape)

    return WeightedFunction(evaluate, REAL_LINE, (lo - GAUSSIAN_REACH, hi + GAUSSIAN_REACH), "W[%s]" % q.tag)


def _extentProduct(a, b):
    return a * b if np.isfinite(a) and np.isfinite(b) else np.inf


def mellin_convolve(f, phi, chunk=256):
    """
    F(y) = ∫_0^inf φ(t) f(y/t) dt/t.

    Atomic f (or φ) is handled exactly: δ_a gives φ(y/a)/a. Otherwise the
    integral runs in u = log t from log(y/X) to log T, X and T being the
    right ends of the extents of f and φ.
    """
    if isinstance(f, AtomicMeasureRow) and isinstance(phi, AtomicMeasureRow):
        raise PreconditionError("Mellin convolution of two atomic measures is not a function")
    if isinstance(phi, AtomicMeasureRow):
        f, phi = phi, f
    if isinstance(f, AtomicMeasureRow):
        if np.any(f.atoms <= 0.0):
            raise PreconditionError("Atoms must be positive for a multiplicative transform")
        atoms, weights = f.atoms, f.weights
        return WeightedFunction(lambda y: sum(w * phi(np.asarray(y) / a) / a for a, w in zip(atoms, weights)),
                                HALF_LINE, (0.0, _extentProduct(atoms.max(), phi.extent[1])),
                                "M[atoms,%s]" % phi.tag)
    if f.support[0] < 0.0 or phi.support[0] < 0.0:
        raise PreconditionError("Mellin convolution needs functions on [0, inf)")
    X, T = f.extent[1], phi.extent[1]
    if not (np.isfinite(X) and np.isfinite(T)):
        raise PreconditionError("Mellin convolution needs finite extents")
    u_hi = np.log(T)

    def evaluate(y):
        y = np.asarray(y, dtype=float)
        flat = y.ravel()
        out = np.zeros(flat.shape)
        positive = np.nonzero(flat > 0.0)[0]
        for start in range(0, positive.size, chunk):
            index = positive[start:start + chunk]
            yc = flat[index]
            u_lo = np.maximum(np.log(yc / X), u_hi - LOG_SPAN)
            width = float(np.max(u_hi - u_lo)) if yc.size else 0.0
            if width <= 0.0:
                continue
            u, w = quad.stretched_rule(u_lo, np.full(yc.shape, u_hi),
                                       panels=max(8, int(np.ceil(width / LOG_PANEL))))
            t = np.exp(u)
            values = np.asarray(phi(t)) * np.asarray(f(yc[:, None] / t))
            out[index] = np.sum(w * values, axis=1)
        if not np.all(np.isfinite(out)):
            raise QuadratureError("Mellin convolution of %s with %s diverged" % (f.tag, phi.tag))
        return out.reshape(y.shape)

    support = (0.0, _extentProduct(f.support[1], phi.support[1]))
    return WeightedFunction(evaluate, support, (0.0, X * T), "M[%s,%s]" % (f.tag, phi.tag))


def exchange_identity(p, q, spec, rule=None):
    """(∫ L p · M q, ∫ p q) for a polynomial p and a dual function q."""
    Lp = op_L(p, spec.b)
    Mq = mellin_convolve(q, spec.phi)
    p = poly.as_polynomial(p)
    if isinstance(q, AtomicMeasureRow):
        right = q.integrate(p)
    else:
        base = rule or _halfLineRule(q.extent)
        right = float(np.sum(base.weights * p(base.nodes) * q(base.nodes)))
    target = _halfLineRule(Mq.extent)
    left = float(np.sum(target.weights * Lp(target.nodes) * Mq(target.nodes)))
    return left, right


def _halfLineRule(extent):
    hi = extent[1]
    if hi <= 1.0:
        return quad.graded_interval(0.0, hi, levels=40, toward="both")
    return quad.graded_half_line(hi)


# ----- Systems, kernels and ensembles -----
def _transformedSupport(support, extent, spec):
    if not spec.multiplicative:
        return REAL_LINE, (extent[0] - GAUSSIAN_REACH, extent[1] + GAUSSIAN_REACH)
    return (0.0, _extentProduct(support[1], spec.phi.support[1])), \
        (0.0, _extentProduct(extent[1], spec.phi.extent[1]))


def _checkSupport(support, spec):
    if spec.multiplicative and support[0] < 0.0:
        raise PreconditionError("Multiplicative transforms need an ensemble on [0, inf)")
    if not spec.multiplicative and tuple(support) != REAL_LINE:
        raise PreconditionError("GUE addition needs an ensemble on the real line, got %s" % (support,))


def _transformQ(q, spec):
    return mellin_convolve(q, spec.phi) if spec.multiplicative else weierstrass(q)


def _descriptor(base, spec):
    try:
        return dict(base, transform=spec.to_dict())
    except ConfigError:
        return dict(base, transform=spec.label)


def transform_system(system, spec):
    _checkSupport(system.support, spec)
    if spec.multiplicative:
        P = [op_L(p, spec.b) for p in system.P]
    else:
        if any(np.iscomplexobj(p.coef) for p in system.P):
            raise PreconditionError("GUE addition needs polynomials with real coefficients")
        P = [inv_weierstrass(p) for p in system.P]
    Q = [_transformQ(q, spec) for q in system.Q]
    support, extent = _transformedSupport(system.support, system.extent, spec)
    char_poly = None
    if system.char_poly is not None and poly.is_monic(system.char_poly, 1e-12):
        char_poly = avg_char_poly_transformed(system.char_poly, spec)
    return BiorthogonalSystem(P, Q, support, extent, char_poly, system.variant,
                              _descriptor(system.descriptor, spec))


def transform_kernel(kernel, spec, sigma=None):
    """
    Kernel of the transformed ensemble by the contour route: the polynomial
    side of the base kernel goes through the contour integral against ψ (or
    the vertical-line integral for GUE addition), the other side through the
    Mellin (or Weierstrass) integral.
    """
    if isinstance(kernel, AtomicKernel):
        P = kernel.atom_polynomials()
        Q = [AtomicMeasureRow([a], [1.0]) for a in kernel.atoms]
    elif isinstance(kernel, SumKernel) and all(isinstance(q, WeightedFunction) for q in kernel.Q):
        P, Q = kernel.P, kernel.Q
    else:
        raise PreconditionError("Kernel %s is not polynomial in its first argument" % kernel.label)
    _checkSupport(kernel.support, spec)
    if spec.multiplicative:
        sigma = sigma or spec.sigma()
        P_hat = [op_L_contour(p, spec.psi, sigma) for p in P]
    else:
        P_hat = [lambda x, p=poly.as_polynomial(p): inv_weierstrass_line(p, np.ravel(x)).reshape(np.shape(x))
                 for p in P]
    Q_hat = [_transformQ(q, spec) for q in Q]
    support, extent = _transformedSupport(kernel.support, kernel.extent, spec)
    return SumKernel(P_hat, Q_hat, support, extent, label="%s|%s" % (kernel.label, spec.label))


def transformed_density(ensemble, spec):
    """Functions F_k of the transformed ensemble; its normalization stays unknown."""
    _checkSupport(ensemble.support, spec)
    F = [_transformQ(f, spec) for f in ensemble.f]
    support, extent = _transformedSupport(ensemble.support, ensemble.extent, spec)
    return PolynomialEnsemble(F, support, extent, None, _descriptor(ensemble.descriptor, spec))


def avg_char_poly_transformed(p_n, spec, sigma=None):
    """Average characteristic polynomial after the transform, normalized to be monic."""
    p_n = poly.as_polynomial(p_n)
    if not poly.is_monic(p_n, 1e-12):
        raise PreconditionError("Average characteristic polynomial must be monic")
    if not spec.multiplicative:
        return inv_weierstrass(p_n)
    n = p_n.coef.size - 1
    P = op_L_contour(p_n, spec.psi, sigma or spec.sigma()) / spec.b(n)
    coef = np.array(P.coef, dtype=float)
    if abs(coef[-1] - 1.0) > 1e-8:
        raise QuadratureError("Contour route lost monicity (leading coefficient %.12g)" % coef[-1])
    coef[-1] = 1.0
    return Polynomial(coef)


def chain_transforms(specs):
    """Compose multiplicative transforms into one by convolving φ and multiplying b."""
    specs = list(specs)
    if not specs or not all(s.multiplicative for s in specs):
        raise ConfigError("Only a nonempty list of multiplicative transforms can be chained")
    phi, b, psi = specs[0].phi, specs[0].b, specs[0].psi
    for spec in specs[1:]:
        phi = mellin_convolve(spec.phi, phi)
        b = b.times(spec.b)
        psi = psi.hadamard(spec.psi)
    label = "*".join(s.label for s in specs)
    return TransformSpec(GENERAL, phi=phi, b=b, psi=psi, label=label,
                         extras={"chain": [s.label for s in specs]})
