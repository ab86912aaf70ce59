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
from dataclasses import dataclass, field

import numpy as np
from scipy.special import kv, loggamma

from polyensemble_toolkit.utils.errors import (ConfigError, PreconditionError, QuadratureError,
                                               SeriesDivergenceError)
from polyensemble_toolkit.utils.quadrature import QuadratureResult, segment_ellipse, vertical_line


logger = logging.getLogger(__name__)

SERIES_CAP = 500


def _nearestNonpositiveInteger(z, tol=1e-12):
    z = np.asarray(z, dtype=complex)
    k = np.rint(z.real)
    return (np.abs(z - k) <= tol) & (k <= 0)


def log_gamma(z):
    """Principal branch of log Gamma. Poles raise PreconditionError."""
    z = np.asarray(z, dtype=complex)
    if np.any(_nearestNonpositiveInteger(z)):
        raise PreconditionError("log_gamma evaluated at a pole")
    value = loggamma(z)
    return value if value.ndim else complex(value)


def gamma_ratio(z, p, q):
    """
    Gamma(z + p) / Gamma(z + q) for integer q - p, as an explicit product.

    Stays finite where both Gammas have poles that cancel.
    """
    d = q - p
    if abs(d - round(d)) > 1e-12:
        raise PreconditionError("gamma_ratio needs an integer parameter difference")
    d = int(round(d))
    z = np.asarray(z, dtype=complex)
    result = np.ones_like(z)
    if d >= 0:
        for i in range(d):
            result = result / (z + p + i)
    else:
        for i in range(1, -d + 1):
            result = result * (z + p - i)
    return result


# ----- Hypergeometric series -----
@dataclass(frozen=True)
class HypergeometricSpec:
    upper: tuple = ()
    lower: tuple = ()
    cap: int = SERIES_CAP

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(float(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(float(b) for b in self.lower))

    @property
    def terminates_at(self):
        """Index after which every term vanishes, or None."""
        stops = [int(-round(a)) for a in self.upper if a <= 0 and abs(a - round(a)) < 1e-12]
        return min(stops) if stops else None


def _humpIndex(spec, x):
    # index after which terms must decrease for a convergent series
    p, q = len(spec.upper), len(spec.lower)
    ax = float(np.max(np.abs(x))) if np.size(x) else 0.0
    if p <= q:
        return ax ** (1.0 / (q + 1 - p)) + 1.0
    drift = sum(spec.upper) - sum(spec.lower) - 1.0
    return max(0.0, drift) / max(1e-3, 1.0 - ax) + 1.0


def hyper_pfq(spec, x):
    """Sum of the generalized hypergeometric series pFq(upper; lower; x), vectorised in x."""
    x = np.asarray(x, dtype=complex)
    stop = spec.terminates_at
    p, q = len(spec.upper), len(spec.lower)
    for b in spec.lower:
        if b <= 0 and abs(b - round(b)) < 1e-12 and (stop is None or -round(b) < stop):
            raise PreconditionError("Lower parameter %g is a nonpositive integer" % b)
    if stop is None and (p > q + 1 or (p == q + 1 and np.any(np.abs(x) >= 1.0))):
        raise SeriesDivergenceError("pFq series with p=%d, q=%d diverges at |x|=%g"
                                    % (p, q, np.max(np.abs(x))))
    hump = _humpIndex(spec, x)
    term = np.ones_like(x)
    total = np.ones_like(x)
    growth = 0
    previous = np.abs(term)
    for k in range(spec.cap):
        if stop is not None and k >= stop:
            break
        ratio = np.ones_like(x)
        for a in spec.upper:
            ratio = ratio * (a + k)
        for b in spec.lower:
            ratio = ratio / (b + k)
        term = term * ratio * x / (k + 1)
        total = total + term
        magnitude = np.abs(term)
        if np.all(magnitude <= 1e-16 * np.abs(total)) and k > hump:
            break
        if k > hump and np.any(magnitude > previous):
            growth += 1
            if growth >= 20:
                raise SeriesDivergenceError("pFq terms grew for 20 consecutive steps")
        else:
            growth = 0
        previous = magnitude
    else:
        if stop is None or stop > spec.cap:
            raise SeriesDivergenceError("pFq series did not converge within %d terms" % spec.cap)
    return total if total.ndim else complex(total)


# ----- Meijer G -----
@dataclass(frozen=True)
class MeijerGSpec:
    m: int
    n: int
    p: int
    q: int
    a: tuple = field(default_factory=tuple)
    b: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if len(self.a) != self.p or len(self.b) != self.q:
            raise PreconditionError("Meijer G parameter lists do not match (p, q)")
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise PreconditionError("Meijer G orders must satisfy 0 <= m <= q, 0 <= n <= p")

    @property
    def kind(self):
        m, n, p, q = self.m, self.n, self.p, self.q
        if p == 0 and n == 0 and m == q:
            return "phi"
        if m == 1 and n == 1 and p == 1:
            return "psi"
        if n == 0 and m == p == q:
            return "beta"
        if m == 1 and n == p == q:
            return "psi-truncated"
        if m == 0 and n == p == q:
            return "dual"
        return None

    @classmethod
    def phi(cls, nu):
        """G^{r,0}_{0,r}(-; nu | x)"""
        return cls(len(nu), 0, 0, len(nu), (), tuple(nu))

    @classmethod
    def beta(cls, a, b):
        """G^{p,0}_{p,p}(a; b | x)"""
        return cls(len(a), 0, len(a), len(b), tuple(a), tuple(b))

    @classmethod
    def dual(cls, a, b):
        """G^{0,p}_{p,p}(a; b | x)"""
        return cls(0, len(a), len(a), len(b), tuple(a), tuple(b))


def _mbLogIntegrand(spec, u):
    a, b, m, n = spec.a, spec.b, spec.m, spec.n
    value = np.zeros_like(u)
    for j in range(m):
        value = value + loggamma(b[j] + u)
    for j in range(n):
        value = value + loggamma(1.0 - a[j] - u)
    for j in range(n, spec.p):
        value = value - loggamma(a[j] + u)
    for j in range(m, spec.q):
        value = value - loggamma(1.0 - b[j] - u)
    return value


def _mbAbscissa(spec):
    left = max([-spec.b[j] for j in range(spec.m)], default=-np.inf)
    right = min([1.0 - spec.a[j] for j in range(spec.n)], default=np.inf)
    if not left < right:
        raise PreconditionError("No vertical line separates the Gamma poles")
    if np.isfinite(left) and np.isfinite(right):
        return 0.5 * (left + right)
    return left + 0.5 if np.isfinite(left) else right - 0.5


class MellinBarnes:
    """
    Vertical-line evaluation of a Meijer G integrand, with the Gamma part
    tabulated once so that many arguments cost one matrix product.
    """

    def __init__(self, spec, abscissa=None, panel=0.5, nodes=16, tail=1e-17, max_height=640.0):
        self.spec = spec
        c = _mbAbscissa(spec) if abscissa is None else abscissa
        height = 16.0
        while True:
            ends = c + 1j * np.array([-height, height])
            peak = np.real(_mbLogIntegrand(spec, np.array([c + 0j]))).max()
            if np.real(_mbLogIntegrand(spec, ends)).max() - peak < np.log(tail) or height >= max_height:
                break
            height *= 2.0
        self.converged = height < max_height
        if not self.converged:
            logger.warning("Mellin-Barnes integrand for %s does not decay on the line", spec)
        self.contour = vertical_line(c, height, nodes=nodes, panel=panel)
        u = self.contour.nodes
        self._u = u
        self._weighted = self.contour.weights * np.exp(_mbLogIntegrand(spec, u)) / (2j * np.pi)

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        shape = x.shape
        logx = np.log(x.ravel())
        out = np.empty(logx.shape, dtype=complex)
        for start in range(0, logx.size, 2048):
            chunk = logx[start:start + 2048]
            out[start:start + 2048] = np.exp(-chunk[:, None] * self._u[None, :]) @ self._weighted
        return out.reshape(shape)


def _pairIntegerDifferences(tops, bottoms):
    """Pair each bottom with a top at integer distance. Returns list of (top, bottom)."""
    tops = list(tops)
    pairs = []
    for bottom in bottoms:
        for i, top in enumerate(tops):
            if abs((top - bottom) - round(top - bottom)) < 1e-12:
                pairs.append((tops.pop(i), bottom))
                break
        else:
            raise PreconditionError("Meijer G class needs integer parameter differences")
    return pairs


class RationalMeijerG:
    """
    G^{p,0}_{p,p} and G^{0,p}_{p,p} with integer parameter differences.

    The Mellin-Barnes integrand is a rational function times x^{-u}, so the
    value is a residue sum, evaluated by the trapezoid rule on an ellipse
    around the poles.
    """

    def __init__(self, spec, nodes=256):
        self.spec = spec
        kind = spec.kind
        if kind == "beta":
            # Gamma(u + b) / Gamma(u + a)
            self.pairs = _pairIntegerDifferences(spec.a, spec.b)
            poles = [-b - i for a, b in self.pairs for i in range(int(round(a - b)))]
            self.sign = 1.0
        elif kind == "dual":
            # Gamma(1 - a - u) / Gamma(1 - b - u)
            self.pairs = _pairIntegerDifferences(spec.b, spec.a)
            poles = [1.0 - a + i for b, a in self.pairs for i in range(int(round(a - b)))]
            self.sign = -1.0
        else:
            raise PreconditionError("Class %s has no rational Mellin-Barnes integrand" % kind)
        self.kind = kind
        self.poles = np.array(sorted(set(np.round(poles, 12))))
        if self.poles.size:
            span = self.poles[-1] - self.poles[0]
            self.contour = segment_ellipse(self.poles[0], self.poles[-1], 0.5,
                                           nodes=int(nodes * (1 + span // 8)))
            u = self.contour.nodes
            self._u = u
            self._weighted = self.sign * self.contour.weights * self.rational(u) / (2j * np.pi)

    def rational(self, u):
        u = np.asarray(u, dtype=complex)
        value = np.ones_like(u)
        if self.kind == "beta":
            for a, b in self.pairs:
                value = value * gamma_ratio(u, b, a)
        else:
            for b, a in self.pairs:
                value = value * gamma_ratio(1.0 - u, -a, -b)
        return value

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        if not self.poles.size:
            return np.zeros_like(x)
        shape = x.shape
        logx = np.log(x.ravel())
        out = np.empty(logx.shape, dtype=complex)
        for start in range(0, logx.size, 2048):
            chunk = logx[start:start + 2048]
            out[start:start + 2048] = np.exp(-chunk[:, None] * self._u[None, :]) @ self._weighted
        return out.reshape(shape)


def phi_class(nu, z):
    """G^{r,0}_{0,r}(-; nu | z), also for complex z with Re z > 0."""
    nu = [float(v) for v in nu]
    z = np.asarray(z, dtype=complex)
    if len(nu) == 1:
        return z ** nu[0] * np.exp(-z)
    if len(nu) == 2:
        return 2.0 * z ** (0.5 * (nu[0] + nu[1])) * kv(nu[0] - nu[1], 2.0 * np.sqrt(z))
    return MellinBarnes(MeijerGSpec.phi(nu))(z)


def _psiSeries(spec, z):
    a1, b1 = spec.a[0], spec.b[0]
    lower = [1.0 + b1 - b for b in spec.b[1:]]
    prefactor = np.exp(loggamma(1.0 + b1 - a1) - sum(loggamma(v) for v in lower))
    return z ** b1 * prefactor * hyper_pfq(HypergeometricSpec((1.0 + b1 - a1,), tuple(lower)), -z)


def _psiTruncatedSeries(spec, z):
    b1 = spec.b[0]
    upper = [1.0 - a + b1 for a in spec.a]
    lower = [1.0 + b1 - b for b in spec.b[1:]]
    prefactor = np.exp(sum(loggamma(v) for v in upper) - sum(loggamma(v) for v in lower))
    if np.any(np.abs(z) >= 1.0):
        raise PreconditionError("G^{1,p}_{p,p} series needs |x| < 1")
    return z ** b1 * prefactor * hyper_pfq(HypergeometricSpec(tuple(upper), tuple(lower)), -z)


MEIJER_METHODS = ("auto", "series", "mellin-barnes", "residues")


def _defaultMethod(spec):
    if spec.kind in ("beta", "dual"):
        return "residues"
    if spec.kind == "phi" and spec.q > 2:
        return "mellin-barnes"
    return "series"


def meijer_g(spec, x, method="auto"):
    """
    Meijer G-function for the classes used by the transforms.

    ``method`` is "auto", "series" (psi classes, closed forms for phi with
    r <= 2), "mellin-barnes" or "residues" (beta and dual classes).
    """
    kind = spec.kind
    if kind is None:
        raise PreconditionError("Unsupported Meijer G class (m=%d, n=%d, p=%d, q=%d)"
                                % (spec.m, spec.n, spec.p, spec.q))
    if method not in MEIJER_METHODS:
        raise ConfigError("Unknown Meijer G method %r (expected one of %s)" % (method, ", ".join(MEIJER_METHODS)))
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise PreconditionError("meijer_g needs positive arguments")
    method = _defaultMethod(spec) if method == "auto" else method

    if method == "mellin-barnes":
        value = np.real(MellinBarnes(spec)(x))
    elif method == "residues":
        if kind not in ("beta", "dual"):
            raise PreconditionError("Class %s has no residue evaluation" % kind)
        value = np.real(RationalMeijerG(spec)(x))
    elif kind == "psi":
        value = np.real(_psiSeries(spec, x))
    elif kind == "psi-truncated":
        value = np.real(_psiTruncatedSeries(spec, x))
    elif kind == "phi" and spec.q <= 2:
        value = np.real(phi_class(spec.b, x))
    else:
        raise PreconditionError("Class %s has no series evaluation" % kind)
    if kind == "beta":
        value = np.where(x > 1.0, 0.0, value)
    if not np.all(np.isfinite(value)):
        raise QuadratureError("Meijer G evaluation produced non-finite values")
    return value if value.ndim else float(value)


def mellin_barnes_result(spec, x):
    """Single-point Mellin-Barnes evaluation with a refinement error estimate."""
    coarse = MellinBarnes(spec, nodes=16)
    fine = MellinBarnes(spec, nodes=32)
    value = complex(fine(np.array([x]))[0])
    error = abs(value - complex(coarse(np.array([x]))[0]))
    return QuadratureResult(value, error, fine.contour.node_count, fine.converged)
