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
Correlation kernels.

Every kernel evaluates K(x, y) on broadcast arrays. Comparisons between
kernels go through correlation determinants det[K(x_i, x_j)], which do not
see conjugations c(x)/c(y).
"""

import logging

import numpy as np
from scipy.integrate import trapezoid

from polyensemble_toolkit.ensembles.core import (AtomicMeasureRow, REAL_LINE, atomic_kernel_weights,
                                                gue_extent, integration_rule)
from polyensemble_toolkit.utils import polynomials as poly
from polyensemble_toolkit.utils.errors import ConfigError, PreconditionError, QuadratureError


logger = logging.getLogger(__name__)

REAL_TOLERANCE = 1e-9


class CorrelationKernel:
    """
    Base class. Subclasses implement ``evaluate(x, y)`` on broadcast arrays,
    possibly returning complex values. ``__call__`` masks points outside the
    support and drops imaginary parts after checking they are negligible.
    """

    def __init__(self, n, support, extent=None, gauge_exponent=0, label="", real_tol=REAL_TOLERANCE):
        self.n = int(n)
        self.support = (float(support[0]), float(support[1]))
        self.extent = tuple(extent) if extent is not None else self.support
        self.gauge_exponent = gauge_exponent
        self.label = label
        self.real_tol = real_tol
        self.max_imaginary = 0.0

    def evaluate(self, x, y):
        raise NotImplementedError

    def _inside(self, x):
        lo, hi = self.support
        return (x >= lo) & (x <= hi)

    def _real(self, values):
        values = np.asarray(values)
        if not np.iscomplexobj(values):
            return values
        if values.size:
            residue = np.abs(values.imag) / np.maximum(1.0, np.abs(values.real))
            worst = float(np.max(residue))
            self.max_imaginary = max(self.max_imaginary, worst)
            if worst > self.real_tol:
                raise QuadratureError("Kernel %s has imaginary residue %.3e above %.1e"
                                      % (self.label, worst, self.real_tol))
        return values.real

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        inside = self._inside(x) & self._inside(y)
        out = np.zeros(x.shape)
        if np.any(inside):
            out[inside] = self._real(self.evaluate(x[inside], y[inside]))
        return out if out.ndim else float(out)

    def matrix(self, xs, ys):
        """K(xs[i], ys[j]) as a len(xs) x len(ys) array."""
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        return self(xs[:, None], ys[None, :])

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return self(x, x)

    def rule(self, nodes=16):
        return integration_rule(self.support, self.extent, nodes)

    def trace(self, rule=None):
        """∫ K(x, x) dx."""
        rule = rule or self.rule()
        return float(np.sum(rule.weights * self.density(rule.nodes)))

    def diagnostics(self):
        return {"label": self.label, "n": self.n, "max_imaginary_residue": self.max_imaginary}

    def __repr__(self):
        return "%s(%s, n=%d)" % (type(self).__name__, self.label, self.n)


class SumKernel(CorrelationKernel):
    """Σ_j P_j(x) Q_j(y) for callables P_j (polynomials) and Q_j."""

    def __init__(self, P, Q, support, extent=None, label="sum", real_tol=REAL_TOLERANCE):
        if len(P) != len(Q):
            raise PreconditionError("P and Q lists differ in length (%d vs %d)" % (len(P), len(Q)))
        super().__init__(len(P), support, extent, label=label, real_tol=real_tol)
        self.P = list(P)
        self.Q = list(Q)

    def evaluate(self, x, y):
        total = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for p, q in zip(self.P, self.Q):
            total = total + np.asarray(p(x)) * np.asarray(q(y))
        return total


class AtomicKernel(CorrelationKernel):
    """
    k(x, ·) = Σ_i c_i(x) δ_{a_i}. Not a pointwise function of y; only its
    atom weights are exposed, for use inside transforms.
    """

    def __init__(self, system, label="atomic"):
        super().__init__(system.n, system.support, system.extent, label=label)
        self.system = system
        self.atoms = np.unique(np.concatenate([q.atoms for q in system.Q]))

    def weights(self, x):
        return atomic_kernel_weights(self.system, x)[1]

    def atom_polynomials(self):
        """Polynomials c_i with k(x, ·) = Σ_i c_i(x) δ_{a_i}."""
        polys = [0.0 * self.system.P[0] for _ in self.atoms]
        for p, q in zip(self.system.P, self.system.Q):
            for atom, weight in zip(q.atoms, q.weights):
                i = int(np.searchsorted(self.atoms, atom))
                polys[i] = polys[i] + weight * p
        return polys

    def evaluate(self, x, y):
        raise PreconditionError("An atomic kernel has no pointwise values; transform it first")


class ChristoffelDarbouxKernel(CorrelationKernel):
    """GUE kernel e^{-y^2/2} Σ_{k<n} p_k(x) p_k(y) / h_k in Christoffel-Darboux form."""

    def __init__(self, n, monic, norms, weight, support, extent, label="christoffel-darboux"):
        super().__init__(n, support, extent, label=label)
        self.p_n, self.p_prev = monic[n], monic[n - 1]
        self.d_n, self.d_prev = monic[n].deriv(), monic[n - 1].deriv()
        self.h_prev = norms[n - 1]
        self.weight = weight

    def evaluate(self, x, y):
        x, y = np.broadcast_arrays(x, y)
        gap = x - y
        close = np.abs(gap) < 1e-8
        safe = np.where(close, 1.0, gap)
        off = (self.p_n(x) * self.p_prev(y) - self.p_prev(x) * self.p_n(y)) / safe
        on = self.d_n(x) * self.p_prev(x) - self.d_prev(x) * self.p_n(x)
        return np.where(close, on, off) * self.weight(y) / self.h_prev


def gue_christoffel_darboux(n):
    monic = [poly.hermite_monic(k) for k in range(n + 1)]
    norms = [poly.hermite_norm(k) for k in range(n)]
    return ChristoffelDarbouxKernel(n, monic, norms, lambda y: np.exp(-0.5 * y ** 2), REAL_LINE,
                                    gue_extent(n), label="gue-christoffel-darboux")


def kernel_from_system(system):
    if len(system.P) != len(system.Q):
        raise PreconditionError("P and Q lists differ in length")
    if all(isinstance(q, AtomicMeasureRow) for q in system.Q):
        return AtomicKernel(system)
    if system.is_atomic:
        raise PreconditionError("Mixed atomic and function-valued dual rows are not supported")
    label = system.descriptor.get("family", "system")
    return SumKernel(system.P, system.Q, system.support, system.extent, label=label)


# ----- Correlation functions -----
def correlation_function(kernel, points):
    """det[K(x_i, x_j)] for point sets of shape (..., k)."""
    points = np.atleast_1d(np.asarray(points, dtype=float))
    K = kernel(points[..., :, None], points[..., None, :])
    return np.linalg.det(K)


def compare_kernels(first, second, point_sets, floor=1e-12):
    """
    Largest relative difference of the correlation functions of two kernels
    over the given point sets (each of shape (count, k), any k).
    """
    worst = 0.0
    for points in point_sets:
        d1 = correlation_function(first, points)
        d2 = correlation_function(second, points)
        scale = np.maximum(np.maximum(np.abs(d1), np.abs(d2)), floor)
        worst = max(worst, float(np.max(np.abs(d1 - d2) / scale)))
    return worst


def random_point_sets(extent, orders=(1, 2, 3), count=20, rng=None):
    """Uniform random point sets inside ``extent`` for kernel comparisons."""
    rng = rng if rng is not None else np.random.default_rng(0)
    lo, hi = extent
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ConfigError("Point sets need a finite extent")
    return [rng.uniform(lo, hi, size=(count, k)) for k in orders]


def reproducing_defect(kernel, pairs, rule=None):
    """max |∫ K(x, t) K(t, y) dt - K(x, y)| over the (x, y) pairs."""
    rule = rule or kernel.rule()
    t = rule.nodes
    worst = 0.0
    for x, y in pairs:
        left = kernel(np.full(t.shape, x), t)
        right = kernel(t, np.full(t.shape, y))
        worst = max(worst, abs(float(np.sum(rule.weights * left * right)) - kernel(x, y)))
    return worst


def density_grid(lo, hi, points=400, spacing="linear"):
    """
    Evaluation grid for kernel dumps. "graded" refines geometrically towards
    ``lo`` (ratio 1.01 from lo + 1e-14 up to lo + 0.05) before going uniform.
    """
    if not hi > lo:
        raise ConfigError("Empty grid interval [%g, %g]" % (lo, hi))
    if spacing == "linear":
        return np.linspace(lo, hi, points)
    if spacing == "geometric":
        if lo <= 0.0:
            return lo + np.geomspace(1e-12 * (hi - lo), hi - lo, points)
        return np.geomspace(lo, hi, points)
    if spacing == "graded":
        width = hi - lo
        near = min(0.05, 0.5 * width)
        steps = int(np.ceil(np.log(near / 1e-14) / np.log(1.01)))
        head = lo + 1e-14 * 1.01 ** np.arange(steps + 1)
        tail = np.linspace(lo + near, hi, points)
        return np.unique(np.concatenate([[lo], head[head < lo + near], tail]))
    raise ConfigError("Unknown grid spacing: %s" % spacing)


def trapezoid_trace(kernel, grid):
    """Trapezoid ∫ K(x, x) dx on a grid, as done on CSV dumps."""
    return float(trapezoid(kernel.density(grid), grid))
