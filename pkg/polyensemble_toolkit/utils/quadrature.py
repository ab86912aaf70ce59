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
Contours with quadrature rules attached.

A :class:`Contour` holds nodes ordered along the path and complex weights
that already include ds, so that ``sum(weights * f(nodes))`` approximates the
path integral. Rules on real intervals keep real nodes and weights. ``refined()`` rebuilds
a contour with twice the nodes, which is what :func:`integrate` uses for its
error estimate.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_genlaguerre, roots_jacobi, roots_legendre

from polyensemble_toolkit.utils.errors import ContourError, QuadratureError


logger = logging.getLogger(__name__)

MAX_LEVEL = 3


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    nodes_used: int
    converged: bool = True


class Contour:

    def __init__(self, kind, builder, level=0, closed=False, real=False, **params):
        self.kind = kind
        self.params = params
        self.level = level
        self.closed = closed
        self.real = real
        self._builder = builder
        nodes, weights = builder(level)
        if real:
            self.nodes = np.asarray(nodes, dtype=float)
            self.weights = np.asarray(weights, dtype=float)
        else:
            self.nodes = np.asarray(nodes, dtype=complex)
            self.weights = np.asarray(weights, dtype=complex)
        if self.nodes.size < 8:
            raise ContourError("Contour %s has fewer than 8 nodes" % kind)

    @property
    def node_count(self):
        return self.nodes.size

    def refined(self):
        return Contour(self.kind, self._builder, self.level + 1, self.closed, self.real, **self.params)

    def sum(self, values):
        """Quadrature sum over the leading axis of ``values``."""
        return np.tensordot(self.weights, values, axes=(0, 0))

    def winding_number(self, z):
        pts = np.asarray(self.nodes, dtype=complex) - z
        if np.min(np.abs(pts)) == 0.0:
            raise ContourError("Point lies on the contour")
        steps = np.angle(pts[1:] / pts[:-1])
        total = np.sum(steps) + np.angle(pts[0] / pts[-1])
        return int(np.rint(total / (2.0 * np.pi)))

    def distance_to(self, other):
        other_nodes = other.nodes if isinstance(other, Contour) else np.atleast_1d(other)
        return float(np.min(np.abs(self.nodes[:, None] - np.asarray(other_nodes)[None, :])))

    def __repr__(self):
        return "Contour(%s, nodes=%d, %s)" % (self.kind, self.node_count, self.params)


# ----- Building blocks -----
@lru_cache(maxsize=64)
def _legendre(m):
    x, w = roots_legendre(m)
    return x, w


def _segment(z0, z1, fractions, m):
    x, w = _legendre(m)
    fractions = np.asarray(fractions, dtype=float)
    a, b = fractions[:-1], fractions[1:]
    half = 0.5 * (b - a)
    tau = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    weights = (half[:, None] * w[None, :]).ravel() * (z1 - z0)
    return z0 + tau.ravel() * (z1 - z0), weights


def _arc(center, radius, theta0, theta1, panels, m):
    x, w = _legendre(m)
    edges = np.linspace(theta0, theta1, panels + 1)
    half = 0.5 * np.diff(edges)
    theta = (0.5 * (edges[:-1] + edges[1:]))[:, None] + half[:, None] * x[None, :]
    theta = theta.ravel()
    points = center + radius * np.exp(1j * theta)
    weights = 1j * radius * np.exp(1j * theta) * (half[:, None] * w[None, :]).ravel()
    return points, weights


def _graded_fractions(length, first, toward_start=True):
    """Panel edges in [0, 1] doubling in size away from one end."""
    edges = [0.0]
    d = min(first, length)
    while d < length:
        edges.append(d)
        d *= 2.0
    edges.append(length)
    edges = np.asarray(edges) / length
    return edges if toward_start else (1.0 - edges)[::-1]


def _concat(*parts):
    nodes = np.concatenate([p[0] for p in parts])
    weights = np.concatenate([p[1] for p in parts])
    return nodes, weights


# ----- Closed curves -----
def circle(center=0.0, radius=1.0, nodes=64):
    if radius <= 0.0:
        raise ContourError("Circle radius must be positive")

    def build(level):
        N = nodes * 2 ** level
        theta = 2.0 * np.pi * np.arange(N) / N
        points = center + radius * np.exp(1j * theta)
        return points, 1j * (points - center) * (2.0 * np.pi / N)

    return Contour("circle", build, closed=True, center=center, radius=radius, nodes=nodes)


def ellipse(center=0.0, semi_major=1.0, semi_minor=1.0, nodes=128):
    if semi_major <= 0.0 or semi_minor <= 0.0:
        raise ContourError("Ellipse axes must be positive")

    def build(level):
        N = nodes * 2 ** level
        theta = 2.0 * np.pi * np.arange(N) / N
        points = center + semi_major * np.cos(theta) + 1j * semi_minor * np.sin(theta)
        ds = -semi_major * np.sin(theta) + 1j * semi_minor * np.cos(theta)
        return points, ds * (2.0 * np.pi / N)

    return Contour("ellipse", build, closed=True, center=center, semi_major=semi_major,
                   semi_minor=semi_minor, nodes=nodes)


def segment_ellipse(lo, hi, margin=0.5, nodes=128, semi_minor=None):
    """Ellipse around the real segment [lo, hi] with vertices at lo - margin and hi + margin."""
    if hi < lo:
        lo, hi = hi, lo
    h = 0.5 * (hi - lo)
    a = h + margin
    b = semi_minor if semi_minor is not None else np.sqrt(a ** 2 - h ** 2)
    return ellipse(0.5 * (lo + hi), a, b, nodes)


# ----- Open paths -----
def vertical_line(abscissa=0.0, half_height=12.0, nodes=16, panel=0.5, fine_band=None,
                  fine_panel=0.125):
    """Upward line Re s = abscissa, |Im s| <= half_height, composite Gauss-Legendre."""
    if half_height <= 0.0:
        raise ContourError("Half height must be positive")

    def edges(lo, hi, length):
        count = max(1, int(np.ceil((hi - lo) / length)))
        return np.linspace(lo, hi, count + 1)

    H = float(half_height)
    if fine_band is None:
        w_edges = edges(-H, H, panel)
    else:
        w0, w1 = max(-H, fine_band[0]), min(H, fine_band[1])
        w_edges = np.unique(np.concatenate([edges(-H, w0, panel), edges(w0, w1, fine_panel),
                                            edges(w1, H, panel)]))
    fractions = (w_edges + H) / (2.0 * H)
    z0, z1 = abscissa - 1j * H, abscissa + 1j * H

    def build(level):
        return _segment(z0, z1, fractions, nodes * 2 ** level)

    return Contour("vertical-line", build, abscissa=abscissa, half_height=H, nodes=nodes)


def hankel_contour(loop_radius=0.5, arm_length=40.0, nodes=16, vertex=0.0, closed=False):
    """
    Positively oriented keyhole around (-inf, vertex].

    Lower arm at Im s = -loop_radius runs right towards the vertex, a half
    circle of radius ``loop_radius`` turns around it, the upper arm runs back
    left. Arm panels double in length away from the vertex. With
    ``closed=True`` a vertical segment at Re s = vertex - arm_length closes the
    path and the arms get uniform panels no longer than the loop radius; the
    closed path is exact for integrands whose singularities all lie inside.
    """
    if loop_radius <= 0.0 or arm_length <= loop_radius:
        raise ContourError("Hankel contour needs 0 < loop radius < arm length")
    r, A, v = float(loop_radius), float(arm_length), float(vertex)
    if closed:
        # poles may sit along the arms
        toward_vertex = from_vertex = np.linspace(0.0, 1.0, int(np.ceil(A / r)) + 1)
    else:
        toward_vertex = _graded_fractions(A, r, toward_start=False)
        from_vertex = _graded_fractions(A, r, toward_start=True)

    def build(level):
        m = nodes * 2 ** level
        parts = [_segment(v - A - 1j * r, v - 1j * r, toward_vertex, m),
                 _arc(v, r, -0.5 * np.pi, 0.5 * np.pi, 4, m),
                 _segment(v + 1j * r, v - A + 1j * r, from_vertex, m)]
        if closed:
            parts.append(_segment(v - A + 1j * r, v - A - 1j * r, np.linspace(0.0, 1.0, 3), m))
        return _concat(*parts)

    return Contour("hankel", build, closed=closed, loop_radius=r, arm_length=A, vertex=v,
                   nodes=nodes)


def polyline(points, nodes=16):
    points = np.asarray(points, dtype=complex)
    if points.size < 2:
        raise ContourError("A polyline needs at least two points")

    def build(level):
        m = nodes * 2 ** level
        return _concat(*[_segment(points[k], points[k + 1], [0.0, 1.0], m)
                         for k in range(points.size - 1)])

    return Contour("polyline", build, points=points.tolist(), nodes=nodes)


# ----- Real rules -----
def half_line_gauss_laguerre(alpha=0.0, nodes=128):
    """Gauss-Laguerre rule; the weight t^alpha e^{-t} is folded into the weights."""

    def build(level):
        return roots_genlaguerre(nodes * 2 ** level, alpha)

    return Contour("half-line-gauss-laguerre", build, real=True, alpha=alpha, nodes=nodes)


def unit_interval_gauss_jacobi(alpha=0.0, beta=0.0, nodes=128):
    """Gauss-Jacobi rule on [0, 1]; the weight t^alpha (1-t)^beta is folded into the weights."""

    def build(level):
        x, w = roots_jacobi(nodes * 2 ** level, beta, alpha)
        return 0.5 * (x + 1.0), w * 2.0 ** (-(alpha + beta + 1.0))

    return Contour("unit-interval-gauss-jacobi", build, real=True, alpha=alpha, beta=beta,
                   nodes=nodes)


def interval(breakpoints, nodes=16):
    """Composite Gauss-Legendre rule with the given panel edges."""
    breakpoints = np.sort(np.asarray(breakpoints, dtype=float))
    lo, hi = breakpoints[0], breakpoints[-1]
    if not hi > lo:
        raise ContourError("Empty interval")
    fractions = (breakpoints - lo) / (hi - lo)

    def build(level):
        return _segment(lo, hi, fractions, nodes * 2 ** level)

    return Contour("interval", lambda level: tuple(np.real(a) for a in build(level)), real=True,
                   breakpoints=breakpoints.tolist(), nodes=nodes)


def uniform_interval(lo, hi, panel=1.0, nodes=16):
    count = max(1, int(np.ceil((hi - lo) / panel)))
    return interval(np.linspace(lo, hi, count + 1), nodes)


def graded_interval(lo, hi, levels=40, nodes=16, toward="lo"):
    """Panels halving towards ``lo``, ``hi`` or both ends (for endpoint singularities)."""
    ladder = 0.5 ** np.arange(levels, 0, -1)
    if toward == "lo":
        fractions = np.concatenate([[0.0], ladder, [1.0]])
    elif toward == "hi":
        fractions = np.concatenate([[0.0], 1.0 - ladder[::-1], [1.0]])
    elif toward == "both":
        half = 0.5 * ladder
        fractions = np.concatenate([[0.0], half, 1.0 - half[::-1], [1.0]])
    else:
        raise ContourError("Unknown grading direction: %s" % toward)
    return interval(lo + (hi - lo) * np.unique(fractions), nodes)


def graded_half_line(extent=64.0, levels=40, nodes=24):
    """[0, extent] with panels halving towards 0 below 1 and doubling above 1."""
    lower = 0.5 ** np.arange(levels, 0, -1)
    upper = [1.0]
    while upper[-1] < extent:
        upper.append(2.0 * upper[-1])
    edges = np.concatenate([[0.0], lower, upper])
    return interval(edges, nodes)


def real_line(extent=(-16.0, 16.0), panel=1.0, nodes=16):
    return uniform_interval(extent[0], extent[1], panel, nodes)


# ----- Integration -----
def _checkFinite(values, contour):
    if not np.all(np.isfinite(values)):
        raise QuadratureError("Non-finite integrand sample on %s contour" % contour.kind)


def integrate(f, contour, tol=1e-12, max_level=MAX_LEVEL):
    """
    Integrate f along the contour, doubling nodes until two successive
    estimates differ by less than tol·max(1, |value|).
    """
    if tol <= 0.0:
        raise ValueError("Tolerance must be positive")
    current = contour
    values = np.asarray(f(current.nodes))
    _checkFinite(values, current)
    estimate = current.sum(values)
    error = np.inf
    for _ in range(max_level):
        finer = current.refined()
        values = np.asarray(f(finer.nodes))
        _checkFinite(values, finer)
        refined = finer.sum(values)
        error = float(np.max(np.abs(refined - estimate)))
        current, estimate = finer, refined
        if error <= tol * max(1.0, float(np.max(np.abs(estimate)))):
            return QuadratureResult(estimate, error, current.node_count, True)
    logger.warning("Quadrature on %s contour did not converge (nodes=%d, error=%.3e)",
                   contour.kind, current.node_count, error)
    return QuadratureResult(estimate, error, current.node_count, False)


def _tensorSum(f, c1, c2, singular):
    if singular and c1.distance_to(c2) < 1e-8:
        raise ContourError("Contours %s and %s collide" % (c1.kind, c2.kind))
    values = np.asarray(f(c1.nodes[:, None], c2.nodes[None, :]))
    if not np.all(np.isfinite(values)):
        raise QuadratureError("Non-finite integrand sample on %s x %s" % (c1.kind, c2.kind))
    return c1.weights @ values @ c2.weights


def integrate_double(f, c1, c2, tol=1e-10, singular=False, max_level=MAX_LEVEL):
    """Tensor-product rule with per-axis refinement; f(s, t) must broadcast."""
    if tol <= 0.0:
        raise ValueError("Tolerance must be positive")
    estimate = _tensorSum(f, c1, c2, singular)
    error = np.inf
    for _ in range(2 * max_level):
        on_first = _tensorSum(f, c1.refined(), c2, singular)
        on_second = _tensorSum(f, c1, c2.refined(), singular)
        e1, e2 = abs(on_first - estimate), abs(on_second - estimate)
        error = e1 + e2
        if error <= tol * max(1.0, abs(estimate)):
            return QuadratureResult(estimate, error, c1.node_count * c2.node_count, True)
        if e1 >= e2 and c1.level < max_level:
            c1, estimate = c1.refined(), on_first
        elif c2.level < max_level:
            c2, estimate = c2.refined(), on_second
        elif c1.level < max_level:
            c1, estimate = c1.refined(), on_first
        else:
            break
    logger.warning("Double quadrature on %s x %s did not converge (error=%.3e)",
                   c1.kind, c2.kind, error)
    return QuadratureResult(estimate, error, c1.node_count * c2.node_count, False)


def stretched_rule(lo, hi, panels=64, nodes=16):
    """
    One composite Gauss-Legendre rule per row, mapped onto [lo[i], hi[i]].

    Returns (nodes, weights) of shape (len(lo), panels * nodes). Rows with
    hi <= lo get zero weights.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    tau, w = _segment(0.0, 1.0, np.linspace(0.0, 1.0, panels + 1), nodes)
    tau, w = np.real(tau), np.real(w)
    length = np.clip(hi - lo, 0.0, None)
    points = lo[:, None] + length[:, None] * tau[None, :]
    return points, length[:, None] * w[None, :]
