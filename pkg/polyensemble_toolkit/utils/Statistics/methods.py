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
import pandas as pd
from scipy.integrate import cumulative_trapezoid
from scipy.stats import chi2
from tqdm import tqdm

from polyensemble_toolkit.ensembles import transforms as tr
from polyensemble_toolkit.ensembles.closed_kernels import rank_at_one_check
from polyensemble_toolkit.ensembles.core import (UNIT_INTERVAL, average_char_poly_mc, build_base_system,
                                                gram_defect, spectra_array)
from polyensemble_toolkit.ensembles.kernels import density_grid, kernel_from_system
from polyensemble_toolkit.ensembles.predictions import (forced_unit_count, model_system, predicted_char_poly,
                                                       predicted_kernel)
from polyensemble_toolkit.generators.generator_models import compose, sample_spectra
from polyensemble_toolkit.utils.errors import PreconditionError
from polyensemble_toolkit.utils.Statistics.utils import getBinningMethod


logger = logging.getLogger(__name__)

Z_LIMIT = 4.0
P_LIMIT = 1e-3
MIN_EXPECTED = 10.0
TRACE_TOLERANCE = 1e-3
ATOM_TOLERANCE = 1e-8


def density_table(kernel, points=4001):
    """(grid, K(x, x), cumulative mass) over the numerical extent of the kernel."""
    lo, hi = kernel.support
    e_lo, e_hi = kernel.extent
    if (lo, hi) == UNIT_INTERVAL:
        half = np.geomspace(1e-14, 0.5, points // 2)
        grid = np.unique(np.concatenate([half, 1.0 - half]))
    elif lo == 0.0:
        grid = density_grid(0.0, e_hi, points, "geometric")
    else:
        grid = density_grid(e_lo, e_hi, points, "linear")
    density = kernel.density(grid)
    return grid, density, cumulative_trapezoid(density, grid, initial=0.0)


@dataclass
class DensityComparison:
    edges: np.ndarray
    observed: np.ndarray
    expected: np.ndarray
    samples: int
    n: int
    total_mass: float
    excluded: int = 0
    outside: int = 0
    z_limit: float = Z_LIMIT
    p_limit: float = P_LIMIT

    @property
    def z(self):
        return (self.observed - self.expected) / np.sqrt(self.expected)

    @property
    def statistic(self):
        return float(np.sum(self.z ** 2))

    @property
    def dof(self):
        return max(self.observed.size - 1, 1)

    @property
    def p_value(self):
        return float(chi2.sf(self.statistic, self.dof))

    @property
    def trace_error(self):
        return abs(self.total_mass - self.n) / self.n

    @property
    def passed(self):
        return bool(np.all(np.abs(self.z) < self.z_limit) and self.p_value > self.p_limit)

    def to_frame(self):
        return pd.DataFrame({"lo": self.edges[:-1], "hi": self.edges[1:], "observed": self.observed,
                             "expected": self.expected, "z": self.z})

    def to_dict(self):
        return {"samples": self.samples, "n": self.n, "bins": int(self.observed.size), "chi2": self.statistic,
                "dof": self.dof, "p_value": self.p_value, "max_abs_z": float(np.max(np.abs(self.z))),
                "total_mass": self.total_mass, "trace_error": self.trace_error, "excluded": self.excluded,
                "outside": self.outside, "passed": self.passed, "table": self.to_frame().to_dict("list")}


def _mergeBins(edges, observed, expected, minimum):
    keep, obs, exp = [edges[0]], [], []
    o = e = 0.0
    for k in range(expected.size):
        o, e = o + observed[k], e + expected[k]
        if e >= minimum:
            keep.append(edges[k + 1])
            obs.append(o)
            exp.append(e)
            o = e = 0.0
    if e > 0.0 or o > 0.0:
        if exp:
            obs[-1] += o
            exp[-1] += e
            keep[-1] = edges[-1]
        else:
            keep.append(edges[-1])
            obs.append(o)
            exp.append(e)
    return np.array(keep), np.array(obs), np.array(exp)


def compare_density(samples, kernel, bins=40, binning="equal-mass", atoms=(), atom_tol=1e-8,
                    min_expected=MIN_EXPECTED, table=None):
    """
    Histogram of all sampled points against N ∫_bin K(x, x) dx.

    Points within ``atom_tol`` of any value in ``atoms`` are left out and
    counted separately. Bins with expected count below ``min_expected`` are
    merged with their right neighbour.
    """
    points = spectra_array(samples)
    N = points.shape[0]
    if N * kernel.n / bins < min_expected:
        raise PreconditionError("Too few samples (%d) for %d bins of a %d-point process" % (N, bins, kernel.n))
    flat = points.ravel()
    excluded = np.zeros(flat.shape, dtype=bool)
    for atom in atoms:
        excluded |= np.abs(flat - atom) <= atom_tol
    kept = flat[~excluded]

    grid, density, mass = table if table is not None else density_table(kernel)
    inner = getBinningMethod(binning)(grid, mass, bins)
    edges = np.concatenate([[-np.inf], inner, [np.inf]])
    observed = np.histogram(kept, edges)[0].astype(float)
    cumulative = np.concatenate([[0.0], np.interp(inner, grid, mass), [mass[-1]]])
    expected = N * np.diff(cumulative)
    edges, observed, expected = _mergeBins(edges, observed, expected, min_expected)

    outside = int(np.sum(~kernel._inside(kept)))
    if outside:
        logger.warning("%d sampled points fall outside the kernel support %s", outside, kernel.support)
    comparison = DensityComparison(edges, observed, expected, N, kernel.n, float(mass[-1]),
                                   int(np.sum(excluded)), outside)
    if comparison.trace_error > TRACE_TOLERANCE:
        logger.warning("Kernel %s integrates to %.6g instead of %d", kernel.label, mass[-1], kernel.n)
    logger.info("Density check for %s: chi2=%.2f dof=%d p=%.3g max|z|=%.2f", kernel.label,
                comparison.statistic, comparison.dof, comparison.p_value, float(np.max(np.abs(comparison.z))))
    return comparison


@dataclass
class CharPolyComparison:
    x: np.ndarray
    estimate: np.ndarray
    stderr: np.ndarray
    predicted: np.ndarray
    sigmas: float = 3.0

    @property
    def z(self):
        return (self.estimate - self.predicted) / np.maximum(self.stderr, 1e-300)

    @property
    def passed(self):
        return bool(np.all(np.abs(self.estimate - self.predicted) <= self.sigmas * self.stderr))

    def to_dict(self):
        return {"x": self.x, "estimate": self.estimate, "stderr": self.stderr, "predicted": self.predicted,
                "z": self.z, "sigmas": self.sigmas, "passed": self.passed}


def compare_char_poly(samples, p, x_grid=None, sigmas=3.0):
    """Monte Carlo E Π (x - x_j) against the polynomial ``p`` at a few points of the bulk."""
    points = spectra_array(samples)
    if x_grid is None:
        x_grid = np.quantile(points, [0.1, 0.3, 0.5, 0.7, 0.9])
    x_grid = np.atleast_1d(np.asarray(x_grid, dtype=float))
    estimate, stderr = average_char_poly_mc(points, x_grid)
    return CharPolyComparison(x_grid, estimate, stderr, np.asarray(p(x_grid), dtype=float), sigmas)


@dataclass
class VerificationReport:
    model: dict
    kernel: str
    density: DensityComparison
    char_poly: CharPolyComparison = None
    unit_atoms: dict = None
    extras: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.density.passed and (self.char_poly is None or self.char_poly.passed) \
            and (self.unit_atoms is None or self.unit_atoms["passed"])

    def to_dict(self):
        out = {"model": self.model, "kernel": self.kernel, "density": self.density.to_dict(),
               "passed": self.passed}
        if self.char_poly is not None:
            out["char_poly"] = self.char_poly.to_dict()
        if self.unit_atoms is not None:
            out["unit_atoms"] = self.unit_atoms
        out.update(self.extras)
        return out


def verify_model(model, N, seed=0, threads=None, bins=40, kernel=None, char_poly=None, check_char_poly=True):
    """
    Sample ``model`` and test its density (and average characteristic
    polynomial) against theory.

    Squared singular values forced to 1 by a truncation chain are left out
    of the density bins and counted per sample instead; ``kernel`` then
    describes the remaining points.
    """
    print("-------------- Running density verification... --------------")
    kernel = kernel if kernel is not None else predicted_kernel(model)
    points = sample_spectra(model, N, seed, threads)
    d = forced_unit_count(model)
    at_one = np.abs(points - 1.0) <= ATOM_TOLERANCE
    density = compare_density(points, kernel, bins, atoms=(1.0,) if d else (), atom_tol=ATOM_TOLERANCE)
    units = None
    if d:
        counts = at_one.sum(axis=1)
        units = {"d": d, "min_count": int(counts.min()), "passed": bool(counts.min() >= d)}
        logger.info("Forced unit values: d=%d, min count=%d", d, units["min_count"])
    cp = None
    if check_char_poly:
        p = char_poly if char_poly is not None else predicted_char_poly(model)
        x_grid = np.quantile(points[~at_one], [0.1, 0.3, 0.5, 0.7, 0.9]) if d else None
        cp = compare_char_poly(points, p, x_grid)
    print("-------------- ...Done --------------")
    return VerificationReport(model.to_dict(), kernel.label, density, cp, units)


def verify_transform_pipeline(base, spec, N, seed=0, threads=None, bins=40):
    """
    Samples of ``spec`` applied to ``base`` against the transform of the
    base kernel and of the base average characteristic polynomial.
    """
    model = compose(base, spec)
    kernel = tr.transform_kernel(kernel_from_system(model_system(base)), spec)
    p = tr.avg_char_poly_transformed(predicted_char_poly(base), spec)
    report = verify_model(model, N, seed, threads, bins, kernel=kernel, char_poly=p)
    report.extras["transform"] = spec.label
    return report


# ----- Deterministic suites -----
def default_gram_cases():
    cases = [({"family": "gue", "n": n}, {"kind": tr.GUE_ADD}) for n in range(1, 6)]
    cases += [({"family": "laguerre", "n": n, "nu": nu}, {"kind": tr.GINIBRE, "nu": 1})
              for nu in (0, 2) for n in range(1, 6)]
    cases += [({"family": "jacobi", "n": n, "nu": 1, "m": 2 * n + 1}, {"kind": tr.TRUNCATED, "nu": 0, "mu": n})
              for n in range(1, 5)]
    return cases


def gram_suite(cases=None, tol=1e-8):
    """Gram matrices ∫ P_j Q_k of transformed systems; one row per case."""
    print("-------------- Running biorthogonality suite... --------------")
    rows = []
    for ensemble, transform in tqdm(cases or default_gram_cases()):
        system = tr.transform_system(build_base_system(ensemble), tr.TransformSpec.from_dict(transform))
        off, diag = gram_defect(system.gram())
        rows.append({"ensemble": str(ensemble), "transform": str(transform), "n": system.n,
                     "max_offdiag": off, "max_diag_error": diag, "passed": off < tol and diag < tol})
    print("-------------- ...Done --------------")
    return pd.DataFrame(rows)


def rank_suite(cases=((2, (0,), (1,)), (3, (0,), (1,)), (3, (0, 1), (1, 1)), (4, (1, 0), (1, 1))),
               trials=1000, seed=0, tol=1e-8):
    """Forced unit singular values of products of truncations; one row per (n, nu, mu)."""
    print("-------------- Running rank-at-one suite... --------------")
    rng = np.random.default_rng(seed)
    rows = [rank_at_one_check(n, nus, mus, trials, rng, tol).to_dict() for n, nus, mus in cases]
    print("-------------- ...Done --------------")
    return pd.DataFrame(rows)
