#!/usr/bin/env python
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


import numpy as np
import pandas as pd
from pathos.pools import ThreadPool
from scipy.integrate import trapezoid

from polyensemble_toolkit.ensembles.closed_kernels import DoubleContourKernel
from polyensemble_toolkit.ensembles.core import UNIT_INTERVAL
from polyensemble_toolkit.ensembles.kernels import density_grid
from polyensemble_toolkit.ensembles.predictions import kernel_from_descriptor, predicted_kernel
from polyensemble_toolkit.scripts.cli import addCommonArguments, resolveModel, run, withCount
from polyensemble_toolkit.utils.errors import ConfigError, QuadratureError
from polyensemble_toolkit.utils.Statistics.utils import saveCsv, saveJson


def resolveKernel(config):
    if config.kernel is not None:
        return kernel_from_descriptor(withCount(config.kernel, config))
    if config.model is not None:
        return predicted_kernel(resolveModel(config))
    if config.ensemble is not None:
        return kernel_from_descriptor({"kind": "ensemble", "ensemble": withCount(config.ensemble, config),
                                       "transform": config.transform})
    raise ConfigError("The kernel command needs --kernel, --model or --ensemble")


def kernelGrid(kernel, grid):
    lo, hi = kernel.support
    if (lo, hi) == UNIT_INTERVAL:
        spacing, lo, hi = "graded", 0.0, 1.0
    elif lo == 0.0:
        spacing, lo, hi = "geometric", 0.0, kernel.extent[1]
    else:
        spacing, (lo, hi) = "linear", kernel.extent
    return density_grid(float(grid.get("lo", lo)), float(grid.get("hi", hi)), int(grid.get("points", 2001)),
                        grid.get("spacing", spacing))


def evaluateDensity(kernel, x, threads, chunk=256):
    chunks = [x[start:start + chunk] for start in range(0, x.size, chunk)]
    if threads == 1 or len(chunks) == 1:
        return np.concatenate([kernel.density(c) for c in chunks])
    pool = ThreadPool(nodes=threads)
    try:
        return np.concatenate(pool.map(kernel.density, chunks))
    finally:
        pool.close()
        pool.join()
        pool.clear()


def computeKernel(config):
    kernel = resolveKernel(config)
    grid = dict(config.grid)
    x = kernelGrid(kernel, grid)
    matrix_points = int(grid.get("matrix_points", 41))
    xm = np.linspace(x[0], x[-1], matrix_points)
    diagnostics = {"kernel": kernel.label, "n": kernel.n, "support": list(kernel.support),
                   "grid": {"lo": float(x[0]), "hi": float(x[-1]), "points": int(x.size)}}

    print("-------------- Running kernel evaluation for %s... --------------" % kernel.label)
    try:
        density = evaluateDensity(kernel, x, config.threads)
        K = kernel.matrix(xm, xm)
        checkpoints = np.quantile(x, [0.25, 0.5, 0.75])
        diagnostics.update(kernel.diagnostics(checkpoints) if isinstance(kernel, DoubleContourKernel)
                           else kernel.diagnostics())
    except QuadratureError as error:
        diagnostics.update(kernel.diagnostics())
        diagnostics["error"] = str(error)
        saveJson(diagnostics, config.out_path, "kernel_diagnostics.json")
        raise
    print("-------------- ...Done --------------")

    diagnostics["trace_trapezoid"] = float(trapezoid(density, x))
    saveCsv(pd.DataFrame({"x": x, "density": density}), config.out_path, "kernel_density.csv")
    X, Y = np.meshgrid(xm, xm, indexing="ij")
    saveCsv(pd.DataFrame({"x": X.ravel(), "y": Y.ravel(), "K": K.ravel()}), config.out_path, "kernel_grid.csv")
    saveJson(diagnostics, config.out_path, "kernel_diagnostics.json")
    return diagnostics


def main(argv=None):
    import argparse
    import sys

    # Input parameters
    parser = addCommonArguments(argparse.ArgumentParser(description="Evaluate a correlation kernel on a grid"))
    args = parser.parse_args(argv)

    sys.exit(run(computeKernel, "kernel", args))


if __name__ == '__main__':
    main()
