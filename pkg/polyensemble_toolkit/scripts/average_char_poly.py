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

from polyensemble_toolkit.ensembles.core import build_base_system
from polyensemble_toolkit.ensembles.predictions import predicted_char_poly
from polyensemble_toolkit.ensembles.transforms import TransformSpec, avg_char_poly_transformed
from polyensemble_toolkit.generators.generator_models import sample_spectra
from polyensemble_toolkit.scripts.cli import addCommonArguments, resolveModel, run, withCount
from polyensemble_toolkit.utils.errors import ConfigError, StatisticalFailure
from polyensemble_toolkit.utils.Statistics.methods import compare_char_poly
from polyensemble_toolkit.utils.Statistics.utils import saveCsv, saveJson


def averageCharPoly(config):
    summary = {}
    if config.model is not None:
        model = resolveModel(config)
        p = predicted_char_poly(model)
        summary["model"] = model.to_dict()
    elif config.ensemble is not None:
        system = build_base_system(withCount(config.ensemble, config))
        p = system.char_poly
        if config.transform is not None:
            p = avg_char_poly_transformed(p, TransformSpec.from_dict(config.transform))
        summary["ensemble"] = config.ensemble
        summary["transform"] = config.transform
    else:
        raise ConfigError("The char-poly command needs --model or --ensemble")

    coef = np.asarray(p.coef, dtype=float)
    summary["coefficients"] = coef.tolist()
    saveCsv(pd.DataFrame({"degree": np.arange(coef.size), "coefficient": coef}), config.out_path,
            "char_poly.csv")

    # Monte Carlo check only makes sense for a sampled model
    comparison = None
    if config.model is not None:
        points = sample_spectra(model, config.N, config.seed, config.threads)
        comparison = compare_char_poly(points, p, config.grid.get("x"))
        summary["monte_carlo"] = comparison.to_dict()
    saveJson(summary, config.out_path, "char_poly.json")
    if comparison is not None and not comparison.passed:
        raise StatisticalFailure("Average characteristic polynomial off by more than 3 standard errors",
                                 summary)
    return p


def main(argv=None):
    import argparse
    import sys

    # Input parameters
    parser = addCommonArguments(argparse.ArgumentParser(description="Average characteristic polynomial"))
    args = parser.parse_args(argv)

    sys.exit(run(averageCharPoly, "char-poly", args))


if __name__ == '__main__':
    main()
