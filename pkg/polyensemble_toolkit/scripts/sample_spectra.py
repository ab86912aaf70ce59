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


import pandas as pd

from polyensemble_toolkit.generators.generator_models import sample_spectra
from polyensemble_toolkit.scripts.cli import addCommonArguments, resolveModel, run
from polyensemble_toolkit.utils.Statistics.utils import saveCsv, saveJson


def sampleSpectra(config):
    model = resolveModel(config)
    print("-------------- Running sampler for %s... --------------" % model.construction)
    points = sample_spectra(model, config.N, config.seed, config.threads)
    print("-------------- ...Done --------------")

    # One row per sample, ascending points
    df = pd.DataFrame(points, columns=["x%d" % (k + 1) for k in range(points.shape[1])])
    csv_file = saveCsv(df, config.out_path, "spectra.csv")
    saveJson({"model": model.to_dict(), "N": config.N, "seed": config.seed,
              "spectrum": model.spectrum_kind}, config.out_path, "spectra.json")
    return csv_file


def main(argv=None):
    import argparse
    import sys

    # Input parameters
    parser = addCommonArguments(argparse.ArgumentParser(description="Sample spectra of a matrix model"))
    args = parser.parse_args(argv)

    sys.exit(run(sampleSpectra, "sample", args))


if __name__ == '__main__':
    main()
