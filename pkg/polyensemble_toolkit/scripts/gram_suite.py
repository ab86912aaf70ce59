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

from polyensemble_toolkit.ensembles.core import build_base_system, gram_defect
from polyensemble_toolkit.ensembles.transforms import TransformSpec, transform_system
from polyensemble_toolkit.scripts.cli import addCommonArguments, run, withCount
from polyensemble_toolkit.scripts.verify_ensemble import gramSuite
from polyensemble_toolkit.utils.errors import StatisticalFailure
from polyensemble_toolkit.utils.Statistics.utils import saveCsv, saveJson


def gramMatrix(config):
    if config.ensemble is None:
        return gramSuite(config)
    ensemble = withCount(config.ensemble, config)
    system = build_base_system(ensemble)
    summary = {"ensemble": ensemble}
    if config.transform is not None:
        system = transform_system(system, TransformSpec.from_dict(config.transform))
        summary["transform"] = config.transform
    return saveGram(system.gram(), config, summary)


def saveGram(G, config, summary):
    off, diag = gram_defect(G)
    summary.update({"max_offdiag": off, "max_diag_error": diag, "passed": off < config.tol and diag < config.tol})
    n = G.shape[0]
    saveCsv(pd.DataFrame(G, columns=["Q%d" % k for k in range(n)]).assign(P=np.arange(n)),
            config.out_path, "gram_matrix.csv")
    saveJson(summary, config.out_path, "gram_matrix.json")
    print("Max off-diagonal: %.3e, max |diagonal - 1|: %.3e" % (off, diag))
    if not summary["passed"]:
        raise StatisticalFailure("Gram matrix is not the identity within %g" % config.tol, summary)
    return G


def main(argv=None):
    import argparse
    import sys

    # Input parameters
    parser = addCommonArguments(argparse.ArgumentParser(description="Gram matrices of biorthogonal systems"))
    args = parser.parse_args(argv)

    sys.exit(run(gramMatrix, "gram", args))


if __name__ == '__main__':
    main()
