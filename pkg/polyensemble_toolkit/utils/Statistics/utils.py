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


import json
import os

import numpy as np
import pandas as pd

from polyensemble_toolkit.utils.errors import ConfigError


CSV_FLOAT_FORMAT = "%.17g"


def equalMassEdges(grid, mass, bins):
    """Interior edges splitting the cumulative ``mass`` on ``grid`` into equal parts."""
    targets = mass[-1] * np.arange(1, bins) / bins
    return np.interp(targets, mass, grid)


def equalWidthEdges(grid, mass, bins):
    return np.linspace(grid[0], grid[-1], bins + 1)[1:-1]


def getBinningMethod(method):
    if method == "equal-mass":
        return equalMassEdges
    elif method == "equal-width":
        return equalWidthEdges
    raise ConfigError("Unknown binning method: %s" % method)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


def saveJson(values, outPath, name):
    os.makedirs(outPath, exist_ok=True)
    path = os.path.join(outPath, name)
    with open(path, "w") as handle:
        json.dump(_jsonable(values), handle, indent=2, sort_keys=True)
    return path


def saveCsv(df, outPath, name):
    os.makedirs(outPath, exist_ok=True)
    path = os.path.join(outPath, name)
    df.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    return path


def readCsv(path):
    return pd.read_csv(path, float_precision="round_trip")
