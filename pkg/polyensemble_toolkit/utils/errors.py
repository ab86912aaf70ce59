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


class PolyEnsembleError(Exception):
    """Base error. ``exit_code`` is the status the command line tools return."""
    exit_code = 1


class ConfigError(PolyEnsembleError, ValueError):
    exit_code = 2


class QuadratureError(PolyEnsembleError, ArithmeticError):
    exit_code = 3


class ContourError(QuadratureError):
    pass


class SeriesDivergenceError(QuadratureError):
    pass


class PreconditionError(PolyEnsembleError, ValueError):
    exit_code = 4


class StatisticalFailure(PolyEnsembleError):
    exit_code = 5

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def exitCode(error):
    return getattr(error, "exit_code", 1)
