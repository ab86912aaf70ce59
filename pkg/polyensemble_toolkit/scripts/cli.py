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


import logging
import sys

import numpy as np

from polyensemble_toolkit.generators.generator_models import ModelSpec
from polyensemble_toolkit.utils.config import load_config, setup_logging
from polyensemble_toolkit.utils.errors import ConfigError, PolyEnsembleError, QuadratureError, exitCode


logger = logging.getLogger(__name__)

CONFIG_KEYS = ("model", "ensemble", "transform", "kernel", "suite", "n", "N", "bins", "seed", "threads",
               "tol", "grid", "out_path")


def addCommonArguments(parser):
    parser.add_argument('--config', type=str, required=False, default=None)
    parser.add_argument('--model', type=str, required=False, default=None)
    parser.add_argument('--ensemble', type=str, required=False, default=None)
    parser.add_argument('--transform', type=str, required=False, default=None)
    parser.add_argument('--kernel', type=str, required=False, default=None)
    parser.add_argument('--suite', type=str, required=False, default=None)
    parser.add_argument('--n', type=int, required=False, default=None)
    parser.add_argument('--N', type=int, required=False, default=None)
    parser.add_argument('--bins', type=int, required=False, default=None)
    parser.add_argument('--seed', type=int, required=False, default=None)
    parser.add_argument('--threads', type=int, required=False, default=None)
    parser.add_argument('--tol', type=float, required=False, default=None)
    parser.add_argument('--grid', type=str, required=False, default=None)
    parser.add_argument('--out_path', type=str, required=False, default=None)
    parser.add_argument('-v', '--verbose', action='count', default=0)
    return parser


def resolveModel(config, key="model"):
    """ModelSpec from the config, taking n from --n when the descriptor has none."""
    descriptor = getattr(config, key)
    if descriptor is None:
        raise ConfigError("This command needs a --%s descriptor" % key)
    descriptor = dict(descriptor)
    if "n" not in descriptor:
        if config.n is None:
            raise ConfigError("Model %s has no n and --n is not given" % descriptor)
        descriptor["n"] = config.n
    return ModelSpec.from_dict(descriptor)


def withCount(descriptor, config):
    descriptor = dict(descriptor)
    if "n" not in descriptor and config.n is not None:
        descriptor["n"] = config.n
    return descriptor


def run(function, command, args):
    """
    Run ``function(config)`` and map errors onto exit codes. Numerical
    failures raised by numpy or scipy count as quadrature failures, other
    ValueErrors as configuration errors.
    """
    setup_logging(getattr(args, "verbose", 0))
    overrides = {key: getattr(args, key, None) for key in CONFIG_KEYS}
    try:
        config = load_config(command, args.config, overrides)
        function(config)
    except PolyEnsembleError as error:
        logger.error("%s: %s", type(error).__name__, error)
        return exitCode(error)
    except (ArithmeticError, np.linalg.LinAlgError) as error:
        logger.error("Numerical failure (%s): %s", type(error).__name__, error)
        return QuadratureError.exit_code
    except ValueError as error:
        logger.error("Invalid input (%s): %s", type(error).__name__, error)
        return ConfigError.exit_code
    return 0


def main():
    from polyensemble_toolkit.scripts import (average_char_poly, compute_kernel, gram_suite, sample_spectra,
                                              verify_ensemble)

    commands = {"sample": sample_spectra.main, "kernel": compute_kernel.main, "verify": verify_ensemble.main,
                "char-poly": average_char_poly.main, "gram": gram_suite.main}
    if len(sys.argv) < 2 or sys.argv[1] not in commands:
        print("usage: polyensemble {%s} [options]" % ",".join(commands))
        sys.exit(2)
    command = sys.argv.pop(1)
    sys.argv[0] = "polyensemble %s" % command
    commands[command]()


if __name__ == '__main__':
    main()
