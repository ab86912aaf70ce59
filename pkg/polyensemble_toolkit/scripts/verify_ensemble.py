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

from polyensemble_toolkit.ensembles.predictions import kernel_from_descriptor
from polyensemble_toolkit.ensembles.transforms import TransformSpec
from polyensemble_toolkit.scripts.cli import addCommonArguments, resolveModel, run, withCount
from polyensemble_toolkit.utils.errors import ConfigError, StatisticalFailure
from polyensemble_toolkit.utils.Statistics.methods import gram_suite, rank_suite, verify_model, \
    verify_transform_pipeline
from polyensemble_toolkit.utils.Statistics.utils import saveCsv, saveJson


logger = logging.getLogger(__name__)


def gramSuite(config):
    df = gram_suite(tol=config.tol)
    saveCsv(df, config.out_path, "gram_suite.csv")
    worst = float(df["max_offdiag"].max())
    print("Max off-diagonal: %.3e, max |diagonal - 1|: %.3e" % (worst, float(df["max_diag_error"].max())))
    if not df["passed"].all():
        raise StatisticalFailure("Biorthogonality fails for %d cases" % int((~df["passed"]).sum()),
                                 df.to_dict("records"))
    return df


def rankSuite(config):
    df = rank_suite(trials=config.N, seed=config.seed, tol=config.tol)
    saveCsv(df, config.out_path, "rank_suite.csv")
    print("Minimum counts at one: %s" % df["min_count"].tolist())
    if not df["passed"].all():
        raise StatisticalFailure("Rank at one fails", df.to_dict("records"))
    return df


SUITES = {"gram": gramSuite, "rank": rankSuite}


def verifyEnsemble(config):
    if config.suite is not None:
        if config.suite not in SUITES:
            raise ConfigError("Unknown suite %r (expected one of %s)" % (config.suite, ", ".join(SUITES)))
        return SUITES[config.suite](config)

    model = resolveModel(config)
    if config.transform is not None:
        report = verify_transform_pipeline(model, TransformSpec.from_dict(config.transform), config.N,
                                           config.seed, config.threads, config.bins)
    else:
        kernel = kernel_from_descriptor(withCount(config.kernel, config)) if config.kernel is not None else None
        # A replaced kernel says nothing about the model's characteristic polynomial
        report = verify_model(model, config.N, config.seed, config.threads, config.bins, kernel=kernel,
                              check_char_poly=kernel is None)

    saveJson(report.to_dict(), config.out_path, "verify_report.json")
    saveCsv(report.density.to_frame(), config.out_path, "verify_histogram.csv")
    print("chi2 p-value: %.4g, max |z|: %.3f -> %s" % (report.density.p_value,
                                                      float(abs(report.density.z).max()),
                                                      "PASS" if report.passed else "FAIL"))
    if not report.passed:
        raise StatisticalFailure("Verification of %s failed" % report.kernel, report.to_dict())
    return report


def main(argv=None):
    import argparse
    import sys

    # Input parameters
    parser = addCommonArguments(argparse.ArgumentParser(description="Monte Carlo and deterministic checks"))
    args = parser.parse_args(argv)

    sys.exit(run(verifyEnsemble, "verify", args))


if __name__ == '__main__':
    main()
