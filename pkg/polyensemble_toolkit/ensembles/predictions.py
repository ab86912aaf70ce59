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
What theory predicts for a sampled model: the biorthogonal system, the
correlation kernel and the average characteristic polynomial of its
spectrum. Closed-form kernels are used when the model has one.
"""

import logging

import numpy as np
from numpy.polynomial import Polynomial

from polyensemble_toolkit.ensembles import closed_kernels as ck
from polyensemble_toolkit.ensembles import transforms as tr
from polyensemble_toolkit.ensembles.core import (build_base_system, degenerate_ensemble, gue_ensemble,
                                                laguerre_ensemble)
from polyensemble_toolkit.ensembles.kernels import gue_christoffel_darboux, kernel_from_system
from polyensemble_toolkit.generators.generator_models import (GINIBRE_CHAIN, GUE_PLUS, TRUNCATED_CHAIN,
                                                              ModelSpec)
from polyensemble_toolkit.utils import polynomials as poly
from polyensemble_toolkit.utils.errors import ConfigError, PreconditionError


logger = logging.getLogger(__name__)


def _factorSpecs(model):
    if model.construction == GINIBRE_CHAIN:
        return [tr.ginibre(nu) for nu in model.nu]
    return [tr.truncated(nu, mu) for nu, mu in zip(model.nu, model.mu)]


def _checkFullRankFactors(model):
    if model.construction == TRUNCATED_CHAIN and model.mu and min(model.mu) < model.n:
        raise PreconditionError(
            "Truncations with mu < n = %d of a random source leave no polynomial ensemble (mu = %s)"
            % (model.n, model.mu))


def _deterministic(model):
    return PreconditionError("Model %s has a deterministic spectrum and no correlation kernel"
                             % model.to_dict())


def model_system(model):
    """Biorthogonal system of the model's spectrum, built through the transforms."""
    kind = model.source["kind"]
    if model.construction == GUE_PLUS:
        if kind == "zero":
            system, extra = gue_ensemble(model.n)[1], model.summands - 1
        elif kind == "diag":
            system, extra = degenerate_ensemble(model.source["a"], positive=False), model.summands
        else:
            system, extra = model_system(model.inner), model.summands
        for _ in range(extra):
            system = tr.transform_system(system, tr.gue_add())
        return system

    if kind == "identity":
        if not model.nu:
            raise _deterministic(model)
        if model.construction == TRUNCATED_CHAIN:
            return ck.truncated_product_system(model.n, model.nu, model.mu)
        system, specs = laguerre_ensemble(model.n, model.nu[0])[1], _factorSpecs(model)[1:]
    else:
        _checkFullRankFactors(model)
        system = degenerate_ensemble(model.source["a"]) if kind == "diag" else model_system(model.inner)
        specs = _factorSpecs(model)
    for spec in specs:
        system = tr.transform_system(system, spec)
    return system


def forced_unit_count(model):
    """Squared singular values sitting at 1 in every sample: n - Σ mu for a truncation chain on the identity."""
    if model.construction != TRUNCATED_CHAIN or model.source["kind"] != "identity" or not model.mu:
        return 0
    return max(model.n - sum(model.mu), 0)


def predicted_kernel(model):
    """Correlation kernel of the model's spectrum."""
    kind = model.source["kind"]
    if model.construction == GUE_PLUS:
        if kind == "diag" and model.summands == 0:
            raise _deterministic(model)
        return kernel_from_system(model_system(model))
    if not model.nu:
        if kind == "model":
            return predicted_kernel(model.inner)
        raise _deterministic(model)
    if model.construction == GINIBRE_CHAIN:
        if kind == "identity":
            return ck.product_ginibre_kernel(model.n, model.nu)
        if kind == "diag":
            return ck.degenerate_ginibre_kernel(model.source["a"], model.nu)
        spec = tr.iterated_spec(tr.GINIBRE, model.nu)
    else:
        if kind == "identity":
            return ck.truncated_product_kernel(model.n, model.nu, model.mu)
        _checkFullRankFactors(model)
        spec = tr.iterated_spec(tr.TRUNCATED, model.nu, model.mu)
    base = degenerate_ensemble(model.source["a"]) if kind == "diag" else model_system(model.inner)
    return tr.transform_kernel(kernel_from_system(base), spec)


def predicted_char_poly(model):
    """Average characteristic polynomial E Π (x - x_j) of the model's spectrum."""
    kind = model.source["kind"]
    if model.construction == GUE_PLUS:
        if kind == "zero":
            p, extra = poly.hermite_monic(model.n), model.summands - 1
        elif kind == "diag":
            p, extra = poly.poly_from_roots(model.source["a"]), model.summands
        else:
            p, extra = predicted_char_poly(model.inner), model.summands
        for _ in range(extra):
            p = tr.inv_weierstrass(p)
        return p

    specs = _factorSpecs(model)
    if kind == "identity":
        if model.construction == TRUNCATED_CHAIN and model.nu:
            coef = ck.truncated_p(model.n, model.nu, model.mu)
            return Polynomial([float(c) / coef[-1] for c in coef])
        if not model.nu:
            return poly.poly_from_roots(np.ones(model.n))
        p, specs = poly.laguerre_monic(model.n, model.nu[0]), specs[1:]
    elif kind == "diag":
        p = poly.poly_from_roots(model.source["a"])
    else:
        p = predicted_char_poly(model.inner)
    for spec in specs:
        p = tr.avg_char_poly_transformed(p, spec)
    return p


# ----- Kernels from descriptors -----
def _productKernel(descriptor):
    spec = ck.ProductSpec.from_dict(descriptor)
    source = spec.source.get("kind", "identity")
    if spec.kind == ck.GINIBRE_PRODUCT:
        if source == "diag":
            return ck.degenerate_ginibre_kernel(spec.source["a"], spec.nu)
        if descriptor.get("form") == "alternative":
            return ck.alternative_product_ginibre_kernel(spec.n, spec.nu)
        return ck.product_ginibre_kernel(spec.n, spec.nu)
    if source == "diag":
        model = ModelSpec(TRUNCATED_CHAIN, spec.n, spec.nu, spec.mu, source=spec.source)
        return predicted_kernel(model)
    return ck.truncated_product_kernel(spec.n, spec.nu, spec.mu, descriptor.get("form", "double-contour"))


def kernel_from_descriptor(descriptor):
    """
    Kernel from a JSON descriptor. Kinds: wishart, gue (Christoffel-Darboux),
    ginibre-product, truncated-product, ensemble (with an optional transform)
    and model (the prediction for a sampled model).
    """
    if not isinstance(descriptor, dict):
        raise ConfigError("Kernel descriptor must be a mapping, got %r" % (descriptor,))
    kind = descriptor.get("kind")
    try:
        if kind == "wishart":
            return ck.wishart_kernel(int(descriptor["n"]), int(descriptor.get("nu", 0)))
        if kind == "gue":
            return gue_christoffel_darboux(int(descriptor["n"]))
        if kind in (ck.GINIBRE_PRODUCT, ck.TRUNCATED_PRODUCT):
            return _productKernel(descriptor)
        if kind == "ensemble":
            kernel = kernel_from_system(build_base_system(descriptor["ensemble"]))
            if descriptor.get("transform"):
                kernel = tr.transform_kernel(kernel, tr.TransformSpec.from_dict(descriptor["transform"]))
            return kernel
        if kind == "model":
            return predicted_kernel(ModelSpec.from_dict(descriptor["model"]))
    except KeyError as error:
        raise ConfigError("Kernel descriptor %s misses %s" % (descriptor, error))
    raise ConfigError("Unknown kernel kind: %s" % kind)
