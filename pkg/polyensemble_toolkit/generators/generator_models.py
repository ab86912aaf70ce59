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
Matrix-model samplers.

A model is one of

    gue-plus:         H_1 + ... + H_k + M          (eigenvalues)
    ginibre-chain:    G_r ... G_1 X                (squared singular values)
    truncated-chain:  T_r ... T_1 X                (squared singular values)

with M / X taken from a source: zero, identity, a fixed diagonal, or another
model sampled independently. Factor j has n + nu_j rows and as many columns
as the matrix it multiplies.
"""

import logging
import sys
from dataclasses import dataclass

import numpy as np
from pathos.pools import ThreadPool
from tqdm import tqdm

from polyensemble_toolkit.utils.config import default_threads
from polyensemble_toolkit.utils.errors import ConfigError, PreconditionError
from polyensemble_toolkit.utils.random_matrices import (EIGENVALUES, SQUARED_SINGULAR_VALUES, SpectrumSample,
                                                        eigenvalues_hermitian_batch, ginibre_batch, gue_batch,
                                                        haar_unitary_batch, squared_singular_values_batch)


logger = logging.getLogger(__name__)

GUE_PLUS = "gue-plus"
GINIBRE_CHAIN = "ginibre-chain"
TRUNCATED_CHAIN = "truncated-chain"
CONSTRUCTIONS = (GUE_PLUS, GINIBRE_CHAIN, TRUNCATED_CHAIN)
SOURCE_KINDS = ("zero", "identity", "diag", "model")
BLOCK = 4096
MODEL_ALIASES = {
    "gue": {"construction": GUE_PLUS, "summands": 1, "source": {"kind": "zero"}},
    "laguerre": {"construction": GINIBRE_CHAIN, "nu": [0], "source": {"kind": "identity"}},
}


@dataclass
class ModelSpec:
    construction: str
    n: int
    nu: tuple = ()
    mu: tuple = ()
    summands: int = 1
    source: dict = None

    def __post_init__(self):
        if self.construction not in CONSTRUCTIONS:
            raise ConfigError("Unknown model construction: %s" % self.construction)
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ConfigError("Model needs a positive integer n, got %r" % (self.n,))
        self.n = int(self.n)
        self.nu = tuple(int(v) for v in self.nu)
        self.mu = tuple(int(m) for m in self.mu)
        if self.nu and min(self.nu) < 0:
            raise ConfigError("Every nu must be nonnegative, got %s" % (self.nu,))
        if self.source is None:
            self.source = {"kind": "zero" if self.construction == GUE_PLUS else "identity"}
        self.source = dict(self.source)
        self._checkSource()
        if self.construction == GUE_PLUS:
            if self.nu or self.mu:
                raise ConfigError("gue-plus takes no nu / mu lists")
            if self.summands < 0 or (self.summands == 0 and self.source["kind"] == "zero"):
                raise ConfigError("gue-plus needs at least one summand or a nonzero source")
        elif self.construction == TRUNCATED_CHAIN:
            if len(self.mu) != len(self.nu) or (self.mu and min(self.mu) < 1):
                raise ConfigError("truncated-chain needs one mu >= 1 per nu")
            previous = self.source_offset
            for nu, mu in zip(self.nu, self.mu):
                if nu + mu < previous:
                    raise ConfigError("Truncation %d x %d does not fit a unitary of size %d"
                                      % (self.n + nu, self.n + previous, self.n + nu + mu))
                previous = nu
        elif self.mu:
            raise ConfigError("ginibre-chain takes no mu list")

    def _checkSource(self):
        kind = self.source.get("kind")
        if kind not in SOURCE_KINDS:
            raise ConfigError("Unknown source kind: %s" % kind)
        hermitian = self.construction == GUE_PLUS
        if kind == "zero" and not hermitian:
            raise ConfigError("A product chain needs a nonzero source")
        if kind == "identity" and hermitian:
            raise ConfigError("Use the diag source for a shift of gue-plus")
        if kind == "diag":
            a = np.asarray(self.source.get("a", []), dtype=float).ravel()
            if a.size != self.n:
                raise ConfigError("Source has %d values, model has n = %d" % (a.size, self.n))
            if not hermitian and np.any(a <= 0.0):
                raise ConfigError("Squared singular values of a source must be positive")
            self.source["a"] = a.tolist()
        if kind == "model":
            inner = self.source.get("model")
            inner = inner if isinstance(inner, ModelSpec) else ModelSpec.from_dict(inner or {})
            if inner.n != self.n:
                raise ConfigError("Source model has n = %d, model has n = %d" % (inner.n, self.n))
            if inner.spectrum_kind != (EIGENVALUES if hermitian else SQUARED_SINGULAR_VALUES):
                raise ConfigError("Source model %s does not fit a %s" % (inner.construction, self.construction))
            self.source["model"] = inner

    @property
    def r(self):
        return len(self.nu)

    @property
    def spectrum_kind(self):
        return EIGENVALUES if self.construction == GUE_PLUS else SQUARED_SINGULAR_VALUES

    @property
    def source_offset(self):
        """Rows of the source minus n."""
        if self.source["kind"] == "model":
            inner = self.source["model"]
            return inner.nu[-1] if inner.nu else inner.source_offset
        return 0

    @property
    def rows(self):
        if self.construction == GUE_PLUS:
            return self.n
        return self.n + (self.nu[-1] if self.nu else self.source_offset)

    @property
    def inner(self):
        return self.source["model"] if self.source["kind"] == "model" else None

    def to_dict(self):
        out = {"construction": self.construction, "n": self.n}
        if self.construction == GUE_PLUS:
            out["summands"] = self.summands
        else:
            out["nu"] = list(self.nu)
        if self.construction == TRUNCATED_CHAIN:
            out["mu"] = list(self.mu)
        source = dict(self.source)
        if source["kind"] == "model":
            source["model"] = source["model"].to_dict()
        out["source"] = source
        return out

    @classmethod
    def from_dict(cls, descriptor):
        if not isinstance(descriptor, dict):
            raise ConfigError("Model descriptor must be a mapping, got %r" % (descriptor,))
        if descriptor.get("construction") in MODEL_ALIASES:
            descriptor = dict(MODEL_ALIASES[descriptor["construction"]], **{k: v for k, v in descriptor.items()
                                                                           if k != "construction"})
        known = {"construction", "n", "nu", "mu", "summands", "source"}
        unknown = sorted(set(descriptor) - known)
        if unknown:
            raise ConfigError("Unknown model keys: %s" % ", ".join(unknown))
        try:
            return cls(descriptor["construction"], descriptor["n"], descriptor.get("nu", ()),
                       descriptor.get("mu", ()), int(descriptor.get("summands", 1)), descriptor.get("source"))
        except KeyError as error:
            raise ConfigError("Model descriptor %s misses %s" % (descriptor, error))
        except (TypeError, ValueError) as error:
            if isinstance(error, ConfigError):
                raise
            raise ConfigError("Invalid model descriptor %s: %s" % (descriptor, error))


def gue_model(n):
    return ModelSpec(GUE_PLUS, n, summands=1, source={"kind": "zero"})


def compose(base, spec):
    """Model for the transform ``spec`` (a TransformSpec) applied to samples of ``base``."""
    source = {"kind": "model", "model": base}
    if not spec.multiplicative:
        if base.spectrum_kind != EIGENVALUES:
            raise PreconditionError("GUE addition needs a Hermitian base model")
        return ModelSpec(GUE_PLUS, base.n, summands=1, source=source)
    if base.spectrum_kind != SQUARED_SINGULAR_VALUES:
        raise PreconditionError("Multiplicative transforms need a base model of squared singular values")
    if spec.family == "ginibre":
        return ModelSpec(GINIBRE_CHAIN, base.n, spec.nu, source=source)
    if spec.family == "truncated":
        return ModelSpec(TRUNCATED_CHAIN, base.n, spec.nu, spec.mu, source=source)
    raise PreconditionError("No matrix model samples the transform %s" % spec.label)


# ----- Block sampling -----
def _sourceMatrices(model, size, rng):
    kind = model.source["kind"]
    n = model.n
    if kind == "zero":
        return np.zeros((size, n, n), dtype=complex)
    if kind == "identity":
        return np.broadcast_to(np.eye(n, dtype=complex), (size, n, n))
    if kind == "diag":
        a = np.asarray(model.source["a"], dtype=float)
        diagonal = a if model.construction == GUE_PLUS else np.sqrt(a)
        return np.broadcast_to(np.diag(diagonal).astype(complex), (size, n, n))
    return sample_matrices(model.source["model"], size, rng)


def sample_matrices(model, size, rng):
    """(size, rows, n) stack of matrices drawn from ``model``."""
    X = _sourceMatrices(model, size, rng)
    n = model.n
    if model.construction == GUE_PLUS:
        for _ in range(model.summands):
            X = X + gue_batch(n, size, rng)
        return X
    for j, nu in enumerate(model.nu):
        cols = X.shape[-2]
        if model.construction == GINIBRE_CHAIN:
            W = ginibre_batch(n + nu, cols, size, rng)
        else:
            W = haar_unitary_batch(n + nu + model.mu[j], size, rng)[:, :n + nu, :cols]
        X = W @ X
    return X


def sample_block(model, size, rng):
    """(size, n) array of ascending spectra."""
    X = sample_matrices(model, size, rng)
    if model.spectrum_kind == EIGENVALUES:
        return eigenvalues_hermitian_batch(X)
    return np.clip(squared_singular_values_batch(X), 0.0, None)


def sample_spectra(model, N, seed=0, threads=None, block=BLOCK, progress=True):
    """
    (N, n) array of spectra. Block b is drawn from the b-th child of
    SeedSequence(seed), so the output depends only on (model, N, seed).
    """
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise ConfigError("Sample count must be a positive integer, got %r" % (N,))
    N = int(N)
    threads = threads or default_threads()
    sizes = [min(block, N - start) for start in range(0, N, block)]
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def draw(index):
        return sample_block(model, sizes[index], np.random.default_rng(children[index]))

    logger.debug("Sampling %d spectra of %s in %d blocks on %d threads", N, model.construction,
                 len(sizes), threads)
    if threads == 1 or len(sizes) == 1:
        blocks = [draw(i) for i in tqdm(range(len(sizes)), file=sys.stdout, disable=not progress)]
    else:
        pool = ThreadPool(nodes=threads)
        try:
            blocks = list(tqdm(pool.imap(draw, range(len(sizes))), total=len(sizes), file=sys.stdout,
                               disable=not progress))
        finally:
            pool.close()
            pool.join()
            pool.clear()
    return np.concatenate(blocks, axis=0)


def sample_model(model, N, seed=0, threads=None, progress=False):
    """N independent SpectrumSample draws of ``model``."""
    points = sample_spectra(model, N, seed, threads, progress=progress)
    return [SpectrumSample(row, model.spectrum_kind) for row in points]
