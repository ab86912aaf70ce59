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
import os
from dataclasses import asdict, dataclass, field, fields

import psutil
import yaml

from polyensemble_toolkit.utils.errors import ConfigError


logger = logging.getLogger(__name__)

THREADS_ENV = "POLYENSEMBLE_THREADS"
COMMANDS = ("sample", "kernel", "verify", "char-poly", "gram")


def default_threads():
    """Worker count from POLYENSEMBLE_THREADS, else the number of physical cores."""
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            threads = int(value)
        except ValueError:
            raise ConfigError("%s must be an integer, got %r" % (THREADS_ENV, value))
        if threads < 1:
            raise ConfigError("%s must be positive, got %d" % (THREADS_ENV, threads))
        return threads
    return psutil.cpu_count(logical=False) or 1


def setup_logging(verbosity=0):
    level = logging.DEBUG if verbosity > 0 else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


@dataclass
class RunConfig:
    command: str
    model: dict = None
    ensemble: dict = None
    transform: dict = None
    kernel: dict = None
    suite: str = None
    n: int = None
    N: int = 1000
    bins: int = 40
    seed: int = 0
    threads: int = None
    tol: float = 1e-8
    grid: dict = field(default_factory=dict)
    out_path: str = "."

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError("Unknown command %r (expected one of %s)" % (self.command, ", ".join(COMMANDS)))
        for name in ("model", "ensemble", "transform", "kernel", "grid"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, dict):
                raise ConfigError("%s must be a mapping, got %r" % (name, value))
        for name in ("N", "bins", "threads", "n"):
            value = getattr(self, name)
            if value is not None and (isinstance(value, bool) or int(value) != value or value < 1):
                raise ConfigError("%s must be a positive integer, got %r" % (name, value))
        if self.seed is None or int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer, got %r" % (self.seed,))
        if self.tol is None or not self.tol > 0.0:
            raise ConfigError("tol must be positive, got %r" % (self.tol,))
        if self.threads is None:
            self.threads = default_threads()

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError("Unknown configuration keys: %s" % ", ".join(unknown))
        if "command" not in values:
            raise ConfigError("Configuration has no command")
        try:
            return cls(**values)
        except (TypeError, ValueError) as error:
            if isinstance(error, ConfigError):
                raise
            raise ConfigError("Invalid configuration: %s" % error)


def load_config(command, config_file=None, overrides=None):
    """
    RunConfig from a YAML/JSON file with non-None ``overrides`` taking
    precedence. Descriptor values given as strings are parsed as YAML.
    """
    values = {}
    if config_file is not None:
        try:
            with open(config_file) as handle:
                values = yaml.safe_load(handle) or {}
        except (OSError, yaml.YAMLError) as error:
            raise ConfigError("Cannot read configuration %s: %s" % (config_file, error))
        if not isinstance(values, dict):
            raise ConfigError("Configuration %s is not a mapping" % config_file)
    values = dict(values)
    values.setdefault("command", command)
    if values["command"] != command:
        raise ConfigError("Configuration is for %r, not %r" % (values["command"], command))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in ("model", "ensemble", "transform", "kernel", "grid") and isinstance(value, str):
            try:
                value = yaml.safe_load(value)
            except yaml.YAMLError as error:
                raise ConfigError("Cannot parse --%s: %s" % (key, error))
            if key == "model" and isinstance(value, str):
                value = {"construction": value}
        values[key] = value
    config = RunConfig.from_dict(values)
    logger.debug("Configuration: %s", config)
    return config
