"""
Run configuration and the run manifest.

A run is described by one JSON document::

    {"coeffs": [[1, 1.0, 0.0]], "N": 256, "W": null, "precision": 53,
     "seed": 1, "trials": 20, "resampled": false, "stride": "display",
     "convention": "printed", "window": null, "eta": 1e-5, "grid": 401,
     "jobs": null}

Command-line flags override fields of the document, and the DYNRMT_SEED
environment variable overrides the seed last of all.
"""
import dataclasses
import hashlib
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .evalfn import CONVENTIONS, FourierSpec
from .exceptions import ConfigError
from .orbit import DEFAULT_PRECISION, MASK64, default_window


STRIDES = ('display', 'inline')

SEED_VARIABLE = 'DYNRMT_SEED'

DEFAULTS = {
    'coeffs': [[1, 1.0, 0.0]],
    'N': 256,
    'W': None,
    'precision': DEFAULT_PRECISION,
    'seed': 1,
    'trials': 20,
    'resampled': False,
    'stride': 'display',
    'convention': 'printed',
    'window': None,
    'eta': 1e-5,
    'grid': 401,
    'jobs': None,
}


def trial_seed(seed, trial):
    "The seed of one Monte-Carlo trial, split off the run seed."
    ss = np.random.SeedSequence([seed & MASK64, trial])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class EnsembleConfig:
    N: int
    spec: FourierSpec
    W: int = None
    seed: int = 1
    resampled: bool = False
    precision: int = DEFAULT_PRECISION
    stride: str = 'display'
    convention: str = 'printed'

    def __post_init__(self):
        if not isinstance(self.spec, FourierSpec):
            raise ConfigError("spec must be a FourierSpec, got %r" % (self.spec,))
        self.spec.require_mean_zero()
        if int(self.N) != self.N or self.N < 2:
            raise ConfigError("N must be an integer >= 2, got %r" % (self.N,))
        if self.W is None:
            object.__setattr__(self, 'W', default_window(self.N))
        if int(self.W) != self.W or self.W < 1:
            raise ConfigError("W must be a positive integer, got %r" % (self.W,))
        if not DEFAULT_PRECISION <= self.precision <= 64:
            raise ConfigError("precision must lie in 53..64, got %r" % (self.precision,))
        if self.stride not in STRIDES:
            raise ConfigError("stride must be one of %s, got %r" % (', '.join(STRIDES), self.stride))
        if self.convention not in CONVENTIONS:
            raise ConfigError(
                "convention must be one of %s, got %r" % (', '.join(CONVENTIONS), self.convention)
            )

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def for_trial(self, trial):
        return self.replace(seed=trial_seed(self.seed, trial))

    def to_json(self):
        data = self.spec.to_json()
        data.update({
            'N': self.N,
            'W': self.W,
            'seed': self.seed,
            'resampled': self.resampled,
            'precision': self.precision,
            'stride': self.stride,
            'convention': self.convention,
        })
        return data

    def fingerprint(self, ignore=()):
        "Short hash of the configuration, optionally leaving out some fields."
        data = {k: v for k, v in self.to_json().items() if k not in ignore}
        return digest(data)[:16]


@dataclass(frozen=True)
class RunConfig:
    ensemble: EnsembleConfig
    trials: int = 20
    window: tuple = None
    eta: float = 1e-5
    grid: int = 401
    jobs: int = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be positive, got %r" % (self.trials,))
        if self.eta <= 0:
            raise ConfigError("eta must be positive, got %r" % (self.eta,))
        if self.grid < 3:
            raise ConfigError("grid needs at least 3 points, got %r" % (self.grid,))
        if self.window is not None:
            try:
                lo, hi = (float(v) for v in self.window)
            except (TypeError, ValueError):
                raise ConfigError("window must be a pair [E_lo, E_hi], got %r" % (self.window,))
            if not lo < hi:
                raise ConfigError("window [%g, %g] is empty" % (lo, hi))
            object.__setattr__(self, 'window', (lo, hi))

    @property
    def N(self):
        return self.ensemble.N

    @property
    def seed(self):
        return self.ensemble.seed

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_json(self):
        data = self.ensemble.to_json()
        data.update({
            'trials': self.trials,
            'window': list(self.window) if self.window else None,
            'eta': self.eta,
            'grid': self.grid,
        })
        return data


def read_config(path):
    "Load a JSON configuration document."
    try:
        with open(path, encoding='utf-8') as source:
            data = json.load(source)
    except FileNotFoundError:
        raise ConfigError("config file %s does not exist" % path)
    except json.JSONDecodeError as e:
        raise ConfigError("config file %s is not valid JSON: %s" % (path, e))
    if not isinstance(data, dict):
        raise ConfigError("config file %s must hold a JSON object" % path)
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise ConfigError("unknown config fields: %s" % ', '.join(sorted(unknown)))
    return data


def build_config(data=None, overrides=None, environ=None):
    """Merge defaults, a config document, flag overrides and the environment.

    ``overrides`` values of None leave the underlying field alone.
    """
    merged = dict(DEFAULTS)
    merged.update(data or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    if environ is None:
        environ = os.environ
    if environ.get(SEED_VARIABLE):
        try:
            merged['seed'] = int(environ[SEED_VARIABLE])
        except ValueError:
            raise ConfigError("%s must be an integer, got %r" % (SEED_VARIABLE, environ[SEED_VARIABLE]))

    try:
        ensemble = EnsembleConfig(
            N=int(merged['N']),
            spec=FourierSpec.from_json(merged),
            W=None if merged['W'] is None else int(merged['W']),
            seed=int(merged['seed']),
            resampled=bool(merged['resampled']),
            precision=int(merged['precision']),
            stride=merged['stride'],
            convention=merged['convention'],
        )
        return RunConfig(
            ensemble=ensemble,
            trials=int(merged['trials']),
            window=merged['window'],
            eta=float(merged['eta']),
            grid=int(merged['grid']),
            jobs=None if merged['jobs'] is None else int(merged['jobs']),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError("invalid configuration: %s" % e)


def load_config(path=None, overrides=None, environ=None):
    data = read_config(path) if path else None
    return build_config(data, overrides, environ)


##########################################################################
# Run manifest
##########################################################################

def canonical_json(data):
    return json.dumps(data, sort_keys=True, separators=(',', ':'))


def digest(data):
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one command's outputs.

    The digest covers the command, its configuration and parameters, the
    seed and the tool version; wall-clock time and artifact hashes are
    recorded alongside but never hashed.
    """
    command: str
    config: dict
    parameters: dict
    seed: int
    version: str = __version__
    wall_clock: float = field(default_factory=time.time)
    artifacts: dict = field(default_factory=dict)

    @property
    def digest(self):
        return digest({
            'command': self.command,
            'config': self.config,
            'parameters': self.parameters,
            'seed': self.seed,
            'version': self.version,
        })

    def to_json(self):
        return {
            'command': self.command,
            'config': self.config,
            'parameters': self.parameters,
            'seed': self.seed,
            'version': self.version,
            'wall_clock': self.wall_clock,
            'artifacts': dict(self.artifacts),
            'digest': self.digest,
        }
