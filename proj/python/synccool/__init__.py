"""Synchronization-enhanced cavity cooling simulator.

Configurations are the same JSON documents the command-line tool reads;
pass them as strings or dicts.
"""

import json as _json

from ._synccool import (
    ConsistencyError,
    InvalidParameter,
    NoSeparatrix,
    NumericalBlowup,
    PsdViolation,
    __version__,
    friction_threshold,
    p2_infinity,
    preset_names,
    salzburger_zn,
    separatrix_energy,
    solve_x2_density,
    solve_x2_pinned,
    solve_x2_uniform,
    steady_state,
    sweep,
)
from . import _synccool


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def preset(name):
    """Preset configuration as a dict."""
    return _json.loads(_synccool.preset(name))


def normalize_config(config):
    """Validated configuration with every default filled in."""
    return _json.loads(_synccool.normalize_config(_text(config)))


def simulate(config, threads=1):
    """Time series of a simulate-sc or simulate-mf configuration as numpy arrays."""
    return _synccool.simulate(_text(config), threads)


def run(config, out_dir, threads=1):
    """Run any command, write its output files and return the metadata dict."""
    return _json.loads(_synccool.run(_text(config), str(out_dir), threads))
