"""JSON run configurations.

Complex numbers are written either as plain reals or as ``[re, im]``
pairs, matrices as lists of rows.  Powers are linear numbers or strings
with a ``dB`` suffix (``"23 dB"``).
"""

import json
import os
import re

import numpy as np

from .errors import ConfigError, RelaySimError
from .channel import InterferenceEnv, interference_covariance
from .experiments import SweepSpec, SweepVariable
from .threehop import ThreeHopNetwork
from .twohop import MultiSourceTwoHopNetwork, Scheme, TwoHopNetwork

SEED_ENV = "RELAYSIM_SEED"

_DB = re.compile(r"^\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*dB\s*$", re.IGNORECASE)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return cfg


def parse_power(value, name="power"):
    if isinstance(value, bool):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _DB.match(value)
        if m:
            return float(10.0 ** (float(m.group(1)) / 10.0))
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(f"{name}: cannot read {value!r} as a power")


def parse_complex(value, name="value"):
    if isinstance(value, bool):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{name}: expected a real or an [re, im] pair, got {value!r}")


def parse_vector(value, name="vector"):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{name}: expected a non-empty list")
    return np.array([parse_complex(x, name) for x in value], dtype=complex)


def parse_matrix(value, name="matrix"):
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ConfigError(f"{name}: expected a list of rows")
    rows = [parse_vector(r, name) for r in value]
    if len({r.size for r in rows}) != 1:
        raise ConfigError(f"{name}: rows have different lengths")
    return np.vstack(rows)


def _require(cfg, key, section="config"):
    if key not in cfg:
        raise ConfigError(f"{section}: missing key {key!r}")
    return cfg[key]


def parse_covariance(cfg, n):
    """``K`` given inline, from an interference description, or identity."""
    if "K" in cfg and "interference" in cfg:
        raise ConfigError("give either 'K' or 'interference', not both")
    if "K" in cfg:
        return parse_matrix(cfg["K"], "K")
    if "interference" in cfg:
        spec = cfg["interference"]
        chans = [parse_vector(h, "interference.channels") for h in _require(spec, "channels", "interference")]
        if "powers" in spec:
            env = InterferenceEnv(chans, [parse_power(p, "interference.powers") for p in spec["powers"]])
        else:
            total = parse_power(_require(spec, "total_power", "interference"), "interference.total_power")
            env = InterferenceEnv.equal_split(chans, total)
        var = float(spec.get("local_noise_var", 1.0))
        return interference_covariance(env, var, n=n)
    return None


def _wrap(fn):
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError:
            raise
        except (RelaySimError, ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None

    inner.__name__ = fn.__name__
    inner.__doc__ = fn.__doc__
    return inner


@_wrap
def two_hop_network(cfg):
    f = parse_vector(_require(cfg, "f"), "f")
    g = parse_vector(_require(cfg, "g"), "g")
    return TwoHopNetwork(
        P=parse_power(_require(cfg, "P"), "P"),
        f=f,
        P_R=parse_power(_require(cfg, "P_R"), "P_R"),
        g=g,
        K=parse_covariance(cfg, f.size),
    )


@_wrap
def multi_source_network(cfg):
    g = parse_vector(_require(cfg, "g"), "g")
    sources = []
    for i, src in enumerate(_require(cfg, "sources")):
        sources.append(
            (
                parse_vector(_require(src, "f", f"sources[{i}]"), f"sources[{i}].f"),
                parse_power(_require(src, "P", f"sources[{i}]"), f"sources[{i}].P"),
            )
        )
    return MultiSourceTwoHopNetwork(
        sources=tuple(sources),
        P_R=parse_power(_require(cfg, "P_R"), "P_R"),
        g=g,
        K=parse_covariance(cfg, g.size),
    )


@_wrap
def three_hop_network(cfg):
    return ThreeHopNetwork(
        P0=parse_power(_require(cfg, "P0"), "P0"),
        f=parse_vector(_require(cfg, "f"), "f"),
        P1=parse_power(_require(cfg, "P1"), "P1"),
        H=parse_matrix(_require(cfg, "H"), "H"),
        P2=parse_power(_require(cfg, "P2"), "P2"),
        g=parse_vector(_require(cfg, "g"), "g"),
    )


def parse_schemes(value, default):
    if value is None:
        return tuple(default)
    try:
        return tuple(Scheme(str(s).upper()) for s in value)
    except ValueError as exc:
        raise ConfigError(f"schemes: {exc}") from None


def resolve_seed(flag_seed, cfg_seed, default=0):
    """Seed precedence: command-line flag, then RELAYSIM_SEED, then file."""
    if flag_seed is not None:
        return int(flag_seed)
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env!r} is not an integer") from None
    if cfg_seed is not None:
        if isinstance(cfg_seed, bool) or not isinstance(cfg_seed, int):
            raise ConfigError(f"seed must be an integer, got {cfg_seed!r}")
        return cfg_seed
    return default


@_wrap
def sweep_spec(cfg, seed=None, trials=None):
    var = SweepVariable(_require(cfg, "sweep_variable"))
    if "grid" in cfg and "grid_db" in cfg:
        raise ConfigError("give either 'grid' or 'grid_db', not both")
    if "grid_db" in cfg:
        grid = [10.0 ** (float(v) / 10.0) for v in cfg["grid_db"]]
    else:
        raw = _require(cfg, "grid")
        grid = [float(v) if var is SweepVariable.NUM_RELAYS else parse_power(v, "grid") for v in raw]
    fixed = cfg.get("fixed", {})
    kwargs = {}
    for key in ("P", "P_R", "P_I"):
        if key in fixed:
            kwargs[key] = parse_power(fixed[key], f"fixed.{key}")
    for key in ("N", "Q"):
        if key in fixed:
            kwargs[key] = int(fixed[key])
    return SweepSpec(
        sweep_variable=var,
        grid=tuple(grid),
        trials=int(trials if trials is not None else cfg.get("trials", 20_000)),
        seed=resolve_seed(seed, cfg.get("seed")),
        schemes=parse_schemes(cfg.get("schemes"), (Scheme.S11, Scheme.S10, Scheme.S00, Scheme.SIID)),
        **kwargs,
    )
