# qdenoise/configuration.py

"""
Run configuration for qdenoise.

Built-in defaults, overlaid by a YAML config file, overlaid by command-line
flags. Every resolved run writes its configuration back out as YAML so the
run can be reproduced from its artifacts alone.
"""

import copy
import os
from typing import Any, Dict, Mapping, Optional

import psutil
import yaml

from .fileio import PathLike, atomic_write_text
from .noise import NoiseKind

THREADS_ENV = "QDEN_THREADS"

# Default structure and values; a config file may only override keys listed here.
DEFAULT_CONFIG: Dict[str, Any] = {
    'seed': 42,
    'threads': None,                 # None: QDEN_THREADS, then the core count
    'dataset': {
        'qubits': 5,
        'samples': 10000,
        'depth_min': 6,
        'depth_max': 9,
        'kinds': 'all',              # 'all' or a list of kind names
        'levels': [0.05, 0.1, 0.15, 0.2],
    },
    'model': {
        'filters': [32, 64, 128],
        'kernel_size': 3,
        'dropout': 0.1,
        'lambda': 1.0,
        'skip': True,                # input and diagonal marker also feed the output conv
    },
    'train': {
        'epochs': 100,
        'batch_size': 16,
        'lr': 1e-3,
        'lr_decay_factor': 0.5,
        'plateau_patience': 5,
        'early_stop_patience': 15,
        'validation_fraction': 0.2,
        'test_fraction': 0.2,
        'split_seed': 0,
    },
    'eval': {
        'batch_size': 64,
        'heatmaps': 0,
    },
}

CONFIG_HEADER = (
    "# qdenoise run configuration\n"
    "# Flags override these values, which override the built-in defaults.\n\n"
)


class ConfigError(ValueError):
    """Raised for unreadable, unknown or out-of-range configuration values."""


def _merge(base: Dict[str, Any], update: Mapping[str, Any], prefix: str = "") -> None:
    for key, value in update.items():
        path = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(f"Unknown configuration key '{path}'.")
        if isinstance(base[key], dict):
            if not isinstance(value, Mapping):
                raise ConfigError(f"'{path}' must be a mapping.")
            _merge(base[key], value, prefix=f"{path}.")
        else:
            base[key] = value


def default_config() -> Dict[str, Any]:
    return copy.deepcopy(DEFAULT_CONFIG)


def read_config_file(path: PathLike) -> Dict[str, Any]:
    """Parses a YAML config file as written, without defaults."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            user_config = yaml.safe_load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"Configuration file '{path}' not found.") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Error parsing '{path}': {e}") from e
    if user_config is None:
        return {}
    if not isinstance(user_config, dict):
        raise ConfigError(f"'{path}' must contain a mapping at the top level.")
    return user_config


def load_config(path: Optional[PathLike] = None) -> Dict[str, Any]:
    """
    Loads a YAML config file and merges it over the defaults.

    With no path the defaults are returned. Unknown keys and malformed YAML
    raise ConfigError.
    """
    config = default_config()
    if path is not None:
        _merge(config, read_config_file(path))
    return config


def apply_overrides(config: Dict[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Applies dotted-key overrides (``'train.epochs': 30``); ``None`` values are skipped."""
    config = copy.deepcopy(config)
    for dotted, value in overrides.items():
        if value is None:
            continue
        *parents, leaf = dotted.split('.')
        update: Dict[str, Any] = {leaf: value}
        for parent in reversed(parents):
            update = {parent: update}
        _merge(config, update)
    return config


def save_config(config: Dict[str, Any], path: PathLike) -> None:
    """Writes the resolved configuration as commented YAML."""
    body = yaml.dump(config, sort_keys=False, default_flow_style=False, indent=2)
    atomic_write_text(path, CONFIG_HEADER + body)


def resolve_kinds(value: Any) -> list:
    if value == 'all':
        return list(NoiseKind)
    if isinstance(value, str):
        value = [v for v in value.split(',') if v.strip()]
    return [NoiseKind.from_name(str(v)) for v in value]


def validate_config(config: Dict[str, Any], check_model_fit: bool = True) -> None:
    """
    Checks every field before any work starts.

    ``check_model_fit`` also requires the state side length to survive one
    halving per encoder block; dataset generation alone skips it.
    """
    ds, model, train, ev = config['dataset'], config['model'], config['train'], config['eval']

    def positive_int(section: str, key: str, value: Any, allow_zero: bool = False) -> None:
        if isinstance(value, bool) or not isinstance(value, int) or value < (0 if allow_zero else 1):
            bound = "non-negative" if allow_zero else "positive"
            raise ConfigError(f"'{section}.{key}' must be a {bound} integer, got {value!r}.")

    def fraction(section: str, key: str, value: Any) -> None:
        if not isinstance(value, (int, float)) or not 0.0 < float(value) < 1.0:
            raise ConfigError(f"'{section}.{key}' must lie strictly between 0 and 1, got {value!r}.")

    if not isinstance(config['seed'], int) or config['seed'] < 0:
        raise ConfigError(f"'seed' must be a non-negative integer, got {config['seed']!r}.")
    if config['threads'] is not None:
        positive_int('', 'threads', config['threads'])

    for key in ('qubits', 'samples', 'depth_min', 'depth_max'):
        positive_int('dataset', key, ds[key])
    if ds['qubits'] < 2:
        raise ConfigError(f"'dataset.qubits' must be at least 2, got {ds['qubits']}.")
    if ds['depth_min'] > ds['depth_max']:
        raise ConfigError(f"'dataset.depth_min' ({ds['depth_min']}) exceeds 'dataset.depth_max' ({ds['depth_max']}).")
    try:
        kinds = resolve_kinds(ds['kinds'])
    except ValueError as e:
        raise ConfigError(f"'dataset.kinds': {e}") from e
    if not kinds:
        raise ConfigError("'dataset.kinds' must name at least one noise kind.")
    levels = ds['levels']
    if not isinstance(levels, list) or not levels:
        raise ConfigError("'dataset.levels' must be a non-empty list.")
    for p in levels:
        if not isinstance(p, (int, float)) or not 0.0 <= float(p) <= 1.0:
            raise ConfigError(f"Noise level {p!r} is outside [0, 1].")

    filters = model['filters']
    if not isinstance(filters, list) or not filters:
        raise ConfigError("'model.filters' must be a non-empty list.")
    for f in filters:
        positive_int('model', 'filters', f)
    positive_int('model', 'kernel_size', model['kernel_size'])
    if model['kernel_size'] % 2 == 0:
        raise ConfigError(f"'model.kernel_size' must be odd, got {model['kernel_size']}.")
    if not isinstance(model['dropout'], (int, float)) or not 0.0 <= model['dropout'] < 1.0:
        raise ConfigError(f"'model.dropout' must lie in [0, 1), got {model['dropout']!r}.")
    if not isinstance(model['skip'], bool):
        raise ConfigError(f"'model.skip' must be true or false, got {model['skip']!r}.")
    if not isinstance(model['lambda'], (int, float)) or model['lambda'] < 0:
        raise ConfigError(f"'model.lambda' must be non-negative, got {model['lambda']!r}.")
    if check_model_fit and (2 ** ds['qubits']) % (2 ** len(filters)):
        raise ConfigError(
            f"{ds['qubits']} qubits give side length {2 ** ds['qubits']}, not divisible by 2^{len(filters)}."
        )

    positive_int('train', 'epochs', train['epochs'], allow_zero=True)
    for key in ('batch_size', 'plateau_patience', 'early_stop_patience'):
        positive_int('train', key, train[key])
    positive_int('train', 'split_seed', train['split_seed'], allow_zero=True)
    if not isinstance(train['lr'], (int, float)) or train['lr'] <= 0:
        raise ConfigError(f"'train.lr' must be positive, got {train['lr']!r}.")
    for key in ('lr_decay_factor', 'validation_fraction', 'test_fraction'):
        fraction('train', key, train[key])

    positive_int('eval', 'batch_size', ev['batch_size'])
    positive_int('eval', 'heatmaps', ev['heatmaps'], allow_zero=True)


def resolve_threads(value: Optional[int] = None) -> int:
    """Explicit value, then ``QDEN_THREADS``, then the logical core count."""
    if value is not None:
        if value <= 0:
            raise ConfigError(f"Thread count must be positive, got {value}.")
        return value
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            threads = int(env)
        except ValueError as e:
            raise ConfigError(f"{THREADS_ENV}={env!r} is not an integer.") from e
        if threads <= 0:
            raise ConfigError(f"{THREADS_ENV} must be positive, got {threads}.")
        return threads
    return psutil.cpu_count(logical=True) or 1
