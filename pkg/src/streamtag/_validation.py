"""Small argument checks shared by the config objects and estimators."""

import math
import numbers

from .exceptions import ConfigError


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_non_negative_real(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise ConfigError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def check_probability(value, name):
    value = check_non_negative_real(value, name)
    if value > 1:
        raise ConfigError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def check_choice(value, choices, name):
    if value not in choices:
        raise ConfigError(f"{name} must be one of {sorted(choices)}, got {value!r}")
    return value
