from __future__ import annotations

import os

from errors import ConfigurationError


def ensure_list(e) -> list:
    """
    Ensure that the given item is a list
    :param e: Object to check
    :return: e as a list if e is a list, tuple or set or a new list with e as single element
    """
    if e is None:
        return []
    elif isinstance(e, (list, tuple, set)):
        return list(e)
    else:
        return [e]


def ensure_int_list(e, option: str, minimum: int | None = None) -> list[int]:
    """
    Read a configuration value holding one or several integers
    :param e: Value from the configuration
    :param option: Name of the option, used in the error message
    :param minimum: Smallest admissible value
    :raises ConfigurationError: if an item is not an integer or is below minimum
    """
    values = ensure_list(e)
    for value in values:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"{option} must hold integers, got {value!r}")
        if minimum is not None and value < minimum:
            raise ConfigurationError(f"{option} must hold integers >= {minimum}, got {value}")
    return values


def suffixed_path(path: str, suffix: str = "", extension: str | None = None) -> str:
    """
    path with suffix inserted before its extension, e.g. flat.json -> flat_n2.json
    """
    stem, current = os.path.splitext(path)
    return f"{stem}{suffix}{current if extension is None else extension}"
