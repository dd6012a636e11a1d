# matchstick/utils.py

import codecs
import os
import logging
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

logger = logging.getLogger(__name__)

ENV_TOLERANCE = "MATCHSTICK_TOLERANCE"
ENV_BUDGET = "MATCHSTICK_BUDGET"
ENV_CONFIG_PATH = "MATCHSTICK_CONFIG_PATH"


class NotUtf8(ValueError):
    """A text input that does not decode as UTF-8."""


def read_utf8_file(file_path) -> str:
    """
    Read a map, coordinate, config or audit file as UTF-8. A leading byte-order
    mark is dropped; any other encoding is an error, never a guess.
    """
    data = Path(file_path).read_bytes()
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as error:
        raise NotUtf8(
            f"{file_path} is not UTF-8: byte {data[error.start]:#04x} at offset {error.start}"
        ) from None
    if data.startswith(codecs.BOM_UTF8):
        logger.warning(f"Ignoring the byte-order mark at the start of {file_path}")
    return text


def format_path_for_output(
    path: Union[str, Path], base_path: Union[str, Path], force_absolute: bool = False
) -> str:
    """
    Formats a path for output, ensuring relative paths start with './'.
    """
    path = Path(path).resolve()
    base_path = Path(base_path).resolve()

    if force_absolute:
        return str(path)

    try:
        relative_path = path.relative_to(base_path)
        relative_str = str(relative_path)
        if relative_str == ".":
            return relative_str
        return f"./{relative_str}"
    except ValueError:
        return str(path)


def fraction_str(value: Fraction) -> str:
    """Exact rationals always serialize as 'p/q' strings, integers included."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning(f"Ignoring {name}={raw!r}: not a number")
        return default


def env_config_dirs() -> list:
    raw: Optional[str] = os.environ.get(ENV_CONFIG_PATH)
    if not raw:
        return []
    return [Path(part).resolve() for part in raw.split(":") if part]
