import os

from dotenv import load_dotenv

from utils.errors import ConfigError

load_dotenv()

BUDGET_VARIABLES = ("DDETECT_MAX_OBSERVER_STATES", "DDETECT_MAX_UNARY_STEPS")


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"{name} must be at least 1, got {value}")
    return value


def _int_env_or_default(name: str, default: int) -> int:
    # Malformed values are reported by check_environment, not at import.
    try:
        return _int_env(name, default)
    except ConfigError:
        return default


def check_environment() -> None:
    """Raise ConfigError for the first malformed budget variable."""
    for name in BUDGET_VARIABLES:
        _int_env(name, 1)


DEFAULT_MAX_OBSERVER_STATES = 2**20
DEFAULT_MAX_UNARY_STEPS = 2**22

MAX_OBSERVER_STATES = _int_env_or_default("DDETECT_MAX_OBSERVER_STATES", DEFAULT_MAX_OBSERVER_STATES)
MAX_UNARY_STEPS = _int_env_or_default("DDETECT_MAX_UNARY_STEPS", DEFAULT_MAX_UNARY_STEPS)

LOG_LEVEL = os.getenv("DDETECT_LOG_LEVEL", "WARNING").upper()
LOG_DIR = os.getenv("DDETECT_LOG_DIR")
