import logging
import os

from dotenv import load_dotenv

load_dotenv()

DEFAULT_THREADS = 1
DEFAULT_WIDTH_CAP = 24
DEFAULT_TRAJECTORIES = 20000
DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_EXECUTOR = "thread"
EXECUTORS = ("thread", "process")


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from e
    if value < 1:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def get_threads() -> int:
    """Worker threads for trajectory sampling (DQCRCX_THREADS)."""
    return _int_env("DQCRCX_THREADS", DEFAULT_THREADS)


def get_executor() -> str:
    """Worker pool kind for trajectory sampling (DQCRCX_EXECUTOR): thread or process."""
    name = os.getenv("DQCRCX_EXECUTOR", DEFAULT_EXECUTOR).strip().lower() or DEFAULT_EXECUTOR
    if name not in EXECUTORS:
        raise ValueError(f"DQCRCX_EXECUTOR must be one of {list(EXECUTORS)}, got {name!r}")
    return name


def get_width_cap() -> int:
    return _int_env("DQCRCX_WIDTH_CAP", DEFAULT_WIDTH_CAP)


def get_trajectories() -> int:
    return _int_env("DQCRCX_TRAJECTORIES", DEFAULT_TRAJECTORIES)


def get_log_level() -> int:
    name = os.getenv("DQCRCX_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.INFO


def configure_logging(verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else get_log_level(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
