"""Per-trial seeding, input digests and ordered parallel execution of independent trials."""

import hashlib
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import numpy as np
import structlog
from numpy.typing import ArrayLike

from symform.errors import ConfigError

logger = structlog.get_logger()

T = TypeVar("T")

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
THREADS_ENV = "SYMFORM_THREADS"
DEFAULT_THREADS = 4


def _splitmix64(x: int) -> int:
    x = (x + GOLDEN_GAMMA) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_trial_seed(base_seed: int, trial_index: int) -> int:
    """Two splitmix64 rounds over base_seed XOR (trial_index * golden gamma), all mod 2^64."""
    mixed = (base_seed & MASK64) ^ ((trial_index * GOLDEN_GAMMA) & MASK64)
    return _splitmix64(_splitmix64(mixed))


def trial_rng(base_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(derive_trial_seed(base_seed, trial_index))


def inputs_digest(arrays: Iterable[ArrayLike]) -> str:
    """sha256 over shapes and complex128 bytes of the inputs, truncated to 16 hex digits."""
    h = hashlib.sha256()
    for array in arrays:
        data = np.ascontiguousarray(np.asarray(array, dtype=np.complex128))
        h.update(repr(data.shape).encode())
        h.update(data.tobytes())
    return h.hexdigest()[:16]


def resolve_threads(threads: int | None = None) -> int:
    """Explicit value, else SYMFORM_THREADS, else the default."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV)
        if raw is None:
            return DEFAULT_THREADS
        try:
            threads = int(raw)
        except ValueError as e:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from e
    if threads < 1:
        raise ConfigError(f"Thread count must be a positive integer, got {threads}")
    return threads


def run_trials(
    task: Callable[[int, int], T],
    trials: int,
    base_seed: int,
    threads: int | None = None,
) -> list[T]:
    """Run task(trial_index, trial_seed) for every trial; results come back in trial order."""
    workers = min(resolve_threads(threads), max(1, trials))
    seeds = [derive_trial_seed(base_seed, index) for index in range(trials)]
    logger.debug("Running trials", trials=trials, workers=workers, base_seed=base_seed)
    if workers == 1:
        return [task(index, seed) for index, seed in enumerate(seeds)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(task, range(trials), seeds))
