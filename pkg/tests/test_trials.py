"""Tests for trial seeding, digests and the trial runner."""

import threading

import numpy as np
import pytest

from symform import trials
from symform.errors import ConfigError
from symform.trials import derive_trial_seed, inputs_digest, resolve_threads, run_trials


def test_trial_seeds_are_deterministic() -> None:
    """Test that a trial seed depends only on the base seed and the index."""
    assert derive_trial_seed(7, 3) == derive_trial_seed(7, 3)
    assert derive_trial_seed(7, 3) != derive_trial_seed(7, 4)
    assert derive_trial_seed(7, 3) != derive_trial_seed(8, 3)
    assert 0 <= derive_trial_seed(2**64 - 1, 10**6) < 2**64


def test_trial_seeds_do_not_collide() -> None:
    """Test distinct seeds over a small scan of bases and indices."""
    seeds = {derive_trial_seed(base, index) for base in range(8) for index in range(256)}
    assert len(seeds) == 8 * 256


def test_trial_rng_regenerates_draws() -> None:
    """Test that equal seeds give equal streams."""
    first = trials.trial_rng(1, 5).normal(size=4)
    assert np.array_equal(first, trials.trial_rng(1, 5).normal(size=4))


def test_inputs_digest() -> None:
    """Test that digests see values, dtype-normalized bytes and shapes."""
    a = np.eye(2)
    digest = inputs_digest([a])
    assert len(digest) == 16
    assert digest == inputs_digest([a.astype(complex)])
    assert digest != inputs_digest([2 * a])
    assert inputs_digest([np.zeros(4)]) != inputs_digest([np.zeros((2, 2))])


def test_resolve_threads(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test explicit value, environment variable and default."""
    monkeypatch.delenv(trials.THREADS_ENV, raising=False)
    assert resolve_threads() == trials.DEFAULT_THREADS
    assert resolve_threads(2) == 2

    monkeypatch.setenv(trials.THREADS_ENV, "3")
    assert resolve_threads() == 3
    assert resolve_threads(1) == 1


@pytest.mark.parametrize("raw", ["zero", "0", "-2"])
def test_resolve_threads_rejects_bad_values(monkeypatch: pytest.MonkeyPatch, raw: str) -> None:
    """Test that a non-positive or non-numeric thread count is a config error."""
    monkeypatch.setenv(trials.THREADS_ENV, raw)
    with pytest.raises(ConfigError):
        resolve_threads()


def test_run_trials_keeps_trial_order() -> None:
    """Test that results come back in trial order whatever the worker count."""
    def task(index: int, seed: int) -> tuple[int, int, float]:
        return index, seed, float(np.random.default_rng(seed).uniform())

    serial = run_trials(task, 20, base_seed=11, threads=1)
    assert [index for index, _, _ in serial] == list(range(20))
    assert run_trials(task, 20, base_seed=11, threads=4) == serial


def test_run_trials_uses_worker_threads() -> None:
    """Test that more than one thread runs trials when asked to."""
    seen: set[int] = set()
    barrier = threading.Barrier(2, timeout=5)

    def task(index: int, seed: int) -> int:
        seen.add(threading.get_ident())
        if index < 2:
            barrier.wait()
        return index

    assert run_trials(task, 4, base_seed=0, threads=2) == [0, 1, 2, 3]
    assert len(seen) == 2
