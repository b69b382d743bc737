"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_psd(gen: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    a = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    return scale * (a @ a.conj().T) / n


def random_unit(gen: np.random.Generator, n: int) -> np.ndarray:
    v = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    return v / np.linalg.norm(v)


@pytest.fixture
def gen() -> np.random.Generator:
    return rng(1234)
