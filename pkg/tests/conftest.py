import numpy as np
import pytest

from robsel.logic.instance_builder import InstanceBuilder


@pytest.fixture
def modular_pair():
    """f1 weights (3, 2, 1), f2 weights (1, 2, 3) over items v1..v3."""
    return InstanceBuilder.modular_pair().build_ensemble()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def bits_of(n, *items):
    """Bool vector with the given 0-based items set."""
    bits = np.zeros(n, dtype=bool)
    bits[list(items)] = True
    return bits
