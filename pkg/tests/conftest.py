import numpy as np
import pytest

from qdenoise.dataset import DatasetGenerator
from qdenoise.noise import NoiseKind
from qdenoise.nn import ModelConfig

LEVELS = [0.05, 0.1, 0.15, 0.2]


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running experiment, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def small_dataset():
    """40 three-qubit samples: two per (kind, level) cell."""
    generator = DatasetGenerator(3, 2, 4, list(NoiseKind), LEVELS, global_seed=11)
    return generator.generate(40)


@pytest.fixture
def thumbnail_config():
    return ModelConfig(dim=8, filters=(4, 8, 16), kernel_size=3, dropout=0.0, lam=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_density_matrix(rng: np.random.Generator, dim: int, rank: int = None) -> np.ndarray:
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_pure_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)
