import numpy as np
import pytest

from app import create_app
from app.config import Config


class TestConfig(Config):
    TESTING = True
    SWEEP_WORKERS = 1
    SWEEP_CHUNK = 512
    LOG_LEVEL = "WARNING"


@pytest.fixture
def app():
    return create_app(TestConfig)


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rk4_evolve(h: np.ndarray, psi0: np.ndarray, t: float, dt: float = 1e-3) -> np.ndarray:
    """Fixed-step RK4 on d psi / dt = -i H psi, used as an independent propagation oracle."""
    steps = max(1, int(round(t / dt)))
    dt = t / steps
    psi = np.array(psi0, dtype=complex)

    def f(v):
        return -1j * (h @ v)

    for _ in range(steps):
        k1 = f(psi)
        k2 = f(psi + 0.5 * dt * k1)
        k3 = f(psi + 0.5 * dt * k2)
        k4 = f(psi + dt * k3)
        psi = psi + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi


def random_state(rng, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
