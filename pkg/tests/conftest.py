import numpy as np
import pytest

from spaceform.model_spaces import ModelSpace


def random_points(space, rng, count, spread=1.0):
    """Random points on the model (hyperbolic points within distance ~2*spread of the base)."""
    n1 = space.n + 1
    if space.is_flat:
        x = np.ones((count, n1))
        x[:, 1:] = rng.uniform(-spread, spread, (count, space.n))
        return x
    k = space.k
    v = rng.standard_normal((count, space.n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    if space.curv_sign > 0:
        t = rng.uniform(0, np.pi, count)
        return np.column_stack([np.cos(t), k * np.sin(t)[:, None] * v])
    t = rng.uniform(0, 2 * spread, count)
    return np.column_stack([np.cosh(t), k * np.sinh(t)[:, None] * v])


SPACES = [
    ModelSpace.spherical(3, 1.0),
    ModelSpace.spherical(3, 2.5),
    ModelSpace.flat(3),
    ModelSpace.hyperbolic(3, 1.0),
    ModelSpace.hyperbolic(2, 0.7),
    ModelSpace.spherical(2, 1.0),
]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
