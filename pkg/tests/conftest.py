import numpy as np
import pytest

import thermalrabi as tr

# Fig-2a style probe points (g, k_B T), reused across the suite
MARKER_POINTS = ((0.1, 0.2), (0.2, 0.1), (0.5, 0.07), (0.9, 0.15))


@pytest.fixture(scope="session")
def marker_systems():
    """Assembled systems (with Liouvillians) at the four probe points."""
    bath = lambda t: tr.BathSpec(0.01, 0.01, t)
    return {(g, t): tr.assemble(tr.RabiParams(g=g), t, bath=bath(t))
            for g, t in MARKER_POINTS}


@pytest.fixture
def rng():
    # fresh per test: draws do not depend on which other tests ran
    return np.random.default_rng(20240817)


def random_hermitian(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2
