import numpy as np
import pytest
from hypothesis import settings

from eurcoh.qla import DensityMatrix

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_density(rng, dim=4, rank=None, dims=(2, 2)):
    rank = rank or dim
    z = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = z @ z.conj().T
    return DensityMatrix(m / np.trace(m).real, dims)


def random_hermitian(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (z + z.conj().T)


def ket_density(amps, dims=(2, 2)):
    return DensityMatrix.from_ket(np.asarray(amps, dtype=complex), dims)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
HH = np.array([1, 0, 0, 0], dtype=complex)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
