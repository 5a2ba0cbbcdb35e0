import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hilbert_lab import Ellipsoid, Polytope, Simplex
from hilbert_lab.groups import axis_of, schottky_pso21
from hilbert_lab.peripheral import PeripheralFamily

settings.register_profile(
    "hilbert", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile("hilbert")


@pytest.fixture(scope="session")
def ball():
    return Ellipsoid.ball(2)


@pytest.fixture(scope="session")
def square():
    return Polytope.square()


@pytest.fixture(scope="session")
def triangle():
    return Simplex.standard(2)


@pytest.fixture(scope="session")
def schottky():
    # t = 2 keeps all commutator-axis endpoints at word length 6 resolvable at 1e-6
    return schottky_pso21(2.0, np.pi / 2)


@pytest.fixture(scope="session")
def commutator_axis(schottky):
    return axis_of(schottky.domain, schottky.word_matrix("abAB"))


@pytest.fixture(scope="session")
def schottky_family(schottky, commutator_axis):
    return PeripheralFamily([commutator_axis], schottky, 6)


VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Record one acceptance line, then assert it."""
    def record(n, ok, detail):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config.stash[VERDICTS].append((n, line))
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = sorted(config.stash.get(VERDICTS, []))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in lines:
            terminalreporter.write_line(line)
