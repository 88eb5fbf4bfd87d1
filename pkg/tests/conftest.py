import numpy as np
import pytest

from parakahler import models, product


@pytest.fixture(scope="session")
def ds1():
    return models.desitter(1.0)


@pytest.fixture(scope="session")
def mink():
    return models.minkowski_chart()


@pytest.fixture(scope="session")
def dsds_plus(ds1):
    return product.ProductSpace(ds1.chart, ds1.chart, 1)


@pytest.fixture(scope="session")
def dsds_minus(ds1):
    return product.ProductSpace(ds1.chart, ds1.chart, -1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
