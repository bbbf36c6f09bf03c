import numpy as np
import pytest

from humsim.sensor import SensorConfig, with_parameter


@pytest.fixture
def default_config():
    return SensorConfig()


@pytest.fixture
def pore_free_config():
    """Default geometry with a vanishing pore fraction (pure alumina)."""
    return with_parameter(SensorConfig(), "stack.porosity", 1e-12)


def loop_path(top=95, step=1):
    up = list(np.arange(0, top + step / 2, step, dtype=float))
    return up + up[-2::-1]


ACCEPTANCE_LOG = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
