import numpy as np
import pytest

from ptdyson import kernels
from ptdyson.model import ModelParams

GRID = np.linspace(0.0, 60.0, 6001)


@pytest.fixture
def grid():
    return GRID.copy()


@pytest.fixture
def fig1a():
    return ModelParams(omega=1.0, alpha=0.5, c1=4.0, c2=1.0)


@pytest.fixture
def fig1b():
    return ModelParams(omega=1.0, alpha=2.0, c1=4.0, c2=1j)


@pytest.fixture
def broken():
    return ModelParams(omega=1.0, alpha=2.0, c1=4.0, c2=1.0)


@pytest.fixture
def alpha0():
    return ModelParams(omega=1.0, alpha=0.0, c1=4.0, c2=1.0)


@pytest.fixture
def exceptional():
    return ModelParams(omega=1.0, alpha=1.0, A=2.0, B=1.0)


@pytest.fixture(params=["alpha0", "fig1a", "fig1b", "exceptional"])
def valid_params(request):
    return request.getfixturevalue(request.param)


_backends = [pytest.param(kernels.rk4_linear_python, id="python")]
if kernels.rk4_linear_compiled is not None:
    _backends.append(pytest.param(kernels.rk4_linear_compiled, id="cython"))


@pytest.fixture(params=_backends)
def backend(request):
    return request.param


_CRITERIA = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record and print the one-line verdict of an acceptance criterion."""
    lines = request.config.stash.setdefault(_CRITERIA, [])

    def record(number: int, passed: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
