import numpy as np
import pytest

from prequential import kernels

BACKENDS = [kernels.numpy_kernels]
if kernels.numba_kernels is not None:
    BACKENDS.append(kernels.numba_kernels)


@pytest.fixture(params=BACKENDS, ids=lambda k: k.name)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20160601)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request):
    """Record one verdict line per acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(label, ok, detail):
        lines.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        print(lines[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
