import numpy as np
import pytest

from rmtlab import calibrate_pareto, calibrate_truncated_pareto, gaussian_spec, rademacher_spec


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


HEAVY_SPECS = {
    "pareto-2.5": lambda: calibrate_pareto(2.5),
    "pareto-3": lambda: calibrate_pareto(3.0),
    "pareto-4": lambda: calibrate_pareto(4.0),
    "pareto-5": lambda: calibrate_pareto(5.0),
    "trunc-2-1e6": lambda: calibrate_truncated_pareto(2.0, 1e6),
    "trunc-3-50": lambda: calibrate_truncated_pareto(3.0, 50.0),
}

ALL_SPECS = dict(HEAVY_SPECS, gaussian=gaussian_spec, rademacher=rademacher_spec)


@pytest.fixture(params=sorted(HEAVY_SPECS))
def heavy_spec(request):
    return HEAVY_SPECS[request.param]()


@pytest.fixture(params=sorted(ALL_SPECS))
def any_spec(request):
    return ALL_SPECS[request.param]()


ACCEPTANCE_LINES = {}


def record_criterion(number, ok, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
