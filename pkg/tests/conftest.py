import numpy as np
import pytest

from tcsense.model import SystemParams
from tcsense.validation import fig2_system_params

_CRITERION_RESULTS: dict[str, str] = {}


@pytest.fixture
def params() -> SystemParams:
    """Reference system parameters (t = 1 us)."""
    return fig2_system_params(t_s=1e-6)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260808)


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].removeprefix("test_")
    if hasattr(report, "wasxfail"):
        outcome = "FAIL (documented spec defect, see decisions ledger)"
    elif report.passed:
        outcome = "PASS"
    else:
        outcome = "FAIL"
    _CRITERION_RESULTS[name] = outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERION_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in sorted(_CRITERION_RESULTS.items()):
        terminalreporter.write_line(f"{outcome:<8s} {name}")
