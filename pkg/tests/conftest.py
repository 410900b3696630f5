import pytest

from sigmarket import CostFamily, MarketParams

# Canonical desk-scale markets used across the suite: linear costs with the
# low type twice as burdened, an even type split, and theta_H = 2.
LINEAR = CostFamily.linear(kappa_L=2.0, kappa_H=1.0)


@pytest.fixture
def sorting():
    return MarketParams(theta_L=1.0, theta_H=2.0, lam=0.5, cost=LINEAR)


@pytest.fixture
def screening():
    return MarketParams(theta_L=-1.0, theta_H=2.0, lam=0.5, cost=LINEAR)


_ACCEPTANCE_RESULTS: dict[str, str] = {}


def record_acceptance(key: str, detail: str) -> None:
    _ACCEPTANCE_RESULTS[key] = detail


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "criterion" not in item.name:
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    key = marker.args[0]
    status = "PASS" if report.passed else "FAIL"
    detail = _ACCEPTANCE_RESULTS.get(key, "")
    _ACCEPTANCE_RESULTS[key] = f"{status:4s} {key}" + (f" — {detail}" if detail else "")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(_ACCEPTANCE_RESULTS):
        terminalreporter.write_line(_ACCEPTANCE_RESULTS[key])


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): acceptance-criterion test")
