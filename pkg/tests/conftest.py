import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(num, title): marks a test as one acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    num, title = marker.args
    if hasattr(rep, "wasxfail"):
        status = "XPASS (unexpectedly green)" if rep.passed \
            else "FAIL (expected red; see test_acceptance docstring)"
    elif rep.passed:
        status = "PASS"
    elif rep.failed:
        status = "FAIL"
    else:
        status = "SKIP"
    _RESULTS.setdefault(num, []).append((title, status))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num in sorted(_RESULTS):
        for title, status in _RESULTS[num]:
            terminalreporter.write_line(f"criterion {num:>2} [{title}]: {status}")
