import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=int(os.environ.get("HYPOTHESIS_MAX_EXAMPLES", "150")),
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


# number -> (title, "PASS" | "FAIL", seconds), filled as acceptance tests run
ACCEPTANCE: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    report = outcome.get_result()
    number, title = mark.args
    _, status, secs = ACCEPTANCE.get(number, (title, "PASS", 0.0))
    if report.failed:
        status = "FAIL"
    ACCEPTANCE[number] = (title, status, secs + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, status, secs = ACCEPTANCE[number]
        terminalreporter.write_line(f"{status} {number:2d}. {title} ({secs:.1f}s)")
