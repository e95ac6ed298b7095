import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Print one PASS/FAIL line per acceptance criterion as it completes."""
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "test_acceptance" not in str(item.fspath):
        return
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, description = marker.args
    status = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {number}: {status} - {description}", flush=True)


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, description): acceptance criterion metadata"
    )
