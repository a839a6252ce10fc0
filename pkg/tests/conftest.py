import numpy as np
import pytest

from blaschke_crit.transforms import lift_critical_points

_criteria = {}


def random_disc_points(rng, count, radius, repeated=False):
    """``count`` points with |xi| <= radius; with ``repeated`` some coincide."""
    r = radius * np.sqrt(rng.uniform(0, 1, count))
    pts = r * np.exp(2j * np.pi * rng.uniform(0, 1, count))
    if repeated and count >= 2:
        k = rng.integers(2, count + 1)
        pts[1:k] = pts[0]
    return pts


def random_cps(rng, count, radius=0.9, repeated=False):
    return lift_critical_points(random_disc_points(rng, count, radius, repeated))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    failed = report.failed
    if report.when == "call" or failed:
        prev = _criteria.get(number, (title, True))
        _criteria[number] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}")
