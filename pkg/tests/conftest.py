import numpy as np
import pytest

from qubitfield.classify import determinant_polynomial, factorize
from qubitfield.operators import embed_triple
from qubitfield.superops import extract_structure_constants

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion gate")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (report.when == "call" or (report.when == "setup" and report.failed)):
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": [], "failed": []})
    (entry["passed"] if report.passed else entry["failed"]).append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        verdict = "PASS" if not entry["failed"] else "FAIL"
        line = f"criterion {number:2d} [{verdict}] {entry['title']}"
        if entry["failed"]:
            line += f"  (failing: {', '.join(entry['failed'])})"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def sc4():
    return extract_structure_constants(embed_triple(4), seed=0)


@pytest.fixture(scope="session")
def det_poly(sc4):
    return determinant_polynomial(sc4)


@pytest.fixture(scope="session")
def fact(det_poly):
    return factorize(det_poly)
