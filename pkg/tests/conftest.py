import pytest

from snowchunk.inside_outside import train_io
from snowchunk.open_close import train_oc
from snowchunk.synth import generate_pattern_corpus

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    n, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        prev = _criteria.get(n, (title, "PASS"))[1]
        rank = {"FAIL": 2, "SKIP": 1, "PASS": 0}
        _criteria[n] = (title, status if rank[status] >= rank[prev] else prev)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, status = _criteria[n]
        terminalreporter.write_line(f"[{status}] criterion {n}: {title}")


@pytest.fixture(scope="session")
def synth_train():
    return generate_pattern_corpus(5000, seed=1)


@pytest.fixture(scope="session")
def synth_test():
    return generate_pattern_corpus(500, seed=2)


@pytest.fixture(scope="session")
def io_model(synth_train):
    return train_io(synth_train)


@pytest.fixture(scope="session")
def oc_model(synth_train):
    return train_oc(synth_train)


@pytest.fixture(scope="session")
def small_train():
    return generate_pattern_corpus(400, seed=11)


@pytest.fixture(scope="session")
def small_oc(small_train):
    return train_oc(small_train)
