import pytest

from kbeta.catalog import CatalogKey, load

_ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one of the eight acceptance criteria")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _ACCEPTANCE[number] = (title, rep.outcome, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, outcome, secs = _ACCEPTANCE[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}  ({secs:.1f}s)")


@pytest.fixture(scope="session")
def p33():
    return load(CatalogKey("P33", 3))


@pytest.fixture(scope="session")
def ppn4():
    return load(CatalogKey("Ppn", 3, 4))


@pytest.fixture(scope="session")
def ppn5():
    return load(CatalogKey("Ppn", 3, 5))


@pytest.fixture(scope="session")
def pp3_5():
    return load(CatalogKey("Pp3", 5))
