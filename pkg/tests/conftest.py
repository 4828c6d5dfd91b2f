import sys

import pytest

from govcomp import fixtures


@pytest.fixture(scope="session")
def irs():
    return fixtures.load("irs")


@pytest.fixture(scope="session")
def irs_rec():
    return fixtures.load("irs_rec")


@pytest.fixture(scope="session")
def irs_init():
    return fixtures.load("irs_init")


@pytest.fixture(scope="session")
def all_fixtures():
    return {name: fixtures.load(name) for name in fixtures.NAMES}


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, title, elapsed in sorted(results):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid:<3} {title} ({elapsed:.2f} s)")
