import pytest

from zerofree.primes import sieve


@pytest.fixture(scope="session")
def small_table():
    return sieve(10_000)


# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    number = int(name.split("_")[2])
    ACCEPTANCE[number] = ACCEPTANCE.get(number, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        state = "PASS" if ACCEPTANCE[number] else "FAIL"
        terminalreporter.write_line(f"{state} criterion {number}")
