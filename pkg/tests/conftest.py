import pytest

from nilcsat.algebra import build_example, direct_product


@pytest.fixture(scope="session")
def a22():
    return build_example(2, 2, 2)


@pytest.fixture(scope="session")
def a23():
    return build_example(2, 2, 3)


@pytest.fixture(scope="session")
def b322():
    return build_example(3, 2, 2)


@pytest.fixture(scope="session")
def a22sq(a22):
    return direct_product(a22, a22)


_VERDICTS = []


@pytest.fixture
def verdict(capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def emit(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        _VERDICTS.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
