import time

import pytest

_ACCEPTANCE_LINES = []
SESSION_START = time.perf_counter()


def pytest_sessionstart(session):
    global SESSION_START
    SESSION_START = time.perf_counter()


def pytest_collection_modifyitems(session, config, items):
    # acceptance criteria run last so criterion 10 can time the whole session
    items.sort(key=lambda item: item.nodeid.startswith("tests/test_acceptance.py")
               or "test_acceptance.py" in item.nodeid)


@pytest.fixture
def record_criterion():
    def record(number, ok, detail):
        line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


@pytest.fixture
def session_elapsed():
    return lambda: time.perf_counter() - SESSION_START


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
