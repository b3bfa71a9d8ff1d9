import pytest

# "CRITERION k" -> one-line verdict, filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[1])):
        terminalreporter.write_line(f"{key}: {ACCEPTANCE[key]}")


@pytest.fixture
def verdict():
    """Record a criterion's verdict before asserting it."""

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {detail}"
        ACCEPTANCE[f"CRITERION {number}"] = line
        print(f"CRITERION {number}: {line}")
        return ok

    return record
