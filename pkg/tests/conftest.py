import pytest

ACCEPTANCE_LINES = []


def pytest_configure(config):
    config._acceptance_lines = ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion():
    """criterion(n, title)(ok, detail) records one pass/fail line and asserts ok."""
    def start(n, title):
        def finish(ok, detail=""):
            line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
            ACCEPTANCE_LINES.append(line)
            print(line)
            assert ok, line
        return finish
    return start
