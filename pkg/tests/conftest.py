import pytest

from possalloc.fuzzy import make_triangular
from possalloc.operators import EUOperator


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion for the summary."""
    lines = request.config._acceptance_lines

    def record(label, passed, detail=""):
        lines.append(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
        print(lines[-1])
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def T1():
    return EUOperator("T1")


@pytest.fixture
def T2():
    return EUOperator("T2")


@pytest.fixture
def tri212():
    return make_triangular(2, 1, 4)
