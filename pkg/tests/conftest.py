from pathlib import Path

import pytest

from fpabd.formulas import parse_pit, parse_problem

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load(name: str):
    return parse_problem(fixture_path(name).read_text())


def load_pit(name: str, problem=None):
    declared = problem.variables if problem is not None else None
    return parse_pit(fixture_path(name).read_text(), declared)


@pytest.fixture(scope="session")
def rain():
    return load("rain.fp")


@pytest.fixture(scope="session")
def rain_prime():
    return load("rain_prime.fp")


@pytest.fixture(scope="session")
def pqr():
    return load("pqr.fp")


@pytest.fixture(scope="session")
def traffic():
    return load("traffic.fp")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
