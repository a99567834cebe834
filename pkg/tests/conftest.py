from pathlib import Path

import pytest

from satis.workspace import load_directory

ROOT = Path(__file__).resolve().parent.parent
WORKSPACES = ROOT / "workspaces"
FIXTURES = Path(__file__).resolve().parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def canonical():
    return load_directory(WORKSPACES / "canonical")


@pytest.fixture(scope="session")
def preprocess():
    return load_directory(WORKSPACES / "preprocess")


@pytest.fixture(scope="session")
def recursive():
    return load_directory(WORKSPACES / "recursive")


ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, line = ACCEPTANCE[n]
        terminalreporter.write_line(f"{status} criterion {n}: {line}")
