import sys
from pathlib import Path

import pytest

from cobbie.ifc import load_model

DATA = Path(__file__).resolve().parents[1] / "src" / "cobbie" / "data"
MODELS = DATA / "models"
MINIBENCH = DATA / "minibench"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def office():
    return load_model(MODELS / "office.ifc")


@pytest.fixture(scope="session")
def house():
    return load_model(MODELS / "house_de.ifc")


@pytest.fixture(scope="session")
def geometry_model():
    return load_model(MODELS / "geometry.ifc")


def golden(name: str, actual: str) -> str:
    """Return the golden text, writing it on first run (the written file is then reviewed and committed)."""
    path = GOLDEN / name
    if not path.exists():
        path.write_text(actual, encoding="utf-8")
    return path.read_text(encoding="utf-8")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for i in sorted(results):
            terminalreporter.write_line(results[i])
