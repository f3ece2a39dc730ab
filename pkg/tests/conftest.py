import pathlib

import pytest

from treecore.cli import load_session

SESSIONS = pathlib.Path(__file__).resolve().parent.parent / "sessions"


def session(name: str):
    return load_session(str(SESSIONS / f"{name}.json"))


@pytest.fixture(scope="session")
def f2():
    return session("f2_free_product")


@pytest.fixture(scope="session")
def torus():
    return session("punctured_torus")


@pytest.fixture(scope="session")
def f3():
    return session("f3_collapse")


ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, name, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {name}  {detail}")
