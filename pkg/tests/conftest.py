import numpy as np
import pytest

from meshfree.geometry import PolygonBoundary

_ACCEPTANCE = {}


def record_criterion(number: int, title: str, passed: bool, detail: str = "") -> None:
    _ACCEPTANCE[number] = (title, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        line = f"[{'PASS' if passed else 'FAIL'}] {number}. {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))


@pytest.fixture
def unit_square():
    return PolygonBoundary([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
